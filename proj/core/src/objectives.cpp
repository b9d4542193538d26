#include "gasca/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gasca/losses.hpp"

namespace gasca {

void LossWeights::validate() const {
    if (lambda_rec < 0.0 || lambda_adv < 0.0)
        throw std::invalid_argument("LossWeights: lambda_rec and lambda_adv must be >= 0");
    if (!(lambda_rec + lambda_adv > 0.0))
        throw std::invalid_argument("LossWeights: lambda_rec + lambda_adv must be > 0");
}

namespace {

double clamp_prob(double p) { return std::clamp(p, kLogEps, 1.0 - kLogEps); }

void require_probabilities(const Tensor& p, const char* who) {
    if (p.size() < 1) throw std::invalid_argument(std::string(who) + ": empty batch");
    for (std::int64_t i = 0; i < p.size(); ++i)
        if (!(p[i] > 0.0 && p[i] < 1.0))
            throw std::invalid_argument(std::string(who) + ": probability out of (0,1): " + std::to_string(p[i]));
}

}  // namespace

LossBundle discriminator_loss(const Tensor& d_real, const Tensor& d_fake) {
    require_probabilities(d_real, "discriminator_loss");
    require_probabilities(d_fake, "discriminator_loss");
    if (d_real.size() != d_fake.size())
        throw std::invalid_argument("discriminator_loss: batch length mismatch " + d_real.shape_str() + " vs " +
                                    d_fake.shape_str());
    const double inv_m = 1.0 / static_cast<double>(d_real.size());
    LossBundle out;
    out.grad_real = Tensor(d_real.shape());
    out.grad_fake = Tensor(d_fake.shape());
    double acc = 0.0;
    for (std::int64_t i = 0; i < d_real.size(); ++i) {
        const double pr = clamp_prob(d_real[i]);
        const double pf = clamp_prob(d_fake[i]);
        acc -= std::log(pr) + std::log(1.0 - pf);
        out.grad_real[i] = -inv_m / pr;
        out.grad_fake[i] = inv_m / (1.0 - pf);
    }
    out.loss = acc * inv_m;
    return out;
}

LossBundle generator_adversarial_loss(const Tensor& d_fake, bool non_saturating) {
    require_probabilities(d_fake, "generator_adversarial_loss");
    const double inv_m = 1.0 / static_cast<double>(d_fake.size());
    LossBundle out;
    out.grad_fake = Tensor(d_fake.shape());
    double acc = 0.0;
    for (std::int64_t i = 0; i < d_fake.size(); ++i) {
        const double pf = clamp_prob(d_fake[i]);
        if (non_saturating) {
            acc -= std::log(pf);
            out.grad_fake[i] = -inv_m / pf;
        } else {
            acc += std::log(1.0 - pf);
            out.grad_fake[i] = -inv_m / (1.0 - pf);
        }
    }
    out.loss = acc * inv_m;
    return out;
}

LossBundle combined_generator_loss(const Tensor& y, const Tensor& x_mu, const Tensor& d_fake,
                                   const LossWeights& w, bool non_saturating) {
    w.validate();
    if (!y.same_shape(x_mu))
        throw std::invalid_argument("combined_generator_loss: shape mismatch " + y.shape_str() + " vs " +
                                    x_mu.shape_str());
    auto [rec_loss, rec_grad] = mse_loss(y, x_mu);
    LossBundle adv = generator_adversarial_loss(d_fake, non_saturating);

    LossBundle out;
    out.loss = w.lambda_rec * rec_loss + w.lambda_adv * adv.loss;
    out.grad_recon = scale(rec_grad, w.lambda_rec);
    out.grad_fake = scale(adv.grad_fake, w.lambda_adv);
    return out;
}

}  // namespace gasca
