#include "gasca/adam.hpp"

#include <cmath>
#include <stdexcept>

#include "gasca/errors.hpp"

namespace gasca {

void AdamConfig::validate() const {
    if (!(lr > 0.0) || !std::isfinite(lr)) throw std::invalid_argument("adam: lr must be finite and > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) throw std::invalid_argument("adam: beta1 must lie in [0, 1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) throw std::invalid_argument("adam: beta2 must lie in [0, 1)");
    if (!(eps > 0.0)) throw std::invalid_argument("adam: eps must be > 0");
}

void adam_step(const std::vector<Parameter*>& params, const AdamConfig& cfg) {
    cfg.validate();
    for (Parameter* p : params) {
        if (!p->grad.all_finite())
            throw TrainError("adam_step: non-finite gradient for parameter of shape " + p->value.shape_str());
        p->step += 1;
        const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(p->step));
        const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(p->step));
        for (std::int64_t i = 0; i < p->value.size(); ++i) {
            const double g = p->grad[i];
            const double m = cfg.beta1 * p->moment1[i] + (1.0 - cfg.beta1) * g;
            const double v = cfg.beta2 * p->moment2[i] + (1.0 - cfg.beta2) * g * g;
            p->moment1[i] = m;
            p->moment2[i] = v;
            const double m_hat = m / bc1;
            const double v_hat = v / bc2;
            p->value[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
        }
        if (!p->value.all_finite())
            throw TrainError("adam_step: update produced non-finite value for parameter of shape " +
                             p->value.shape_str());
        p->zero_grad();
    }
}

}  // namespace gasca
