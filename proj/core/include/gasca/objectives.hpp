#pragma once

#include "gasca/tensor.hpp"

namespace gasca {

/// Probabilities are clamped into [kLogEps, 1 - kLogEps] before any log, so
/// losses and gradients stay finite at saturation.
inline constexpr double kLogEps = 1e-7;

struct LossWeights {
    double lambda_rec = 1.0;
    double lambda_adv = 0.01;
    void validate() const;
};

/// Scalar loss plus gradients wrt each direct input. Tensors not produced by
/// a given objective are left empty.
struct LossBundle {
    double loss = 0.0;
    Tensor grad_real;   // wrt d_real probabilities
    Tensor grad_fake;   // wrt d_fake probabilities
    Tensor grad_recon;  // wrt the reconstruction y
};

/// L_D = -(1/m) sum[log d_real + log(1 - d_fake)], the descent form of the
/// discriminator's rating objective. Both inputs must lie in (0, 1).
LossBundle discriminator_loss(const Tensor& d_real, const Tensor& d_fake);

/// Saturating generator objective L_G = (1/m) sum log(1 - d_fake), minimized.
/// With non_saturating, computes -(1/m) sum log d_fake instead.
LossBundle generator_adversarial_loss(const Tensor& d_fake, bool non_saturating = false);

/// lambda_rec * MSE(y, x_mu) + lambda_adv * generator_adversarial_loss.
LossBundle combined_generator_loss(const Tensor& y, const Tensor& x_mu, const Tensor& d_fake,
                                   const LossWeights& w, bool non_saturating = false);

}  // namespace gasca
