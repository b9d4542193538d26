#pragma once

#include <vector>

#include "gasca/param.hpp"

namespace gasca {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    void validate() const;
};

/// Bias-corrected Adam update on every parameter, then zeroes the grads.
/// First step on a single scalar with gradient g moves the value by
/// lr * g / (|g| + eps). Throws TrainError on non-finite gradients or if an
/// update would produce a non-finite value.
void adam_step(const std::vector<Parameter*>& params, const AdamConfig& cfg);

}  // namespace gasca
