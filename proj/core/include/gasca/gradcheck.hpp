#pragma once

#include <functional>
#include <vector>

#include "gasca/param.hpp"

namespace gasca {

/// Compares analytic gradients against central finite differences.
///
/// `loss_and_grad` must zero the grads, run the forward pass, run the
/// backward pass (populating param.grad), and return the scalar loss. The
/// checker copies the analytic grads, then perturbs every element of every
/// parameter value by +-h and differences the returned losses.
///
/// Returns the worst relative error, defined as
///   |analytic - numeric| / max(|analytic| + |numeric|, 1e-6).
double finite_diff_check(const std::function<double()>& loss_and_grad,
                         const std::vector<Parameter*>& params, double h = 1e-5);

}  // namespace gasca
