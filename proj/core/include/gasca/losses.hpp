#pragma once

#include <utility>

#include "gasca/tensor.hpp"

namespace gasca {

/// Mean squared error over all elements and its gradient wrt y.
/// loss = mean((y - target)^2), grad = 2 (y - target) / count.
std::pair<double, Tensor> mse_loss(const Tensor& y, const Tensor& target);

}  // namespace gasca
