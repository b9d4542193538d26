#include "gasca/losses.hpp"

#include <stdexcept>

namespace gasca {

std::pair<double, Tensor> mse_loss(const Tensor& y, const Tensor& target) {
    if (!y.same_shape(target))
        throw std::invalid_argument("mse_loss: shape mismatch " + y.shape_str() + " vs " + target.shape_str());
    const double inv = 1.0 / static_cast<double>(y.size());
    double acc = 0.0;
    Tensor grad(y.shape());
    for (std::int64_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - target[i];
        acc += d * d;
        grad[i] = 2.0 * d * inv;
    }
    return {acc * inv, std::move(grad)};
}

}  // namespace gasca
