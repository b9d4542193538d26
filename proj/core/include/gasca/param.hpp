#pragma once

#include <cstdint>

#include "gasca/tensor.hpp"

namespace gasca {

/// Trainable tensor: value, accumulated gradient, and Adam moment state.
/// grad always has value's shape; step counts optimizer updates applied.
struct Parameter {
    Tensor value;
    Tensor grad;
    Tensor moment1;
    Tensor moment2;
    std::int64_t step = 0;

    Parameter() = default;
    explicit Parameter(Tensor v)
        : value(std::move(v)),
          grad(value.shape()),
          moment1(value.shape()),
          moment2(value.shape()) {}

    void zero_grad() { grad.fill(0.0); }
};

}  // namespace gasca
