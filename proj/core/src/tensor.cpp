#include "gasca/tensor.hpp"

#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace gasca {

std::int64_t shape_numel(const std::vector<int>& shape) {
    std::int64_t n = 1;
    for (int d : shape) n *= d;
    return shape.empty() ? 0 : n;
}

std::string shape_to_string(const std::vector<int>& shape) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << "x";
        os << shape[i];
    }
    os << ")";
    return os.str();
}

static void validate_shape(const std::vector<int>& shape) {
    if (shape.empty()) throw std::invalid_argument("Tensor: shape must have at least one extent");
    for (int d : shape) {
        if (d <= 0)
            throw std::invalid_argument("Tensor: non-positive extent in shape " + shape_to_string(shape));
    }
}

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    validate_shape(shape_);
    data_.assign(static_cast<std::size_t>(shape_numel(shape_)), 0.0);
}

Tensor::Tensor(std::vector<int> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    validate_shape(shape_);
    if (shape_numel(shape_) != static_cast<std::int64_t>(data_.size()))
        throw std::invalid_argument("Tensor: shape " + shape_to_string(shape_) + " does not match data length " +
                                    std::to_string(data_.size()));
}

Tensor Tensor::full(std::vector<int> shape, double value) {
    Tensor t(std::move(shape));
    t.fill(value);
    return t;
}

int Tensor::dim(int axis) const {
    if (axis < 0 || axis >= rank())
        throw std::invalid_argument("Tensor: axis " + std::to_string(axis) + " out of range for rank " +
                                    std::to_string(rank()));
    return shape_[static_cast<std::size_t>(axis)];
}

double& Tensor::at4(int n, int c, int h, int w) {
    const int C = shape_[1], H = shape_[2], W = shape_[3];
    return data_[static_cast<std::size_t>(((static_cast<std::int64_t>(n) * C + c) * H + h) * W + w)];
}

double Tensor::at4(int n, int c, int h, int w) const {
    const int C = shape_[1], H = shape_[2], W = shape_[3];
    return data_[static_cast<std::size_t>(((static_cast<std::int64_t>(n) * C + c) * H + h) * W + w)];
}

bool Tensor::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

void Tensor::fill(double v) {
    for (double& x : data_) x = v;
}

Tensor add(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b))
        throw std::invalid_argument("add: shape mismatch " + a.shape_str() + " vs " + b.shape_str());
    Tensor out(a.shape());
    for (std::int64_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

Tensor scale(const Tensor& a, double s) {
    Tensor out(a.shape());
    for (std::int64_t i = 0; i < a.size(); ++i) out[i] = a[i] * s;
    return out;
}

static std::int64_t sample_stride(const Tensor& t) {
    std::int64_t s = 1;
    for (int i = 1; i < t.rank(); ++i) s *= t.dim(i);
    return s;
}

Tensor concat_batch(const Tensor& a, const Tensor& b) {
    if (a.rank() != b.rank())
        throw std::invalid_argument("concat_batch: rank mismatch " + a.shape_str() + " vs " + b.shape_str());
    for (int i = 1; i < a.rank(); ++i)
        if (a.dim(i) != b.dim(i))
            throw std::invalid_argument("concat_batch: trailing shape mismatch " + a.shape_str() + " vs " +
                                        b.shape_str());
    std::vector<int> shape = a.shape();
    shape[0] = a.dim(0) + b.dim(0);
    Tensor out(shape);
    std::memcpy(out.data(), a.data(), sizeof(double) * static_cast<std::size_t>(a.size()));
    std::memcpy(out.data() + a.size(), b.data(), sizeof(double) * static_cast<std::size_t>(b.size()));
    return out;
}

Tensor slice_batch(const Tensor& t, std::int64_t from, std::int64_t to) {
    if (from < 0 || to > t.dim(0) || from >= to)
        throw std::invalid_argument("slice_batch: invalid range [" + std::to_string(from) + ", " +
                                    std::to_string(to) + ") for batch of " + std::to_string(t.dim(0)));
    std::vector<int> shape = t.shape();
    shape[0] = static_cast<int>(to - from);
    Tensor out(shape);
    const std::int64_t stride = sample_stride(t);
    std::memcpy(out.data(), t.data() + from * stride,
                sizeof(double) * static_cast<std::size_t>((to - from) * stride));
    return out;
}

Tensor gather_batch(const Tensor& t, const std::vector<int>& indices) {
    if (indices.empty()) throw std::invalid_argument("gather_batch: empty index list");
    std::vector<int> shape = t.shape();
    shape[0] = static_cast<int>(indices.size());
    Tensor out(shape);
    const std::int64_t stride = sample_stride(t);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const int idx = indices[i];
        if (idx < 0 || idx >= t.dim(0))
            throw std::invalid_argument("gather_batch: index " + std::to_string(idx) + " out of range for batch of " +
                                        std::to_string(t.dim(0)));
        std::memcpy(out.data() + static_cast<std::int64_t>(i) * stride, t.data() + idx * stride,
                    sizeof(double) * static_cast<std::size_t>(stride));
    }
    return out;
}

}  // namespace gasca
