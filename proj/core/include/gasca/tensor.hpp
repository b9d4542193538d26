#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gasca {

std::int64_t shape_numel(const std::vector<int>& shape);
std::string shape_to_string(const std::vector<int>& shape);

/// Dense n-dimensional array of doubles, row-major. Image batches are NCHW.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<int> shape);  // zero-filled
    Tensor(std::vector<int> shape, std::vector<double> data);

    static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }
    static Tensor full(std::vector<int> shape, double value);

    const std::vector<int>& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    int dim(int axis) const;
    std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }
    bool empty() const { return data_.empty(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    double& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
    double operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

    // NCHW element access
    double& at4(int n, int c, int h, int w);
    double at4(int n, int c, int h, int w) const;

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    bool all_finite() const;
    std::string shape_str() const { return shape_to_string(shape_); }

    void fill(double v);

private:
    std::vector<int> shape_;
    std::vector<double> data_;
};

// Element-wise sum, shapes must match.
Tensor add(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);

// Batch (dim 0) utilities.
Tensor concat_batch(const Tensor& a, const Tensor& b);
Tensor slice_batch(const Tensor& t, std::int64_t from, std::int64_t to);
Tensor gather_batch(const Tensor& t, const std::vector<int>& indices);

}  // namespace gasca
