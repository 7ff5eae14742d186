#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "retinet/common.hpp"
#include "retinet/rng.hpp"

namespace retinet {

// Dense n-dimensional float32 array, row-major. The lingua franca of the
// engine; invariant: product(shape) == data.size() and shape entries > 0.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<int> shape, float fill = 0.0f)
        : shape_(std::move(shape)), data_(checked_numel(shape_), fill) {}

    Tensor(std::vector<int> shape, std::vector<float> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (checked_numel(shape_) != data_.size())
            throw ConfigError("tensor: data length does not match shape");
    }

    static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }
    static Tensor full(std::vector<int> shape, float v) { return Tensor(std::move(shape), v); }
    static Tensor uniform(std::vector<int> shape, float lo, float hi, Rng& rng) {
        Tensor t(std::move(shape));
        for (auto& v : t.data_) v = rng.uniform(lo, hi);
        return t;
    }

    const std::vector<int>& shape() const { return shape_; }
    int dim(size_t i) const { return shape_[i]; }
    size_t rank() const { return shape_.size(); }
    size_t numel() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }
    std::vector<float>& vec() { return data_; }
    const std::vector<float>& vec() const { return data_; }

    float& operator[](size_t i) { return data_[i]; }
    float operator[](size_t i) const { return data_[i]; }

    // 4-D accessors; the NCHW layout everything image-shaped uses.
    float& at(int n, int c, int h, int w) {
        return data_[offset4(n, c, h, w)];
    }
    float at(int n, int c, int h, int w) const {
        return data_[offset4(n, c, h, w)];
    }
    float& at(int i, int j) { return data_[static_cast<size_t>(i) * shape_[1] + j]; }
    float at(int i, int j) const { return data_[static_cast<size_t>(i) * shape_[1] + j]; }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
    bool all_finite() const;
    void fill(float v) { for (auto& x : data_) x = v; }

    std::string shape_str() const;

private:
    size_t offset4(int n, int c, int h, int w) const {
        return ((static_cast<size_t>(n) * shape_[1] + c) * shape_[2] + h) * shape_[3] + w;
    }
    static size_t checked_numel(const std::vector<int>& shape);

    std::vector<int> shape_;
    std::vector<float> data_;
};

// Shape helper shared by conv/pool: (in + 2*pad - k) / stride + 1, which must
// divide evenly and be positive.
int conv_output_extent(int in, int kernel, int stride, int padding);

} // namespace retinet
