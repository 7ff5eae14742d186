#include "retinet/tensor.hpp"

#include <cmath>
#include <sstream>

namespace retinet {

size_t Tensor::checked_numel(const std::vector<int>& shape) {
    size_t n = 1;
    for (int d : shape) {
        if (d <= 0) throw ConfigError("tensor: shape entries must be positive");
        n *= static_cast<size_t>(d);
    }
    return n;
}

bool Tensor::all_finite() const {
    for (float v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < shape_.size(); ++i)
        os << (i ? "," : "") << shape_[i];
    os << "]";
    return os.str();
}

int conv_output_extent(int in, int kernel, int stride, int padding) {
    if (padding < 0) throw ConfigError("conv: padding must be non-negative");
    if (stride < 1) throw ConfigError("conv: stride must be >= 1");
    const int span = in + 2 * padding - kernel;
    if (span < 0 || span % stride != 0)
        throw ConfigError("conv: output size is not a positive integer");
    return span / stride + 1;
}

} // namespace retinet
