#include "retinet/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "retinet/gemm.hpp"

namespace retinet {

namespace {

void check_conv_shapes(const Tensor& input, const Tensor& weight,
                       const Tensor& bias) {
    if (input.rank() != 4) throw ConfigError("conv2d: input must be 4-D, got " + input.shape_str());
    if (weight.rank() != 4) throw ConfigError("conv2d: weight must be 4-D, got " + weight.shape_str());
    if (weight.dim(2) != weight.dim(3)) throw ConfigError("conv2d: kernel must be square");
    if (input.dim(1) != weight.dim(1))
        throw ConfigError("conv2d: input channels " + input.shape_str() +
                          " do not match weight " + weight.shape_str());
    if (bias.rank() != 1 || bias.dim(0) != weight.dim(0))
        throw ConfigError("conv2d: bias must be [out_channels]");
}

// Gathers one sample into a [C*k*k, OH*OW] matrix, zero-filled padding.
void im2col(const float* src, int C, int H, int W, int k, int stride, int pad,
            int OH, int OW, float* col) {
    const int ohw = OH * OW;
    for (int c = 0; c < C; ++c) {
        const float* plane = src + static_cast<size_t>(c) * H * W;
        for (int a = 0; a < k; ++a) {
            for (int b = 0; b < k; ++b) {
                float* row = col + (static_cast<size_t>(c) * k * k + a * k + b) * ohw;
                for (int i = 0; i < OH; ++i) {
                    const int h = i * stride + a - pad;
                    if (h < 0 || h >= H) {
                        std::memset(row + static_cast<size_t>(i) * OW, 0, sizeof(float) * OW);
                        continue;
                    }
                    const float* src_row = plane + static_cast<size_t>(h) * W;
                    float* dst = row + static_cast<size_t>(i) * OW;
                    for (int j = 0; j < OW; ++j) {
                        const int w = j * stride + b - pad;
                        dst[j] = (w >= 0 && w < W) ? src_row[w] : 0.0f;
                    }
                }
            }
        }
    }
}

// Scatter-adds a [C*k*k, OH*OW] gradient matrix back onto one input sample.
void col2im(const float* col, int C, int H, int W, int k, int stride, int pad,
            int OH, int OW, float* dst) {
    const int ohw = OH * OW;
    for (int c = 0; c < C; ++c) {
        float* plane = dst + static_cast<size_t>(c) * H * W;
        for (int a = 0; a < k; ++a) {
            for (int b = 0; b < k; ++b) {
                const float* row = col + (static_cast<size_t>(c) * k * k + a * k + b) * ohw;
                for (int i = 0; i < OH; ++i) {
                    const int h = i * stride + a - pad;
                    if (h < 0 || h >= H) continue;
                    float* dst_row = plane + static_cast<size_t>(h) * W;
                    const float* src = row + static_cast<size_t>(i) * OW;
                    for (int j = 0; j < OW; ++j) {
                        const int w = j * stride + b - pad;
                        if (w >= 0 && w < W) dst_row[w] += src[j];
                    }
                }
            }
        }
    }
}

} // namespace

Tensor conv2d_forward(const Tensor& input, const Tensor& weight,
                      const Tensor& bias, int stride, int padding) {
    check_conv_shapes(input, weight, bias);
    const int N = input.dim(0), C = input.dim(1), H = input.dim(2), W = input.dim(3);
    const int F = weight.dim(0), k = weight.dim(2);
    const int OH = conv_output_extent(H, k, stride, padding);
    const int OW = conv_output_extent(W, k, stride, padding);
    const int ohw = OH * OW;
    const int ck = C * k * k;

    Tensor out({N, F, OH, OW});
    std::vector<float> col(static_cast<size_t>(ck) * ohw);
    for (int n = 0; n < N; ++n) {
        im2col(input.data() + static_cast<size_t>(n) * C * H * W, C, H, W, k,
               stride, padding, OH, OW, col.data());
        float* out_n = out.data() + static_cast<size_t>(n) * F * ohw;
        gemm_nn(F, ohw, ck, weight.data(), col.data(), out_n);
        for (int f = 0; f < F; ++f) {
            const float b = bias[f];
            float* row = out_n + static_cast<size_t>(f) * ohw;
            for (int i = 0; i < ohw; ++i) row[i] += b;
        }
    }
    return out;
}

Tensor conv2d_forward_naive(const Tensor& input, const Tensor& weight,
                            const Tensor& bias, int stride, int padding) {
    check_conv_shapes(input, weight, bias);
    const int N = input.dim(0), C = input.dim(1), H = input.dim(2), W = input.dim(3);
    const int F = weight.dim(0), k = weight.dim(2);
    const int OH = conv_output_extent(H, k, stride, padding);
    const int OW = conv_output_extent(W, k, stride, padding);

    Tensor out({N, F, OH, OW});
    for (int n = 0; n < N; ++n)
        for (int f = 0; f < F; ++f)
            for (int i = 0; i < OH; ++i)
                for (int j = 0; j < OW; ++j) {
                    float acc = bias[f];
                    for (int c = 0; c < C; ++c)
                        for (int a = 0; a < k; ++a)
                            for (int b = 0; b < k; ++b) {
                                const int h = i * stride + a - padding;
                                const int w = j * stride + b - padding;
                                if (h >= 0 && h < H && w >= 0 && w < W)
                                    acc += weight.at(f, c, a, b) * input.at(n, c, h, w);
                            }
                    out.at(n, f, i, j) = acc;
                }
    return out;
}

ConvGrads conv2d_backward(const Tensor& grad_out, const Tensor& input,
                          const Tensor& weight, int stride, int padding) {
    const int N = input.dim(0), C = input.dim(1), H = input.dim(2), W = input.dim(3);
    const int F = weight.dim(0), k = weight.dim(2);
    const int OH = conv_output_extent(H, k, stride, padding);
    const int OW = conv_output_extent(W, k, stride, padding);
    if (grad_out.shape() != std::vector<int>{N, F, OH, OW})
        throw ConfigError("conv2d_backward: grad_out shape " + grad_out.shape_str() +
                          " does not match forward output");
    const int ohw = OH * OW;
    const int ck = C * k * k;

    ConvGrads g{Tensor({N, C, H, W}), Tensor({F, C, k, k}), Tensor({F})};
    std::vector<float> col(static_cast<size_t>(ck) * ohw);
    std::vector<float> colgrad(static_cast<size_t>(ck) * ohw);
    for (int n = 0; n < N; ++n) {
        const float* go_n = grad_out.data() + static_cast<size_t>(n) * F * ohw;
        im2col(input.data() + static_cast<size_t>(n) * C * H * W, C, H, W, k,
               stride, padding, OH, OW, col.data());
        // grad_weight[F,ck] += go[F,ohw] * col[ck,ohw]^T
        gemm_nt(F, ck, ohw, go_n, col.data(), g.weight.data(), /*accumulate=*/true);
        // grad_bias[f] += sum of go row f
        for (int f = 0; f < F; ++f) {
            const float* row = go_n + static_cast<size_t>(f) * ohw;
            float acc = 0.0f;
            for (int i = 0; i < ohw; ++i) acc += row[i];
            g.bias[f] += acc;
        }
        // colgrad[ck,ohw] = weight[F,ck]^T * go[F,ohw], then scatter
        gemm_tn(ck, ohw, F, weight.data(), go_n, colgrad.data());
        col2im(colgrad.data(), C, H, W, k, stride, padding, OH, OW,
               g.input.data() + static_cast<size_t>(n) * C * H * W);
    }
    return g;
}

PoolResult maxpool2d_forward(const Tensor& input, int size, int stride) {
    if (input.rank() != 4) throw ConfigError("maxpool2d: input must be 4-D");
    const int N = input.dim(0), C = input.dim(1), H = input.dim(2), W = input.dim(3);
    const int OH = conv_output_extent(H, size, stride, 0);
    const int OW = conv_output_extent(W, size, stride, 0);

    PoolResult r{Tensor({N, C, OH, OW}), {}};
    r.argmax.resize(static_cast<size_t>(N) * C * OH * OW);
    size_t out_idx = 0;
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c) {
            const float* plane = input.data() + (static_cast<size_t>(n) * C + c) * H * W;
            for (int i = 0; i < OH; ++i)
                for (int j = 0; j < OW; ++j) {
                    float best = -std::numeric_limits<float>::infinity();
                    int32_t best_at = 0;
                    for (int a = 0; a < size; ++a)
                        for (int b = 0; b < size; ++b) {
                            const int h = i * stride + a, w = j * stride + b;
                            const float v = plane[static_cast<size_t>(h) * W + w];
                            if (v > best) {  // strict: ties keep the first
                                best = v;
                                best_at = static_cast<int32_t>(h * W + w);
                            }
                        }
                    r.output[out_idx] = best;
                    r.argmax[out_idx] = best_at;
                    ++out_idx;
                }
        }
    return r;
}

Tensor maxpool2d_backward(const Tensor& grad_out, const PoolResult& cached,
                          const std::vector<int>& input_shape) {
    if (grad_out.numel() != cached.argmax.size())
        throw ConfigError("maxpool2d_backward: grad_out does not match cached forward");
    Tensor grad_in(input_shape);
    const int C = input_shape[1], H = input_shape[2], W = input_shape[3];
    const int N = input_shape[0];
    const size_t per_out_plane = grad_out.numel() / (static_cast<size_t>(N) * C);
    size_t idx = 0;
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c) {
            float* plane = grad_in.data() + (static_cast<size_t>(n) * C + c) * H * W;
            for (size_t i = 0; i < per_out_plane; ++i, ++idx)
                plane[cached.argmax[idx]] += grad_out[idx];
        }
    return grad_in;
}

Tensor dense_forward(const Tensor& input, const Tensor& weight,
                     const Tensor& bias) {
    if (input.rank() != 2 || weight.rank() != 2)
        throw ConfigError("dense: input and weight must be 2-D");
    if (input.dim(1) != weight.dim(1))
        throw ConfigError("dense: input features " + input.shape_str() +
                          " do not match weight " + weight.shape_str());
    if (bias.rank() != 1 || bias.dim(0) != weight.dim(0))
        throw ConfigError("dense: bias must be [out_features]");
    const int N = input.dim(0), I = input.dim(1), O = weight.dim(0);
    Tensor out({N, O});
    gemm_nt(N, O, I, input.data(), weight.data(), out.data());
    for (int n = 0; n < N; ++n)
        for (int o = 0; o < O; ++o) out.at(n, o) += bias[o];
    return out;
}

DenseGrads dense_backward(const Tensor& grad_out, const Tensor& input,
                          const Tensor& weight) {
    const int N = input.dim(0), I = input.dim(1), O = weight.dim(0);
    if (grad_out.shape() != std::vector<int>{N, O})
        throw ConfigError("dense_backward: grad_out shape mismatch");
    DenseGrads g{Tensor({N, I}), Tensor({O, I}), Tensor({O})};
    gemm_tn(O, I, N, grad_out.data(), input.data(), g.weight.data());
    gemm_nn(N, I, O, grad_out.data(), weight.data(), g.input.data());
    for (int n = 0; n < N; ++n)
        for (int o = 0; o < O; ++o) g.bias[o] += grad_out.at(n, o);
    return g;
}

Tensor tanh_forward(const Tensor& input) {
    Tensor out = input;
    for (auto& v : out.vec()) v = std::tanh(v);
    return out;
}

Tensor tanh_backward(const Tensor& grad_out, const Tensor& output) {
    if (!grad_out.same_shape(output))
        throw ConfigError("tanh_backward: shape mismatch");
    Tensor g = grad_out;
    for (size_t i = 0; i < g.numel(); ++i) g[i] *= 1.0f - output[i] * output[i];
    return g;
}

Tensor relu_forward(const Tensor& input) {
    Tensor out = input;
    for (auto& v : out.vec()) v = v > 0.0f ? v : 0.0f;
    return out;
}

Tensor relu_backward(const Tensor& grad_out, const Tensor& input) {
    if (!grad_out.same_shape(input))
        throw ConfigError("relu_backward: shape mismatch");
    Tensor g = grad_out;
    for (size_t i = 0; i < g.numel(); ++i)
        if (input[i] <= 0.0f) g[i] = 0.0f;
    return g;
}

DropoutResult dropout_forward(const Tensor& input, float p, bool training,
                              Rng& rng) {
    if (p < 0.0f || p >= 1.0f) throw ConfigError("dropout: p must be in [0,1)");
    DropoutResult r{input, Tensor(input.shape(), 1.0f)};
    if (!training || p == 0.0f) return r;
    const float keep_scale = 1.0f / (1.0f - p);
    for (size_t i = 0; i < input.numel(); ++i) {
        if (rng.bernoulli(p)) {
            r.mask[i] = 0.0f;
            r.output[i] = 0.0f;
        } else {
            r.mask[i] = keep_scale;
            r.output[i] = input[i] * keep_scale;
        }
    }
    return r;
}

Tensor dropout_backward(const Tensor& grad_out, const Tensor& mask) {
    if (!grad_out.same_shape(mask))
        throw ConfigError("dropout_backward: shape mismatch");
    Tensor g = grad_out;
    for (size_t i = 0; i < g.numel(); ++i) g[i] *= mask[i];
    return g;
}

Tensor dropout(const Tensor& input, float p, bool training, Rng& rng) {
    return dropout_forward(input, p, training, rng).output;
}

XentResult softmax_cross_entropy(const Tensor& logits,
                                 const std::vector<int>& labels) {
    if (logits.rank() != 2)
        throw ConfigError("softmax_cross_entropy: logits must be [N,C]");
    const int N = logits.dim(0), C = logits.dim(1);
    if (static_cast<int>(labels.size()) != N)
        throw ConfigError("softmax_cross_entropy: label count mismatch");

    XentResult r{0.0f, Tensor({N, C})};
    double loss_acc = 0.0;
    const float inv_n = 1.0f / static_cast<float>(N);
    for (int n = 0; n < N; ++n) {
        const int y = labels[n];
        if (y < 0 || y >= C)
            throw ConfigError("softmax_cross_entropy: label out of range");
        const float* row = logits.data() + static_cast<size_t>(n) * C;
        float m = row[0];
        for (int c = 1; c < C; ++c) m = std::max(m, row[c]);
        double sum = 0.0;
        for (int c = 0; c < C; ++c) sum += std::exp(static_cast<double>(row[c] - m));
        const double log_sum = std::log(sum);
        loss_acc += log_sum - static_cast<double>(row[y] - m);
        float* grad_row = r.grad_logits.data() + static_cast<size_t>(n) * C;
        for (int c = 0; c < C; ++c) {
            const float p = static_cast<float>(std::exp(static_cast<double>(row[c] - m)) / sum);
            grad_row[c] = (p - (c == y ? 1.0f : 0.0f)) * inv_n;
        }
    }
    r.loss = static_cast<float>(loss_acc / N);
    return r;
}

} // namespace retinet
