#pragma once

#include <cstdint>
#include <vector>

#include "retinet/rng.hpp"
#include "retinet/tensor.hpp"

namespace retinet {

// ---------------------------------------------------------------- conv2d

struct ConvGrads {
    Tensor input;   // [N,C,H,W]
    Tensor weight;  // [F,C,k,k]
    Tensor bias;    // [F]
};

// out[n,f,i,j] = bias[f] + sum_{c,a,b} weight[f,c,a,b] *
//               padded_input[n,c, i*stride+a, j*stride+b]   (zero padding)
// im2col + GEMM path; exact same contract as conv2d_forward_naive.
Tensor conv2d_forward(const Tensor& input, const Tensor& weight,
                      const Tensor& bias, int stride, int padding);

// Direct 7-loop transcription of the contract. Kept as the slow reference
// path; the fast path is tested against it element-wise.
Tensor conv2d_forward_naive(const Tensor& input, const Tensor& weight,
                            const Tensor& bias, int stride, int padding);

ConvGrads conv2d_backward(const Tensor& grad_out, const Tensor& input,
                          const Tensor& weight, int stride, int padding);

// ---------------------------------------------------------------- maxpool

struct PoolResult {
    Tensor output;
    // Flat h*W+w input-plane index of the window maximum, one per output
    // element. Ties go to the first maximal element in row-major scan order.
    std::vector<int32_t> argmax;
};

PoolResult maxpool2d_forward(const Tensor& input, int size, int stride);

Tensor maxpool2d_backward(const Tensor& grad_out, const PoolResult& cached,
                          const std::vector<int>& input_shape);

// ---------------------------------------------------------------- dense

struct DenseGrads {
    Tensor input;   // [N,I]
    Tensor weight;  // [O,I]
    Tensor bias;    // [O]
};

// out[n,o] = bias[o] + sum_i input[n,i] * weight[o,i]
Tensor dense_forward(const Tensor& input, const Tensor& weight,
                     const Tensor& bias);

DenseGrads dense_backward(const Tensor& grad_out, const Tensor& input,
                          const Tensor& weight);

// ---------------------------------------------------------------- pointwise

Tensor tanh_forward(const Tensor& input);
// takes the forward output: d tanh = 1 - y^2
Tensor tanh_backward(const Tensor& grad_out, const Tensor& output);

Tensor relu_forward(const Tensor& input);
Tensor relu_backward(const Tensor& grad_out, const Tensor& input);

// ---------------------------------------------------------------- dropout

struct DropoutResult {
    Tensor output;
    Tensor mask;  // per element: 0 (dropped) or 1/(1-p) (kept)
};

// Inverted dropout: train mode zeroes each element with probability p and
// scales survivors by 1/(1-p); eval mode is the identity. p in [0,1).
DropoutResult dropout_forward(const Tensor& input, float p, bool training,
                              Rng& rng);
Tensor dropout_backward(const Tensor& grad_out, const Tensor& mask);
Tensor dropout(const Tensor& input, float p, bool training, Rng& rng);

// ---------------------------------------------------------------- loss

struct XentResult {
    float loss;          // mean over the batch
    Tensor grad_logits;  // d loss / d logits, [N,C]
};

// Softmax cross-entropy with log-sum-exp stabilization (row max subtracted).
// labels are class indices in [0, C).
XentResult softmax_cross_entropy(const Tensor& logits,
                                 const std::vector<int>& labels);

} // namespace retinet
