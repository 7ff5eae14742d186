#pragma once

#include <cstdint>
#include <vector>

#include "retinet/tensor.hpp"

namespace retinet {

struct TrainConfig {
    float learning_rate = 0.001f;
    int batch_size = 128;
    int epochs = 20;
    uint64_t seed = 42;
    float adam_beta1 = 0.9f;
    float adam_beta2 = 0.999f;
    float adam_epsilon = 1e-8f;

    void validate() const {
        if (learning_rate <= 0.0f) throw ConfigError("train: learning rate must be > 0");
        if (batch_size < 1) throw ConfigError("train: batch size must be >= 1");
        if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
    }
};

// First/second moment per parameter tensor, zero-initialized.
struct AdamState {
    std::vector<Tensor> m;
    std::vector<Tensor> v;

    bool initialized() const { return !m.empty(); }
    void init(const std::vector<Tensor*>& params) {
        m.clear();
        v.clear();
        for (const Tensor* p : params) {
            m.emplace_back(p->shape());
            v.emplace_back(p->shape());
        }
    }
};

// One ADAM update with bias correction, t >= 1:
//   m <- b1*m + (1-b1)*g,  v <- b2*v + (1-b2)*g^2
//   theta <- theta - lr * m_hat / (sqrt(v_hat) + eps)
void adam_step(const std::vector<Tensor*>& params,
               const std::vector<const Tensor*>& grads, AdamState& state,
               const TrainConfig& config, int64_t t);

} // namespace retinet
