#include "retinet/adam.hpp"

#include <cmath>

namespace retinet {

void adam_step(const std::vector<Tensor*>& params,
               const std::vector<const Tensor*>& grads, AdamState& state,
               const TrainConfig& config, int64_t t) {
    if (t < 1) throw ConfigError("adam_step: t must be >= 1");
    if (params.size() != grads.size())
        throw ConfigError("adam_step: params/grads count mismatch");
    if (!state.initialized()) state.init(params);
    if (state.m.size() != params.size())
        throw ConfigError("adam_step: state does not match parameter list");

    const float b1 = config.adam_beta1, b2 = config.adam_beta2;
    const float inv_bc1 = 1.0f / (1.0f - static_cast<float>(std::pow(b1, static_cast<double>(t))));
    const float inv_bc2 = 1.0f / (1.0f - static_cast<float>(std::pow(b2, static_cast<double>(t))));

    for (size_t p = 0; p < params.size(); ++p) {
        Tensor& theta = *params[p];
        const Tensor& g = *grads[p];
        Tensor& m = state.m[p];
        Tensor& v = state.v[p];
        if (!theta.same_shape(g))
            throw ConfigError("adam_step: grad shape does not match parameter");
        for (size_t i = 0; i < theta.numel(); ++i) {
            m[i] = b1 * m[i] + (1.0f - b1) * g[i];
            v[i] = b2 * v[i] + (1.0f - b2) * g[i] * g[i];
            const float m_hat = m[i] * inv_bc1;
            const float v_hat = v[i] * inv_bc2;
            theta[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_epsilon);
        }
    }
}

} // namespace retinet
