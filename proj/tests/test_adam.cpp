#include <doctest.h>

#include <cmath>

#include "retinet/adam.hpp"

using namespace retinet;

TEST_SUITE("tensor-engine") {

TEST_CASE("adam: zero gradients leave parameters unchanged") {
    Tensor theta({4}, std::vector<float>{1, -2, 3, -4});
    const Tensor before = theta;
    Tensor grad({4});
    AdamState state;
    TrainConfig config;
    adam_step({&theta}, {&grad}, state, config, 1);
    CHECK(theta.vec() == before.vec());
}

TEST_CASE("adam: first step with unit gradient moves by ~lr") {
    // hand computation: m_hat = v_hat = 1, delta = lr / (1 + eps) = 0.00099999999
    Tensor theta({1}, std::vector<float>{0.0f});
    Tensor grad({1}, std::vector<float>{1.0f});
    AdamState state;
    TrainConfig config;
    adam_step({&theta}, {&grad}, state, config, 1);
    CHECK(theta[0] == doctest::Approx(-0.000999999990).epsilon(1e-6));
}

TEST_CASE("adam: bias correction tracks a constant gradient") {
    // With g constant, m_hat = g and v_hat = g^2 at every t, so each step
    // moves by lr * g / (|g| + eps) = lr * sign(g).
    Tensor theta({1}, std::vector<float>{0.5f});
    Tensor grad({1}, std::vector<float>{-0.25f});
    AdamState state;
    TrainConfig config;
    for (int t = 1; t <= 10; ++t) adam_step({&theta}, {&grad}, state, config, t);
    CHECK(theta[0] == doctest::Approx(0.5f + 10 * config.learning_rate).epsilon(1e-4));
}

TEST_CASE("adam: identical streams give bitwise-identical trajectories") {
    Tensor a({8}, 0.3f), b({8}, 0.3f);
    AdamState sa, sb;
    TrainConfig config;
    Rng rng(17);
    for (int t = 1; t <= 25; ++t) {
        Tensor g({8});
        for (auto& v : g.vec()) v = rng.uniform(-1.0f, 1.0f);
        adam_step({&a}, {&g}, sa, config, t);
        adam_step({&b}, {&g}, sb, config, t);
    }
    CHECK(a.vec() == b.vec());
}

TEST_CASE("adam: validates t and shape agreement") {
    Tensor theta({2});
    Tensor grad({2});
    Tensor bad_grad({3});
    AdamState state;
    TrainConfig config;
    CHECK_THROWS_AS(adam_step({&theta}, {&grad}, state, config, 0), ConfigError);
    CHECK_THROWS_AS(adam_step({&theta}, {&bad_grad}, state, config, 1), ConfigError);
}

TEST_CASE("train config defaults match the fixed hyperparameters") {
    const TrainConfig config;
    CHECK(config.learning_rate == 0.001f);
    CHECK(config.batch_size == 128);
    CHECK(config.adam_beta1 == 0.9f);
    CHECK(config.adam_beta2 == 0.999f);
    CHECK(config.adam_epsilon == 1e-8f);
    CHECK_THROWS_AS(TrainConfig{.batch_size = 0}.validate(), ConfigError);
}

} // TEST_SUITE
