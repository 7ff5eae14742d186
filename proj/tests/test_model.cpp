#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "retinet/model.hpp"

using namespace retinet;

namespace {

ModelSpec make_spec(ModelKind kind, int channels = 1, int input = 28,
                    int k = 7, float p = 0.2f) {
    ModelSpec spec;
    spec.name = kind;
    spec.in_channels = channels;
    spec.input_size = input;
    spec.kernel_size = k;
    spec.dropout_p = p;
    return spec;
}

Tensor random_batch(const ModelSpec& spec, int n, uint64_t seed) {
    Rng rng(seed);
    return Tensor::uniform({n, spec.in_channels, spec.input_size, spec.input_size},
                           0.0f, 1.0f, rng);
}

} // namespace

TEST_SUITE("precortical-net") {

TEST_CASE("retilenet layer list: three conv+dropout+tanh blocks then backbone") {
    const auto specs = model_layer_specs(make_spec(ModelKind::RetiLeNet));
    REQUIRE(specs.size() == 9 + 12);
    for (int i = 0; i < 3; ++i) {
        CHECK(specs[3 * i + 0].kind == LayerKind::Conv2d);
        CHECK(specs[3 * i + 0].in_channels == 1);
        CHECK(specs[3 * i + 0].out_channels == 1);
        CHECK(specs[3 * i + 0].kernel_size == 7);
        CHECK(specs[3 * i + 0].padding == 3);
        CHECK(specs[3 * i + 1].kind == LayerKind::Dropout);
        CHECK(specs[3 * i + 2].kind == LayerKind::Tanh);
    }
    CHECK(specs[9].tag == "backbone.conv1");
}

TEST_CASE("lenet5 layer list is the backbone alone") {
    const auto specs = model_layer_specs(make_spec(ModelKind::LeNet5));
    CHECK(specs.size() == 12);
    CHECK(specs.front().tag == "backbone.conv1");
    CHECK(specs.front().padding == 2);  // 28x28 inputs behave as 32x32
}

TEST_CASE("retilenet n=1 k=7: first conv shape and precortical output size") {
    Rng rng(42);
    Model model = build_model(make_spec(ModelKind::RetiLeNet), rng);
    const auto params = model.params();
    REQUIRE(params.front()->tag == "precortical.conv1.weight");
    CHECK(params.front()->value.shape() == std::vector<int>{1, 1, 7, 7});

    Tensor tap;
    const Tensor batch = random_batch(model.spec(), 2, 1);
    model.forward(batch, false, nullptr, "precortical.tanh3", &tap);
    CHECK(tap.shape() == std::vector<int>{2, 1, 28, 28});

    // tapping the first conv returns the N x n x H x W activation
    model.forward(batch, false, nullptr, "precortical.conv1", &tap);
    CHECK(tap.shape() == std::vector<int>{2, 1, 28, 28});
}

TEST_CASE("lenet5 forward yields 10 logits per sample") {
    Rng rng(42);
    Model model = build_model(make_spec(ModelKind::LeNet5), rng);
    const Tensor logits = model.forward(random_batch(model.spec(), 3, 2), false);
    CHECK(logits.shape() == std::vector<int>{3, 10});
    CHECK(logits.all_finite());
}

TEST_CASE("retilenet n=3 (32x32 inputs): channel-preserving precortical convs") {
    Rng rng(42);
    Model model = build_model(make_spec(ModelKind::RetiLeNet, 3, 32), rng);
    const auto params = model.params();
    CHECK(params.front()->value.shape() == std::vector<int>{3, 3, 7, 7});
    const Tensor logits = model.forward(random_batch(model.spec(), 2, 3), false);
    CHECK(logits.shape() == std::vector<int>{2, 10});
}

TEST_CASE("precortical block preserves spatial dims for every supported k") {
    for (int k : {3, 5, 7, 9}) {
        Rng rng(k);
        Model model = build_model(make_spec(ModelKind::RetiLeNet, 1, 28, k), rng);
        Tensor tap;
        model.forward(random_batch(model.spec(), 1, 4), false, nullptr,
                      "precortical.tanh3", &tap);
        CHECK(tap.shape() == std::vector<int>{1, 1, 28, 28});
    }
}

TEST_CASE("parameter count delta is exactly 3(n^2 k^2 + n)") {
    for (int n : {1, 3})
        for (int k : {3, 7}) {
            const int input = n == 1 ? 28 : 32;
            Rng rng(7);
            Model reti = build_model(make_spec(ModelKind::RetiLeNet, n, input, k), rng);
            Model lenet = build_model(make_spec(ModelKind::LeNet5, n, input, k), rng);
            const size_t delta = reti.param_count() - lenet.param_count();
            CHECK(delta == static_cast<size_t>(3 * (n * n * k * k + n)));
        }
}

TEST_CASE("eval forward is deterministic; train-mode dropout is not") {
    Rng rng(42);
    Model model = build_model(make_spec(ModelKind::RetiLeNet), rng);
    const Tensor batch = random_batch(model.spec(), 2, 5);

    const Tensor a = model.forward(batch, false);
    const Tensor b = model.forward(batch, false);
    CHECK(a.vec() == b.vec());

    Rng r1(100), r2(200);
    const Tensor t1 = model.forward(batch, true, &r1);
    const Tensor t2 = model.forward(batch, true, &r2);
    CHECK(t1.vec() != t2.vec());
}

TEST_CASE("model validation errors") {
    Rng rng(1);
    CHECK_THROWS_AS(build_model(make_spec(ModelKind::RetiLeNet, 1, 28, 4), rng),
                    ConfigError);  // even kernel
    CHECK_THROWS_AS(build_model(make_spec(ModelKind::LeNet5, 1, 30), rng),
                    ConfigError);  // unsupported input size
    Model model = build_model(make_spec(ModelKind::LeNet5), rng);
    CHECK_THROWS_AS(model.forward(Tensor({1, 1, 32, 32}), false), ConfigError);
    CHECK_THROWS_AS(model.forward(Tensor({1, 1, 28, 28}), false, nullptr,
                                  "precortical.conv1", nullptr),
                    ConfigError);  // tag not found on lenet5
}

TEST_CASE("model forward/backward equals the manual op composition bitwise") {
    // The layer stack is plain function composition; running the same
    // functional primitives by hand must reproduce logits and every
    // parameter gradient exactly. Catches ordering, caching and gradient
    // routing mistakes without finite-difference noise.
    Rng rng(11);
    Model model = build_model(make_spec(ModelKind::LeNet5), rng);
    const Tensor batch = random_batch(model.spec(), 3, 12);
    const std::vector<int> labels = {3, 7, 0};

    auto param = [&](const char* tag) -> Param* {
        for (Param* p : model.params())
            if (p->tag == tag) return p;
        REQUIRE(false);
        return nullptr;
    };
    Param* c1w = param("backbone.conv1.weight");
    Param* c1b = param("backbone.conv1.bias");
    Param* c2w = param("backbone.conv2.weight");
    Param* c2b = param("backbone.conv2.bias");
    Param* f1w = param("backbone.fc1.weight");
    Param* f1b = param("backbone.fc1.bias");
    Param* f2w = param("backbone.fc2.weight");
    Param* f2b = param("backbone.fc2.bias");
    Param* f3w = param("backbone.fc3.weight");
    Param* f3b = param("backbone.fc3.bias");

    // manual forward
    const Tensor a1 = conv2d_forward(batch, c1w->value, c1b->value, 1, 2);
    const Tensor r1 = relu_forward(a1);
    const PoolResult p1 = maxpool2d_forward(r1, 2, 2);
    const Tensor a2 = conv2d_forward(p1.output, c2w->value, c2b->value, 1, 0);
    const Tensor r2 = relu_forward(a2);
    const PoolResult p2 = maxpool2d_forward(r2, 2, 2);
    const Tensor flat({3, 400}, p2.output.vec());
    const Tensor h1 = relu_forward(dense_forward(flat, f1w->value, f1b->value));
    const Tensor h2 = relu_forward(dense_forward(h1, f2w->value, f2b->value));
    const Tensor manual_logits = dense_forward(h2, f3w->value, f3b->value);

    const Tensor logits = model.forward(batch, false);
    CHECK(logits.vec() == manual_logits.vec());

    // manual backward, same loss gradient
    const XentResult xent = softmax_cross_entropy(logits, labels);
    model.zero_grad();
    model.backward(xent.grad_logits);

    DenseGrads g3 = dense_backward(xent.grad_logits, h2, f3w->value);
    Tensor g = relu_backward(g3.input, dense_forward(h1, f2w->value, f2b->value));
    DenseGrads g2 = dense_backward(g, h1, f2w->value);
    g = relu_backward(g2.input, dense_forward(flat, f1w->value, f1b->value));
    DenseGrads g1 = dense_backward(g, flat, f1w->value);
    g = Tensor(p2.output.shape(), g1.input.vec());
    g = maxpool2d_backward(g, p2, r2.shape());
    g = relu_backward(g, a2);
    ConvGrads gc2 = conv2d_backward(g, p1.output, c2w->value, 1, 0);
    g = maxpool2d_backward(gc2.input, p1, r1.shape());
    g = relu_backward(g, a1);
    ConvGrads gc1 = conv2d_backward(g, batch, c1w->value, 1, 2);

    CHECK(c1w->grad.vec() == gc1.weight.vec());
    CHECK(c1b->grad.vec() == gc1.bias.vec());
    CHECK(c2w->grad.vec() == gc2.weight.vec());
    CHECK(c2b->grad.vec() == gc2.bias.vec());
    CHECK(f1w->grad.vec() == g1.weight.vec());
    CHECK(f1b->grad.vec() == g1.bias.vec());
    CHECK(f2w->grad.vec() == g2.weight.vec());
    CHECK(f2b->grad.vec() == g2.bias.vec());
    CHECK(f3w->grad.vec() == g3.weight.vec());
    CHECK(f3b->grad.vec() == g3.bias.vec());
}

// ------------------------------------------------------------- layer stats

TEST_CASE("compute_stats: quartiles, whiskers and moments on 1..8") {
    const LayerStats s = compute_stats("x", {5, 1, 8, 2, 7, 3, 6, 4});
    CHECK(s.q1 == doctest::Approx(2.75f));
    CHECK(s.median == doctest::Approx(4.5f));
    CHECK(s.q3 == doctest::Approx(6.25f));
    CHECK(s.whisker_low == 1.0f);   // clamped to the observed min
    CHECK(s.whisker_high == 8.0f);  // clamped to the observed max
    CHECK(s.mean == doctest::Approx(4.5f));
    CHECK(s.stddev == doctest::Approx(std::sqrt(5.25f)));
    CHECK(s.sample_count == 8);
    CHECK(s.q1 <= s.median);
    CHECK(s.median <= s.q3);
}

TEST_CASE("capture_layer_stats: constant-zero batch has all-zero quartiles") {
    Rng rng(42);
    Model model = build_model(make_spec(ModelKind::RetiLeNet), rng);
    const Tensor zeros({4, 1, 28, 28});
    const auto [before, after] =
        capture_layer_stats(model, zeros, kFirstPrecorticalConv);
    CHECK(before.q1 == 0.0f);
    CHECK(before.median == 0.0f);
    CHECK(before.q3 == 0.0f);
    CHECK(after.sample_count == before.sample_count);
}

TEST_CASE("capture_layer_stats: input shift moves every before-quartile by -mu") {
    Rng rng(42);
    Model model = build_model(make_spec(ModelKind::RetiLeNet), rng);
    const Tensor batch = random_batch(model.spec(), 3, 21);
    Tensor shifted = batch;
    const float mu = 0.75f;
    for (auto& v : shifted.vec()) v -= mu;

    const auto [b1, a1] = capture_layer_stats(model, batch, kFirstPrecorticalConv);
    const auto [b2, a2] = capture_layer_stats(model, shifted, kFirstPrecorticalConv);
    CHECK(b2.q1 == doctest::Approx(b1.q1 - mu).epsilon(1e-5));
    CHECK(b2.median == doctest::Approx(b1.median - mu).epsilon(1e-5));
    CHECK(b2.q3 == doctest::Approx(b1.q3 - mu).epsilon(1e-5));
}

} // TEST_SUITE
