#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "retinet/perturb.hpp"

using namespace retinet;

namespace {

Tensor random_images(int n, uint64_t seed) {
    Rng rng(seed);
    return Tensor::uniform({n, 1, 28, 28}, 0.0f, 1.0f, rng);
}

double mean_of(const Tensor& t, int image) {
    const size_t per = t.numel() / t.dim(0);
    double acc = 0.0;
    for (size_t i = 0; i < per; ++i)
        acc += t[static_cast<size_t>(image) * per + i];
    return acc / static_cast<double>(per);
}

Dataset balanced_synthetic(int n, uint64_t seed) {
    Rng rng(seed);
    Dataset ds;
    ds.images = Tensor::uniform({n, 1, 28, 28}, 0.0f, 1.0f, rng);
    ds.labels.resize(n);
    for (int i = 0; i < n; ++i) ds.labels[i] = i % 10;
    ds.name = "synthetic";
    return ds;
}

} // namespace

TEST_SUITE("robustness-harness") {

TEST_CASE("apply_offset: mu = 0 is the bitwise identity") {
    const Tensor images = random_images(3, 1);
    const Tensor out = apply_offset(images, 0.0f);
    CHECK(out.vec() == images.vec());
}

TEST_CASE("apply_offset: subtracts mu, no clamping") {
    Tensor images({1, 1, 1, 2}, std::vector<float>{0.5f, 0.1f});
    const Tensor out = apply_offset(images, 0.2f);
    CHECK(out[0] == doctest::Approx(0.3f));
    CHECK(out[1] == doctest::Approx(-0.1f));  // allowed to leave [0,1]

    const Tensor dark = apply_offset(random_images(2, 2), 2.0f);
    float lo = 1e9f;
    for (size_t i = 0; i < dark.numel(); ++i) lo = std::min(lo, dark[i]);
    CHECK(lo < -0.9f);
}

TEST_CASE("apply_offset: shifts the mean by exactly -mu") {
    const Tensor images = random_images(4, 3);
    const Tensor out = apply_offset(images, 0.7f);
    for (int i = 0; i < 4; ++i)
        CHECK(mean_of(out, i) == doctest::Approx(mean_of(images, i) - 0.7).epsilon(1e-5));
}

TEST_CASE("apply_contrast: sigma = 1 is the identity") {
    const Tensor images = random_images(3, 4);
    CHECK(apply_contrast(images, 1.0f).vec() == images.vec());
}

TEST_CASE("apply_contrast: preserves the per-image mean") {
    const Tensor images = random_images(4, 5);
    const Tensor out = apply_contrast(images, 3.9f);
    for (int i = 0; i < 4; ++i)
        CHECK(mean_of(out, i) == doctest::Approx(mean_of(images, i)).epsilon(1e-5));
}

TEST_CASE("apply_contrast: two-pixel hand computation") {
    Tensor images({1, 1, 1, 2}, std::vector<float>{0.0f, 1.0f});
    const Tensor out = apply_contrast(images, 2.0f);
    CHECK(out[0] == doctest::Approx(0.25f));
    CHECK(out[1] == doctest::Approx(0.75f));
}

TEST_CASE("apply_contrast: sigma <= 0 is an error") {
    const Tensor images = random_images(1, 6);
    CHECK_THROWS_AS(apply_contrast(images, 0.0f), ConfigError);
    CHECK_THROWS_AS(apply_contrast(images, -1.0f), ConfigError);
    const PerturbationSpec bad{0.0f, -2.0f};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("offset composes additively, contrast multiplicatively") {
    const Tensor images = random_images(3, 7);

    const Tensor two_offsets = apply_offset(apply_offset(images, 0.4f), 0.9f);
    const Tensor one_offset = apply_offset(images, 1.3f);
    for (size_t i = 0; i < images.numel(); ++i)
        CHECK(std::fabs(two_offsets[i] - one_offset[i]) < 1e-6f);

    const Tensor two_scales = apply_contrast(apply_contrast(images, 2.0f), 1.5f);
    const Tensor one_scale = apply_contrast(images, 3.0f);
    for (size_t i = 0; i < images.numel(); ++i)
        CHECK(std::fabs(two_scales[i] - one_scale[i]) < 1e-5f);
}

TEST_CASE("evaluate: a model that fits a one-sample set scores 1.0") {
    Rng rng(8);
    ModelSpec spec;
    Model model = build_model(spec, rng);

    Dataset ds = balanced_synthetic(1, 9);
    const Tensor logits = model.forward(ds.images, false);
    int argmax = 0;
    for (int c = 1; c < 10; ++c)
        if (logits[c] > logits[argmax]) argmax = c;
    ds.labels[0] = argmax;

    CHECK(evaluate(model, ds, PerturbationSpec{}) == 1.0f);
}

TEST_CASE("evaluate: untrained model scores chance level on balanced labels") {
    Rng rng(10);
    ModelSpec spec;
    Model model = build_model(spec, rng);
    const Dataset ds = balanced_synthetic(2000, 11);
    const float acc = evaluate(model, ds, PerturbationSpec{});
    CHECK(acc > 0.07f);
    CHECK(acc < 0.13f);
}

TEST_CASE("evaluate: identity perturbation equals unperturbed evaluation bitwise") {
    Rng rng(12);
    ModelSpec spec;
    Model model = build_model(spec, rng);
    const Dataset ds = balanced_synthetic(64, 13);
    const float a = evaluate(model, ds, PerturbationSpec{0.0f, 1.0f});
    const float b = evaluate(model, ds, PerturbationSpec{0.0f, 1.0f});
    CHECK(a == b);
    // and evaluation is deterministic across repeated calls
    const float c = evaluate(model, ds, PerturbationSpec{0.5f, 2.0f});
    CHECK(c == evaluate(model, ds, PerturbationSpec{0.5f, 2.0f}));
}

TEST_CASE("evaluate: channel mismatch is a configuration error") {
    Rng rng(14);
    ModelSpec spec;
    spec.in_channels = 3;
    spec.input_size = 32;
    Model model = build_model(spec, rng);
    const Dataset ds = balanced_synthetic(4, 15);
    CHECK_THROWS_AS(evaluate(model, ds, PerturbationSpec{}), ConfigError);
}

// ------------------------------------------------------------------ sweeps

TEST_CASE("sweep grids: expansion and defaults") {
    const auto grid = sweep_grid(-2.0f, 2.0f, 0.2f);
    REQUIRE(grid.size() == 21);
    CHECK(grid.front() == doctest::Approx(-2.0f));
    CHECK(grid.back() == doctest::Approx(2.0f));

    const auto mu = default_grid(SweepAxis::Mu);
    CHECK(mu.size() == 21);
    const auto sigma = default_grid(SweepAxis::Sigma);
    REQUIRE(sigma.size() == 20);
    CHECK(sigma.front() == doctest::Approx(0.1f));
    CHECK(sigma.back() == doctest::Approx(3.9f));
}

TEST_CASE("run_sweep: single-point mu grid reproduces the clean accuracy") {
    Rng rng(16);
    ModelSpec spec;
    Model model = build_model(spec, rng);
    const Dataset ds = balanced_synthetic(128, 17);

    const float clean = evaluate(model, ds, PerturbationSpec{});
    const SweepResult r = run_sweep(model, ds, SweepAxis::Mu, {0.0f});
    REQUIRE(r.points.size() == 1);
    CHECK(r.points[0].accuracy == clean);
    CHECK(r.points[0].sample_count == 128);
}

TEST_CASE("run_sweep: grid must be strictly increasing") {
    Rng rng(18);
    ModelSpec spec;
    Model model = build_model(spec, rng);
    const Dataset ds = balanced_synthetic(8, 19);
    CHECK_THROWS_AS(run_sweep(model, ds, SweepAxis::Mu, {0.2f, 0.2f}), ConfigError);
    CHECK_THROWS_AS(run_sweep(model, ds, SweepAxis::Mu, {}), ConfigError);
}

TEST_CASE("export_csv: header, one row per point, full-precision round trip") {
    SweepResult r;
    r.model_name = "lenet5";
    r.dataset_name = "synthetic";
    r.axis = SweepAxis::Sigma;
    r.points = {{0.1f, 0.123456789f, 100}, {3.9f, 0.987654321f, 100}};

    const std::string path = "sweep_test.csv";
    export_csv(r, path);
    std::ifstream is(path);
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "model,dataset,axis,param,accuracy,n");
    int rows = 0;
    while (std::getline(is, line)) {
        float param, acc;
        int n;
        char model[32], dsname[32], axis[32];
        REQUIRE(std::sscanf(line.c_str(), "%31[^,],%31[^,],%31[^,],%f,%f,%d",
                            model, dsname, axis, &param, &acc, &n) == 6);
        CHECK(acc == r.points[rows].accuracy);  // %.9g survives the round trip
        ++rows;
    }
    CHECK(rows == 2);
    std::remove(path.c_str());

    SweepResult empty = r;
    empty.points.clear();
    export_csv(empty, path);
    std::ifstream is2(path);
    int lines = 0;
    while (std::getline(is2, line)) ++lines;
    CHECK(lines == 1);  // header only
    std::remove(path.c_str());
}

} // TEST_SUITE
