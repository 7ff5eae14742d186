#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "oracles.hpp"
#include "retinet/orientation.hpp"
#include "retinet/verify.hpp"

using namespace retinet;

namespace {

constexpr float kPi = static_cast<float>(M_PI);

ScalarField ramp_x(int n) {
    ScalarField f(n, n, 1.0f);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) f.at(x, y) = static_cast<float>(x);
    return f;
}

ScalarField ramp_y(int n) {
    ScalarField f(n, n, 1.0f);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) f.at(x, y) = static_cast<float>(y);
    return f;
}

} // namespace

TEST_SUITE("retina-model") {

TEST_CASE("directional response of F = x is -sin(theta) everywhere") {
    const ScalarField f = ramp_x(8);
    for (float theta : {0.3f, 1.2f, 2.9f, 4.4f, 6.0f}) {
        const ScalarField r = directional_response(f, theta);
        for (float v : r.values)
            CHECK(v == doctest::Approx(-std::sin(theta)).epsilon(1e-5));
    }
}

TEST_CASE("directional response is bitwise antisymmetric under a half turn") {
    Rng rng(9);
    const ScalarField f = random_smooth_field(24, 24, 1.0f, rng);
    for (float theta : {0.1f, 0.9f, 2.4f, 3.0f}) {
        const ScalarField a = directional_response(f, theta);
        const ScalarField b = directional_response(f, theta + kPi);
        REQUIRE(a.values.size() == b.values.size());
        for (size_t i = 0; i < a.values.size(); ++i)
            CHECK(b.values[i] == -a.values[i]);  // exact, same code path
    }
}

TEST_CASE("circular-well responses highlight one arc of the r=5 circle") {
    const ScalarField well = ring_well_field();
    // response vanishes in the flat interior
    const ScalarField r = directional_response(well, kPi / 4);
    CHECK(std::fabs(r.at(r.width / 2, r.height / 2)) < 1e-6f);

    for (float theta : {kPi / 4, 3 * kPi / 4, 7 * kPi / 4, 5 * kPi / 4}) {
        const ArcCheck check = check_response_arc(well, theta);
        CHECK(check.radius_ok);
        CHECK(check.quadrant_ok);
    }
}

TEST_CASE("orientation of ramps matches the brute-force argmax") {
    // F = x: gradient (1,0); brute force over 3600 angles picks 3pi/2
    const double bf_x = oracles::brute_force_theta(1.0, 0.0);
    CHECK(oracles::angle_dist(bf_x, 3 * M_PI / 2) <= M_PI / 1800);
    const OrientationField ox = orientation_field(ramp_x(6), 1e-6f);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 6; ++x) {
            REQUIRE(ox.regular_at(x, y));
            CHECK(oracles::angle_dist(ox.theta_at(x, y), bf_x) <= M_PI / 1800);
        }

    // F = y: gradient (0,1); argmax at theta = 0
    const double bf_y = oracles::brute_force_theta(0.0, 1.0);
    CHECK(oracles::angle_dist(bf_y, 0.0) <= M_PI / 1800);
    const OrientationField oy = orientation_field(ramp_y(6), 1e-6f);
    CHECK(oracles::angle_dist(oy.theta_at(3, 3), 0.0) <= M_PI / 1800);
}

TEST_CASE("constant field has no regular points") {
    ScalarField f(5, 5, 1.0f, 2.0f);
    const OrientationField of = orientation_field(f, 1e-9f);
    CHECK(of.regular_count() == 0);
    const OrientationLift lift = orientation_lift(of);
    CHECK(lift.points.empty());
}

TEST_CASE("lift of F = x enumerates every grid point at 3pi/2") {
    const OrientationField of = orientation_field(ramp_x(4), 1e-6f);
    const OrientationLift lift = orientation_lift(of);
    REQUIRE(lift.points.size() == 16);
    for (const LiftPoint& p : lift.points)
        CHECK(p.theta == doctest::Approx(3 * kPi / 2).epsilon(1e-6));
}

TEST_CASE("lift size equals the regular-point count") {
    Rng rng(12);
    const ScalarField f = random_smooth_field(20, 20, 1.0f, rng);
    const OrientationField of = orientation_field(f);
    CHECK(orientation_lift(of).points.size() == of.regular_count());
}

TEST_CASE("closed form agrees with brute force on random smooth fields") {
    OrientationCheckConfig config;
    config.num_fields = 12;  // acceptance runs the full 100
    config.field_cells = 32;
    const OrientationCheckResult r = run_orientation_crosscheck(config);
    CHECK(r.pass);
    CHECK(r.points_checked > 1000);
    CHECK(r.max_angle_error <= M_PI / 1800);
    CHECK(r.non_unique_maxima == 0);
}

TEST_CASE("rotating the field by 90 degrees rotates the orientation") {
    Rng rng(13);
    const int n = 30;
    const ScalarField f = random_smooth_field(n, n, 1.0f, rng);
    ScalarField g(n, n, 1.0f);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) g.at(x, y) = f.at(y, n - 1 - x);

    const OrientationField of = orientation_field(f);
    const OrientationField og = orientation_field(g);
    const float two_pi = 2 * kPi;
    int compared = 0;
    // skip the one-sided-difference frame, where the stencils do not commute
    // with the rotation
    for (int y = 1; y < n - 1; ++y)
        for (int x = 1; x < n - 1; ++x) {
            if (!og.regular_at(x, y) || !of.regular_at(y, n - 1 - x)) continue;
            const float expect = std::fmod(of.theta_at(y, n - 1 - x) + kPi / 2, two_pi);
            CHECK(oracles::angle_dist(og.theta_at(x, y), expect) < 0.05);
            ++compared;
        }
    CHECK(compared > 300);
}

TEST_CASE("orientation lift CSV has one row per regular point") {
    const OrientationField of = orientation_field(ramp_x(4), 1e-6f);
    const std::string path = "lift_test.csv";
    export_lift_csv(orientation_lift(of), path);

    std::ifstream is(path);
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "x,y,theta");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 16);
    std::remove(path.c_str());
}

} // TEST_SUITE
