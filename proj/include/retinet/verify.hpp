#pragma once

#include <cstdint>
#include <vector>

#include "retinet/orientation.hpp"
#include "retinet/retina.hpp"

namespace retinet {

// ----------------------------------------------------------- field makers

// Mixture of random smooth bumps; plenty of regular points everywhere.
ScalarField random_smooth_field(int width, int height, float spacing, Rng& rng);

// Circular well of radius 5: F(x,y) = -1 / (1 + (0.04 x^2 + 0.04 y^2)^100),
// sampled on [-extent, extent]^2. Flat inside and outside, with a sharp ring
// transition at r = 5 whose directional responses highlight one arc.
ScalarField ring_well_field(float extent = 8.0f, float spacing = 0.1f);

// --------------------------------------------------------- Lipschitz suite

struct LipschitzSuiteConfig {
    int fields_per_geometry = 50;
    int field_cells = 96;        // square grid side
    float spacing = 0.25f;
    int pairs_per_field = 2000;
    uint64_t seed = 2024;
    // (rho, epsilon) geometries exercised per field
    std::vector<std::pair<float, float>> geometries = {{3, 1}, {5, 2}, {7, 3}};
};

struct LipschitzSuiteResult {
    std::vector<LipschitzReport> reports;
    int failures = 0;
    float worst_ratio = 0.0f;  // max L_empirical / L_bound over the suite
    bool pass() const { return failures == 0; }
};

// Random binary (discontinuous) fields through verify_lipschitz for every
// kernel geometry; the theorem's content is that all of them stay under the
// closed-form constant.
LipschitzSuiteResult run_lipschitz_suite(const LipschitzSuiteConfig& config);

// ------------------------------------------------- orientation cross-check

struct OrientationCheckConfig {
    int num_fields = 100;
    int field_cells = 48;
    float spacing = 1.0f;
    int theta_samples = 3600;
    uint64_t seed = 7;
};

struct OrientationCheckResult {
    int64_t points_checked = 0;
    double max_angle_error = 0.0;    // closed form vs brute-force argmax
    double tolerance = 0.0;          // one theta grid step
    int64_t non_unique_maxima = 0;   // maximizer arcs wider than 2 grid steps
    bool pass = false;
};

// Brute-forces argmax_theta of the directional response over a uniform theta
// grid at every regular point and compares with the atan2 closed form; also
// checks the maximizer set is a single narrow arc.
OrientationCheckResult run_orientation_crosscheck(const OrientationCheckConfig& config);

// ------------------------------------------------------ response arc check

struct ArcCheck {
    float theta = 0;
    float peak_x = 0, peak_y = 0;  // argmax position relative to grid center
    float peak_radius = 0;
    bool radius_ok = false;    // | r - 5 | <= 2 * spacing
    bool quadrant_ok = false;  // peak lies at angle theta + pi/2 quadrant
    bool pass() const { return radius_ok && quadrant_ok; }
};

// Locates the maximum of the directional response of the circular well and
// checks it sits on the ring in the quadrant the operator picks out.
ArcCheck check_response_arc(const ScalarField& well, float theta);

} // namespace retinet
