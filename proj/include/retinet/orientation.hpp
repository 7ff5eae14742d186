#pragma once

#include <string>
#include <vector>

#include "retinet/scalar_field.hpp"

namespace retinet {

// Grid gradients: central differences inside, one-sided at the edges, both
// divided by the grid spacing.
struct GradientField {
    ScalarField dx;
    ScalarField dy;
};
GradientField gradient(const ScalarField& field);

// Response of the directional operator -sin(theta) d/dx + cos(theta) d/dy.
// theta is snapped to a lattice of pi/2^18 (1.2e-5 rad); theta and theta+pi
// share a lattice point up to parity, so their responses are exact bitwise
// negations of each other.
ScalarField directional_response(const ScalarField& field, float theta);

// Angle maximizing the directional response at each grid point, defined
// where the gradient is nonzero.
struct OrientationField {
    int width = 0;
    int height = 0;
    float spacing = 1.0f;
    std::vector<float> theta;          // radians in [0, 2pi); 0 where irregular
    std::vector<uint8_t> regular_mask; // nonzero where the gradient beats the tolerance

    float theta_at(int x, int y) const { return theta[static_cast<size_t>(y) * width + x]; }
    bool regular_at(int x, int y) const { return regular_mask[static_cast<size_t>(y) * width + x] != 0; }
    size_t regular_count() const;
};

// Default gradient tolerance: 1e-6 * value range / spacing.
float default_grad_tolerance(const ScalarField& field);

// theta = atan2(-dF/dx, dF/dy), the closed-form argmax of
// zeta(theta) = -sin(theta)*Fx + cos(theta)*Fy, normalized to [0, 2pi).
OrientationField orientation_field(const ScalarField& field, float grad_tolerance);
OrientationField orientation_field(const ScalarField& field);

// The discrete section {(x, y, theta(x,y))} over regular points; coordinates
// are physical (grid index * spacing).
struct LiftPoint {
    float x, y, theta;
};
struct OrientationLift {
    std::vector<LiftPoint> points;
};

OrientationLift orientation_lift(const OrientationField& of);

// CSV with header x,y,theta, one row per regular point.
void export_lift_csv(const OrientationLift& lift, const std::string& path);

} // namespace retinet
