#include "retinet/orientation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace retinet {

GradientField gradient(const ScalarField& f) {
    GradientField g{ScalarField(f.width, f.height, f.spacing),
                    ScalarField(f.width, f.height, f.spacing)};
    const float inv_h = 1.0f / f.spacing;
    const float inv_2h = 0.5f * inv_h;
    for (int y = 0; y < f.height; ++y)
        for (int x = 0; x < f.width; ++x) {
            float dx, dy;
            if (f.width == 1) dx = 0.0f;
            else if (x == 0) dx = (f.at(1, y) - f.at(0, y)) * inv_h;
            else if (x == f.width - 1) dx = (f.at(x, y) - f.at(x - 1, y)) * inv_h;
            else dx = (f.at(x + 1, y) - f.at(x - 1, y)) * inv_2h;

            if (f.height == 1) dy = 0.0f;
            else if (y == 0) dy = (f.at(x, 1) - f.at(x, 0)) * inv_h;
            else if (y == f.height - 1) dy = (f.at(x, y) - f.at(x, y - 1)) * inv_h;
            else dy = (f.at(x, y + 1) - f.at(x, y - 1)) * inv_2h;

            g.dx.at(x, y) = dx;
            g.dy.at(x, y) = dy;
        }
    return g;
}

ScalarField directional_response(const ScalarField& field, float theta) {
    // Angles are snapped to a lattice of pi/2^18 so that theta and theta+pi
    // land on the same lattice point with opposite parity; response(theta+pi)
    // is then the exact bitwise negation of response(theta).
    constexpr long kHalfTurnSteps = 1L << 18;
    long k = std::lround(static_cast<double>(theta) / M_PI * kHalfTurnSteps);
    k %= 2 * kHalfTurnSteps;
    if (k < 0) k += 2 * kHalfTurnSteps;
    float flip = 1.0f;
    if (k >= kHalfTurnSteps) {
        k -= kHalfTurnSteps;
        flip = -1.0f;
    }
    const double t = static_cast<double>(k) * (M_PI / kHalfTurnSteps);
    const float s = flip * static_cast<float>(std::sin(t));
    const float c = flip * static_cast<float>(std::cos(t));

    const GradientField g = gradient(field);
    ScalarField out(field.width, field.height, field.spacing);
    for (size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = -s * g.dx.values[i] + c * g.dy.values[i];
    return out;
}

size_t OrientationField::regular_count() const {
    size_t n = 0;
    for (uint8_t m : regular_mask) n += m != 0;
    return n;
}

float default_grad_tolerance(const ScalarField& field) {
    const float range = field.max_value() - field.min_value();
    return 1e-6f * range / field.spacing;
}

OrientationField orientation_field(const ScalarField& field, float grad_tolerance) {
    const GradientField g = gradient(field);
    OrientationField of;
    of.width = field.width;
    of.height = field.height;
    of.spacing = field.spacing;
    of.theta.assign(field.values.size(), 0.0f);
    of.regular_mask.assign(field.values.size(), 0);

    const float two_pi = 2.0f * static_cast<float>(M_PI);
    for (size_t i = 0; i < field.values.size(); ++i) {
        const float fx = g.dx.values[i];
        const float fy = g.dy.values[i];
        if (std::hypot(fx, fy) <= grad_tolerance) continue;
        float t = std::atan2(-fx, fy);
        if (t < 0.0f) t += two_pi;
        if (t >= two_pi) t = 0.0f;
        of.theta[i] = t;
        of.regular_mask[i] = 1;
    }
    return of;
}

OrientationField orientation_field(const ScalarField& field) {
    return orientation_field(field, default_grad_tolerance(field));
}

OrientationLift orientation_lift(const OrientationField& of) {
    OrientationLift lift;
    lift.points.reserve(of.regular_count());
    for (int y = 0; y < of.height; ++y)
        for (int x = 0; x < of.width; ++x)
            if (of.regular_at(x, y))
                lift.points.push_back({x * of.spacing, y * of.spacing, of.theta_at(x, y)});
    return lift;
}

void export_lift_csv(const OrientationLift& lift, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError(path + ": cannot open for writing");
    os << "x,y,theta\n";
    char buf[128];
    for (const LiftPoint& p : lift.points) {
        std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", p.x, p.y, p.theta);
        os << buf;
    }
    if (!os) throw DataError(path + ": write failed");
}

} // namespace retinet
