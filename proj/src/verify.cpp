#include "retinet/verify.hpp"

#include <cmath>
#include <cstdlib>

namespace retinet {

ScalarField random_smooth_field(int width, int height, float spacing, Rng& rng) {
    ScalarField f(width, height, spacing);
    const float ext_x = (width - 1) * spacing;
    const float ext_y = (height - 1) * spacing;
    const int bumps = 3 + static_cast<int>(rng.uniform_int(6));
    for (int b = 0; b < bumps; ++b) {
        const float cx = rng.uniform(0.0f, ext_x);
        const float cy = rng.uniform(0.0f, ext_y);
        const float amp = rng.uniform(0.5f, 2.0f) * (rng.bernoulli(0.5f) ? 1.0f : -1.0f);
        const float width_units = rng.uniform(4.0f, 12.0f) * spacing;
        const float inv_two_s2 = 1.0f / (2.0f * width_units * width_units);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                const float dx = x * spacing - cx;
                const float dy = y * spacing - cy;
                f.at(x, y) += amp * std::exp(-(dx * dx + dy * dy) * inv_two_s2);
            }
    }
    return f;
}

ScalarField ring_well_field(float extent, float spacing) {
    const int half = static_cast<int>(std::lround(extent / spacing));
    const int side = 2 * half + 1;
    return ScalarField::sample(side, side, spacing, -extent, -extent,
                               [](double x, double y) {
                                   const double r2 = 0.04 * x * x + 0.04 * y * y;
                                   return -1.0 / (1.0 + std::pow(r2, 100.0));
                               });
}

LipschitzSuiteResult run_lipschitz_suite(const LipschitzSuiteConfig& config) {
    LipschitzSuiteResult result;
    Rng rng(config.seed);
    for (const auto& [rho, epsilon] : config.geometries) {
        const auto kernel =
            build_kernel(rho, epsilon, Polarity::OnCenter, /*balanced=*/false,
                         config.spacing);
        for (int i = 0; i < config.fields_per_geometry; ++i) {
            const ScalarField field = ScalarField::random_binary(
                config.field_cells, config.field_cells, config.spacing, rng);
            LipschitzReport report =
                verify_lipschitz(field, kernel, config.pairs_per_field, rng);
            if (!report.pass) ++result.failures;
            result.worst_ratio =
                std::max(result.worst_ratio, report.L_empirical / report.L_bound);
            result.reports.push_back(report);
        }
    }
    return result;
}

OrientationCheckResult run_orientation_crosscheck(const OrientationCheckConfig& config) {
    OrientationCheckResult result;
    const int T = config.theta_samples;
    const double step = 2.0 * M_PI / T;
    result.tolerance = step;  // grid argmax is off by half a step, plus float32 slack

    std::vector<double> sin_t(T), cos_t(T);
    for (int t = 0; t < T; ++t) {
        sin_t[t] = std::sin(t * step);
        cos_t[t] = std::cos(t * step);
    }

    Rng rng(config.seed);
    for (int f = 0; f < config.num_fields; ++f) {
        const ScalarField field = random_smooth_field(
            config.field_cells, config.field_cells, config.spacing, rng);
        const GradientField grad = gradient(field);
        const OrientationField of = orientation_field(field);

        for (int y = 0; y < field.height; ++y)
            for (int x = 0; x < field.width; ++x) {
                if (!of.regular_at(x, y)) continue;
                const double fx = grad.dx.at(x, y);
                const double fy = grad.dy.at(x, y);

                int best_t = 0;
                double best_val = -1e300;
                for (int t = 0; t < T; ++t) {
                    const double zeta = -sin_t[t] * fx + cos_t[t] * fy;
                    if (zeta > best_val) {
                        best_val = zeta;
                        best_t = t;
                    }
                }
                // maximizer set: contiguous arc no wider than 2 grid steps,
                // i.e. every exact tie within one step of the argmax
                for (int t = 0; t < T; ++t) {
                    const double zeta = -sin_t[t] * fx + cos_t[t] * fy;
                    if (zeta >= best_val) {
                        int dist = std::abs(t - best_t);
                        dist = std::min(dist, T - dist);
                        if (dist > 1) {
                            ++result.non_unique_maxima;
                            break;
                        }
                    }
                }

                const double closed = of.theta_at(x, y);
                double diff = std::fabs(closed - best_t * step);
                diff = std::min(diff, 2.0 * M_PI - diff);
                result.max_angle_error = std::max(result.max_angle_error, diff);
                ++result.points_checked;
            }
    }
    result.pass = result.points_checked > 0 &&
                  result.max_angle_error <= M_PI / 1800.0 &&
                  result.non_unique_maxima == 0;
    return result;
}

ArcCheck check_response_arc(const ScalarField& well, float theta) {
    const ScalarField resp = directional_response(well, theta);
    ArcCheck check;
    check.theta = theta;

    int best_x = 0, best_y = 0;
    float best = resp.at(0, 0);
    for (int y = 0; y < resp.height; ++y)
        for (int x = 0; x < resp.width; ++x)
            if (resp.at(x, y) > best) {
                best = resp.at(x, y);
                best_x = x;
                best_y = y;
            }

    const float cx = (resp.width - 1) * 0.5f;
    const float cy = (resp.height - 1) * 0.5f;
    check.peak_x = (best_x - cx) * resp.spacing;
    check.peak_y = (best_y - cy) * resp.spacing;
    check.peak_radius = std::hypot(check.peak_x, check.peak_y);
    check.radius_ok = std::fabs(check.peak_radius - 5.0f) <= 2.0f * resp.spacing;

    // The response on the ring is proportional to sin(alpha - theta), so the
    // peak sits at polar angle theta + pi/2.
    const float alpha = theta + static_cast<float>(M_PI) / 2.0f;
    const bool want_x_pos = std::cos(alpha) >= 0.0f;
    const bool want_y_pos = std::sin(alpha) >= 0.0f;
    check.quadrant_ok = (check.peak_x >= 0.0f) == want_x_pos &&
                        (check.peak_y >= 0.0f) == want_y_pos;
    return check;
}

} // namespace retinet
