#include "retinet/retina.hpp"

#include <cmath>

namespace retinet {

float CenterSurroundKernel::sum() const {
    double acc = 0.0;
    for (float v : grid) acc += v;
    return static_cast<float>(acc);
}

float CenterSurroundKernel::abs_sum() const {
    double acc = 0.0;
    for (float v : grid) acc += std::fabs(v);
    return static_cast<float>(acc);
}

int center_surround_zone(float r, float rho, float epsilon) {
    if (r <= rho - epsilon) return 1;
    if (r <= rho) return -1;
    return 0;
}

CenterSurroundKernel build_kernel(float rho, float epsilon, Polarity polarity,
                                  bool balanced, float spacing) {
    if (rho <= 0.0f) throw ConfigError("kernel: rho must be positive");
    if (epsilon <= 0.0f || epsilon >= rho)
        throw ConfigError("kernel: epsilon must be in (0, rho)");
    if (spacing <= 0.0f) throw ConfigError("kernel: spacing must be positive");

    CenterSurroundKernel k;
    k.rho = rho;
    k.epsilon = epsilon;
    k.polarity = polarity;
    k.balanced = balanced;
    k.spacing = spacing;
    k.half = static_cast<int>(std::ceil(rho / spacing));
    const int side = k.side();
    k.grid.assign(static_cast<size_t>(side) * side, 0.0f);

    int count_center = 0, count_surround = 0;
    std::vector<int> zone(k.grid.size(), 0);
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            const float dx = (x - k.half) * spacing;
            const float dy = (y - k.half) * spacing;
            const int z = center_surround_zone(std::hypot(dx, dy), rho, epsilon);
            zone[static_cast<size_t>(y) * side + x] = z;
            if (z > 0) ++count_center;
            if (z < 0) ++count_surround;
        }
    if (count_center < 1 || count_surround < 1)
        throw ConfigError("kernel: spacing too coarse, a zone has no samples");

    const float sign = polarity == Polarity::OnCenter ? 1.0f : -1.0f;
    k.weight_center = sign;
    // Balanced: surround magnitude count_c/count_s makes the sums cancel.
    k.weight_surround = balanced
        ? -sign * (static_cast<float>(count_center) / static_cast<float>(count_surround))
        : -sign;
    for (size_t i = 0; i < k.grid.size(); ++i) {
        if (zone[i] > 0) k.grid[i] = k.weight_center;
        else if (zone[i] < 0) k.grid[i] = k.weight_surround;
    }
    return k;
}

ScalarField ganglionic_transform(const ScalarField& field,
                                 const CenterSurroundKernel& kernel) {
    if (std::fabs(kernel.spacing - field.spacing) > 1e-6f * kernel.spacing)
        throw ConfigError("transform: kernel and field spacing differ");
    const int side = kernel.side();
    if (side > field.width || side > field.height)
        throw ConfigError("transform: kernel larger than field");

    const int m = kernel.half;
    const int out_w = field.width - 2 * m;
    const int out_h = field.height - 2 * m;
    ScalarField out(out_w, out_h, field.spacing);
    const double cell_area = static_cast<double>(field.spacing) * field.spacing;

    for (int oy = 0; oy < out_h; ++oy)
        for (int ox = 0; ox < out_w; ++ox) {
            double acc = 0.0;
            for (int ky = 0; ky < side; ++ky) {
                const float* krow = kernel.grid.data() + static_cast<size_t>(ky) * side;
                const float* frow =
                    field.values.data() + static_cast<size_t>(oy + ky) * field.width + ox;
                for (int kx = 0; kx < side; ++kx)
                    acc += static_cast<double>(krow[kx]) * frow[kx];
            }
            out.at(ox, oy) = static_cast<float>(acc * cell_area);
        }
    return out;
}

double disc_difference_area(double d, double rho) {
    if (d < 0.0) throw ConfigError("disc_difference_area: d must be >= 0");
    const double full = M_PI * rho * rho;
    if (d >= 2.0 * rho) return full;
    const double lens = 2.0 * rho * rho * std::acos(d / (2.0 * rho)) -
                        (d / 2.0) * std::sqrt(4.0 * rho * rho - d * d);
    return full - lens;
}

float lipschitz_bound(float rho, float epsilon, float M, float N) {
    if (M < N) throw ConfigError("lipschitz_bound: M must be >= N");
    if (rho <= 0.0f) throw ConfigError("lipschitz_bound: rho must be positive");
    (void)epsilon;  // the bound does not depend on the annulus split
    const float pi_rho = static_cast<float>(M_PI) * rho;
    return (M - N) * std::max(pi_rho, 2.0f * rho);
}

LipschitzReport verify_lipschitz(const ScalarField& field,
                                 const CenterSurroundKernel& kernel,
                                 int num_pairs, Rng& rng) {
    if (!field.bounds)
        throw ConfigError("verify_lipschitz: field must declare bounds");
    const ScalarField s = ganglionic_transform(field, kernel);
    if (static_cast<size_t>(s.width) * s.height < 2)
        throw ConfigError("verify_lipschitz: valid interior is empty");

    LipschitzReport r;
    r.rho = kernel.rho;
    r.epsilon = kernel.epsilon;
    r.N = field.bounds->first;
    r.M = field.bounds->second;
    r.L_bound = lipschitz_bound(kernel.rho, kernel.epsilon, r.M, r.N);
    r.num_pairs = num_pairs;

    for (int i = 0; i < num_pairs; ++i) {
        const int x1 = static_cast<int>(rng.uniform_int(s.width));
        const int y1 = static_cast<int>(rng.uniform_int(s.height));
        int x2 = x1, y2 = y1;
        while (x2 == x1 && y2 == y1) {
            x2 = static_cast<int>(rng.uniform_int(s.width));
            y2 = static_cast<int>(rng.uniform_int(s.height));
        }
        const float dist = s.spacing *
            std::hypot(static_cast<float>(x2 - x1), static_cast<float>(y2 - y1));
        const float ratio = std::fabs(s.at(x2, y2) - s.at(x1, y1)) / dist;
        if (ratio > r.L_empirical) r.L_empirical = ratio;
    }
    r.pass = r.L_empirical <= r.L_bound * (1.0f + r.tolerance);
    return r;
}

} // namespace retinet
