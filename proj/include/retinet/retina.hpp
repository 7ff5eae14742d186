#pragma once

#include <string>

#include "retinet/rng.hpp"
#include "retinet/scalar_field.hpp"

namespace retinet {

// Sign layout of a center-surround receptive field: an inner disc of radius
// rho-epsilon with one sign, an annulus out to rho with the opposite sign.
enum class Polarity { OnCenter, OffCenter };

struct CenterSurroundKernel {
    float rho = 0;       // outer radius
    float epsilon = 0;   // annulus thickness, 0 < epsilon < rho
    Polarity polarity = Polarity::OnCenter;
    bool balanced = false;
    float spacing = 1.0f;

    int half = 0;               // grid is (2*half+1)^2 cells
    std::vector<float> grid;    // row-major
    float weight_center = 0;    // signed magnitude used on the inner disc
    float weight_surround = 0;  // signed magnitude used on the annulus

    int side() const { return 2 * half + 1; }
    float at(int x, int y) const { return grid[static_cast<size_t>(y) * side() + x]; }
    float sum() const;
    float abs_sum() const;
};

// Classifies a radial distance against the two-zone layout: +1 inner disc,
// -1 annulus, 0 outside. Polarity is applied on top of this.
int center_surround_zone(float r, float rho, float epsilon);

// Discretizes the kernel at the given grid spacing; cells are classified by
// the distance of their center. Unbalanced uses raw +-1 weights; balanced
// rescales the surround so the grid sums to zero exactly.
CenterSurroundKernel build_kernel(float rho, float epsilon, Polarity polarity,
                                  bool balanced, float spacing);

// Riemann-sum discretization of the center-surround integral transform:
//   out(x,y) = spacing^2 * sum_{u,v} kernel(u,v) * field(x+u, y+v)
// Only cells where the whole kernel support fits are produced: the output is
// the valid interior, cropped by `half` on every side, so output cell (x, y)
// corresponds to input cell (x + half, y + half).
ScalarField ganglionic_transform(const ScalarField& field,
                                 const CenterSurroundKernel& kernel);

// Area of A \ B for two discs of radius rho at center distance d. Equals
// pi*rho^2 when the discs are disjoint, otherwise pi*rho^2 minus the lens
// 2*rho^2*acos(d/2rho) - (d/2)*sqrt(4rho^2 - d^2).
double disc_difference_area(double d, double rho);

// Closed-form Lipschitz constant for the transform of any field bounded in
// [N, M]: L = (M-N) * max(pi*rho, 2*rho). The 2*rho branch covers center
// distances below 2*rho because d/dd[disc_difference_area] =
// sqrt(4rho^2-d^2) <= 2rho (see docs/lipschitz_bound.md).
float lipschitz_bound(float rho, float epsilon, float M, float N);

struct LipschitzReport {
    float rho = 0, epsilon = 0;
    float M = 0, N = 0;          // declared field bounds, N <= M
    float L_bound = 0;           // theoretical constant
    float L_empirical = 0;       // max observed |S(p)-S(q)| / ||p-q||
    int num_pairs = 0;
    float tolerance = 0.05f;     // discretization allowance
    bool pass = false;           // L_empirical <= L_bound * (1 + tolerance)
};

// Samples random point pairs in the transform's valid interior and compares
// the worst difference quotient against the closed-form bound. The field
// must declare bounds.
LipschitzReport verify_lipschitz(const ScalarField& field,
                                 const CenterSurroundKernel& kernel,
                                 int num_pairs, Rng& rng);

} // namespace retinet
