#pragma once

#include <vector>

#include "polysound/polytrope.hpp"

namespace polysound {

enum class WidthBranch { Full, Asymptotic3D, LowDimLimit };

struct WidthSolution {
    double width;
    double residual;  // width-equation value at the returned width
    int iterations;
    WidthBranch branch;
};

// Uniformly sampled nonnegative density profile.  Built through
// make_density_profile, which derives the spacing and validates the grid.
struct DensityProfile {
    std::vector<double> positions;
    std::vector<double> values;
    double spacing;
};

DensityProfile make_density_profile(std::vector<double> positions, std::vector<double> values);

// Transverse-width equation of a cigar cloud at linear density n_eq:
//   f(sigma) = sigma^(2g) - lambda a^4 sigma^(2g-4)
//              - 2 alpha (g-1) n_eq^(g-1) / (g^2 pi^(g-1) omega^2),  g = gamma.
// The equation has exactly one root on [lambda^(1/4) a, infinity).
double cigar_width_residual(const PolytropeParams& params, const TrapGeometry& geom,
                            double sigma, double n_eq);

// Axial-width equation of a disk cloud at areal density n_eq:
//   g(eta) = eta^(g+1) - lambda a^4 eta^(g-3)
//            - 2 alpha (g-1) n_eq^(g-1) / (g^(3/2) pi^((g-1)/2) omega^2).
double disk_width_residual(const PolytropeParams& params, const TrapGeometry& geom,
                           double eta, double n_eq);

// Root of the width equation.  Safeguarded Newton/bisection; for lambda = 0
// the closed form is used directly.  Throws DegenerateInput when both the
// gradient correction and the interaction term vanish, ConvergenceFailure
// on pathological parameters.
WidthSolution solve_cigar_width(const PolytropeParams& params, const TrapGeometry& geom,
                                double n_eq);
WidthSolution solve_disk_width(const PolytropeParams& params, const TrapGeometry& geom,
                               double n_eq);

// Width with the gradient-correction term dropped (the three-dimensional
// bulk limit): sigma^(2g) = C n^(g-1) for cigars, eta^(g+1) = C n^(g-1)
// for disks.  Requires n_eq > 0.
double asymptotic_width_3d(const PolytropeParams& params, const TrapGeometry& geom, double n_eq);

// I_gamma / I_1 with I_d = integral of n(z)^d over the profile (trapezoid
// rule).  For a uniform profile at density c this is c^(gamma-1).
double profile_moment_ratio(const DensityProfile& profile, double gamma);

// Width equation solved with n_eq^(gamma-1) replaced by a profile moment
// ratio, for variational width estimates over a whole cloud shape.
WidthSolution variational_width(const PolytropeParams& params, const TrapGeometry& geom,
                                double moment_ratio);

}  // namespace polysound
