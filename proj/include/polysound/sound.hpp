#pragma once

#include <vector>

#include "polysound/polytrope.hpp"
#include "polysound/widths.hpp"

namespace polysound {

// One density point of a sound-velocity sweep.  cs_numeric uses the full
// width equation, cs_lowdim pins the width at the oscillator length, and
// cs_3d uses the bulk asymptotic width.
struct SweepRow {
    double n_eq;
    double width;
    double cs_numeric;
    double cs_lowdim;
    double cs_3d;
};

struct DispersionPoint {
    double k;
    double omega;
};

struct DispersionResult {
    double omega;
    bool free_particle;  // true when c_s = 0 reduced the law to omega = sqrt(lambda) k^2 / 2
};

// Sound velocity of a uniform 3D gas: sqrt(alpha (gamma-1) n^(gamma-1)).
double sound_uniform_3d(const PolytropeParams& params, double n3d);

// Axial sound velocity of a cigar cloud of linear density n_eq and
// transverse width sigma:
//   c = sqrt(alpha (gamma-1) / gamma) (n_eq / (pi sigma^2))^((gamma-1)/2).
double sound_cigar(const PolytropeParams& params, double n_eq, double sigma);

// In-plane sound velocity of a disk cloud of areal density n_eq and axial
// width eta:
//   c = sqrt(alpha (gamma-1) / sqrt(gamma)) (n_eq / (sqrt(pi) eta))^((gamma-1)/2).
double sound_disk(const PolytropeParams& params, double n_eq, double eta);

// Sound velocity written purely in terms of the equilibrium width:
//   c = omega sqrt(gamma (w^4 - lambda a^4) / 2) / w.
// Algebraically identical to the density forms once w solves the width
// equation.  Throws SubcriticalWidth when w^4 < lambda a^4.
double sound_from_width(const TrapGeometry& geom, double gamma, double lambda_qp, double width);

// Low-amplitude dispersion law omega(k) = c_s k sqrt(1 + lambda k^2 / (4 c_s^2)).
// At c_s = 0 with lambda > 0 the free-particle branch sqrt(lambda) k^2 / 2
// is returned and flagged.
DispersionResult dispersion_omega(double c_s, double lambda_qp, double k);

// Full sweep over a strictly increasing positive density grid.  Solver
// failures are rethrown with the offending density in the message.
std::vector<SweepRow> sweep_sound_curve(const PolytropeParams& params, const TrapGeometry& geom,
                                        const std::vector<double>& densities);

// count log-spaced values on [lo, hi] with both endpoints exact.
std::vector<double> log_spaced_densities(double lo, double hi, int count);

// The standard sweep grid: 200 points on [1e-4, 1e4].
std::vector<double> default_density_grid();

}  // namespace polysound
