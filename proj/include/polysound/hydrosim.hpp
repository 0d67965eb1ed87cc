#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "polysound/polytrope.hpp"

namespace polysound {

// One-dimensional periodic fields n1(z), v(z) on a uniform grid z_j = j dz,
// dz = grid_length / points.  Cigar runs evolve the axial direction, disk
// runs a single in-plane direction with the orthogonal one uniform.
struct HydroState {
    double grid_length;
    std::size_t points;
    std::vector<double> n1;
    std::vector<double> v;
    double time;

    double dz() const { return grid_length / static_cast<double>(points); }
};

// Width closure during evolution: keep the equilibrium width solved once at
// the reference density, or re-solve it from the local density each sample.
enum class WidthMode { FrozenAtEquilibrium, LocalAdiabatic };

struct SimSettings {
    double dt;
    long steps;
    WidthMode width_mode = WidthMode::FrozenAtEquilibrium;
    long record_every = 1;
    // V(z) sampled at the grid points; empty means zero everywhere.
    std::vector<double> external_potential;
};

struct ProbeSeries {
    std::vector<double> times;
    std::vector<double> mass;
    std::vector<std::complex<double>> mode_amplitude;
    std::vector<double> peak_position;
};

// Largest stable step: 0.2 min(dx / c_max, 2 dx^2 / sqrt(lambda)); the
// second bound is dropped at lambda = 0.
double cfl_cap(double dx, double lambda_qp, double c_max);

// n1 = n_eq (1 + epsilon cos(k z)), v = 0.  k must fit the periodic box
// (k L / 2 pi integer) and epsilon must lie in [0, 1e-2].
HydroState init_standing_wave(double n_eq, double epsilon, double k, std::size_t points,
                              double grid_length);

// n1 = n_eq (1 + epsilon exp(-(z - z0)^2 / w^2)), v = 0.  Requires w >= 5 dz
// and a pulse tail below 1e-12 at both box edges.
HydroState init_gaussian_pulse(double n_eq, double epsilon, double z0, double w,
                               std::size_t points, double grid_length);

// Fourth-order central differences on the periodic grid.
std::vector<double> periodic_d1(std::span<const double> f, double dz);
std::vector<double> periodic_d2(std::span<const double> f, double dz);
std::vector<double> periodic_d3(std::span<const double> f, double dz);

// Gradient-correction force on dv/dt, written out in density derivatives:
//   lambda n'''/(4n) - n' [ lambda n''/(2n^2) - lambda (n')^2/(4n^3) ].
std::vector<double> quantum_pressure_force(std::span<const double> n, double dz,
                                           double lambda_qp);

// The same force computed through the Bohm form
//   (lambda/2) d/dz [ (d^2 sqrt(n)/dz^2) / sqrt(n) ].
// Kept as an independent route for cross-checks; agrees with
// quantum_pressure_force to the discretization order.
std::vector<double> bohm_force(std::span<const double> n, double dz, double lambda_qp);

struct HydroRhs {
    std::vector<double> dn_dt;
    std::vector<double> dv_dt;
};

// Time derivatives of (n1, v):
//   dn1/dt = -d/dz (n1 v)
//   dv/dt  = -d/dz (v^2/2 + V + mu(n1)) + quantum pressure force,
// with mu from the cigar or disk chemical potential at the closure width.
// n_eq_ref is the density at which the frozen width is solved.
HydroRhs rhs_eval(const HydroState& state, const PolytropeParams& params,
                  const TrapGeometry& geom, const SimSettings& settings, double n_eq_ref);

// Classic fourth-order Runge-Kutta march.  Records mass, the complex
// Fourier amplitude at probe_k, and the (sub-grid refined) peak position
// right of the initial peak, every record_every steps starting at t = 0.
// The reference density for the frozen width is the mean density of the
// initial state.  Aborts with DensityFloorViolation or SimulationUnstable
// instead of clamping.
ProbeSeries integrate_run(HydroState state, const PolytropeParams& params,
                          const TrapGeometry& geom, const SimSettings& settings, double probe_k);

struct ModeFrequencyFit {
    double omega;
    double amplitude;
    double phase;
    double rms_residual;
};

// Least-squares fit of Re(mode_amplitude)(t) to A cos(omega t + phi).
// Needs at least three full oscillation periods in the series.
ModeFrequencyFit measure_mode_frequency(const ProbeSeries& series);

// Slope of a straight-line fit to the peak trajectory over the trailing
// 60% of the samples.  Throws InvalidWindow when the trajectory is not
// monotone there (reflected or wrapped pulse).
double measure_pulse_speed(const ProbeSeries& series);

}  // namespace polysound
