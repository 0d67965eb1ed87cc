#pragma once

#include "polysound/errors.hpp"

namespace polysound {

// Everything in this library works in trap units: hbar = m = 1 and the
// tight-trap frequency omega = 1, so the characteristic oscillator length
// a = sqrt(hbar / (m omega)) = 1.  Densities are per unit length (cigar)
// or per unit area (disk) in units of 1/a and 1/a^2; velocities come out
// in units of omega * a.

// Polytropic equation of state: energy per particle (alpha/gamma) n^(gamma-1)
// plus a density-gradient correction of strength lambda_qp.
struct PolytropeParams {
    double gamma;      // adiabatic index, > 1
    double alpha;      // interaction coefficient, > 0
    double lambda_qp;  // gradient-correction strength, >= 0
};

// Validates and returns the parameter set; throws DomainError on a bad value.
PolytropeParams make_polytrope_params(double gamma, double alpha, double lambda_qp);

enum class GeometryKind { Cigar, Disk };

// A harmonic confinement tight in two directions (cigar) or one (disk).
// char_length is redundant with omega_tight (a = omega^-1/2 in trap units)
// and the pair is validated for consistency.
struct TrapGeometry {
    GeometryKind kind;
    double omega_tight;
    double char_length;
};

TrapGeometry make_trap_geometry(GeometryKind kind, double omega_tight = 1.0);
TrapGeometry make_trap_geometry(GeometryKind kind, double omega_tight, double char_length);

// Physical regime selector for the two crossover endpoints plus a free
// custom polytrope.  BEC carries the single interaction knob nu = a_s * N.
class Regime {
  public:
    enum class Kind { BCS, BEC, Custom };

    static Regime bcs();
    static Regime bec(double nu);
    static Regime custom(double gamma, double alpha);

    Kind kind() const { return kind_; }
    double nu() const;  // BEC only

  private:
    friend PolytropeParams regime_params(const Regime&, double);
    Regime(Kind kind, double nu, double gamma, double alpha)
        : kind_(kind), nu_(nu), gamma_(gamma), alpha_(alpha) {}
    Kind kind_;
    double nu_;
    double gamma_;
    double alpha_;
};

// Maps a regime to concrete polytrope parameters:
//   BCS:    gamma = 5/3, alpha = (3/5)(1/2)(3 pi^2)^(2/3)
//   BEC:    gamma = 2,   alpha = 4 pi nu
//   Custom: as given
PolytropeParams regime_params(const Regime& regime, double lambda_qp);

// Internal energy per particle of a uniform gas at 3D density n3d.
double energy_per_particle(const PolytropeParams& params, double n3d);

// Chemical potential of a cigar cloud of linear density n1 and transverse
// width sigma: (alpha/gamma) (n1 / (pi sigma^2))^(gamma-1).
double chemical_potential_cigar(const PolytropeParams& params, double n1, double sigma);

// Chemical potential of a disk cloud of areal density n1 and axial width
// eta: (alpha/sqrt(gamma)) (n1 / (sqrt(pi) eta))^(gamma-1).
double chemical_potential_disk(const PolytropeParams& params, double n1, double eta);

// Scattering length near a Feshbach resonance:
//   a_s(B) = a_bg (1 - delta / (B - B0)).
// Throws ResonanceDivergence at B == B0.
double feshbach_scattering_length(double a_bg, double delta, double b0, double b);

struct FermiScales {
    double k_fermi;  // (3 pi^2 n)^(1/3)
    double v_fermi;  // equal to k_fermi in trap units
};

FermiScales fermi_scales(double n3d);

}  // namespace polysound
