#include "polysound/polytrope.hpp"

#include <cmath>
#include <numbers>

namespace polysound {

namespace {
constexpr double kPi = std::numbers::pi;

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw DomainError(std::string(name) + " must be finite");
}
}  // namespace

PolytropeParams make_polytrope_params(double gamma, double alpha, double lambda_qp) {
    require_finite(gamma, "gamma");
    require_finite(alpha, "alpha");
    require_finite(lambda_qp, "lambda_qp");
    if (gamma <= 1.0) throw DomainError("gamma must be > 1");
    if (alpha <= 0.0) throw DomainError("alpha must be > 0");
    if (lambda_qp < 0.0) throw DomainError("lambda_qp must be >= 0");
    return PolytropeParams{gamma, alpha, lambda_qp};
}

TrapGeometry make_trap_geometry(GeometryKind kind, double omega_tight) {
    require_finite(omega_tight, "omega_tight");
    if (omega_tight <= 0.0) throw DomainError("omega_tight must be > 0");
    return TrapGeometry{kind, omega_tight, 1.0 / std::sqrt(omega_tight)};
}

TrapGeometry make_trap_geometry(GeometryKind kind, double omega_tight, double char_length) {
    TrapGeometry geom = make_trap_geometry(kind, omega_tight);
    require_finite(char_length, "char_length");
    if (char_length <= 0.0) throw DomainError("char_length must be > 0");
    // In trap units the oscillator length is pinned to the frequency.
    if (std::abs(char_length * std::sqrt(omega_tight) - 1.0) > 1e-12)
        throw DomainError("char_length must equal omega_tight^(-1/2) in trap units");
    geom.char_length = char_length;
    return geom;
}

Regime Regime::bcs() { return Regime(Kind::BCS, 0.0, 0.0, 0.0); }

Regime Regime::bec(double nu) {
    require_finite(nu, "nu");
    if (nu <= 0.0) throw DomainError("nu must be > 0");
    return Regime(Kind::BEC, nu, 0.0, 0.0);
}

Regime Regime::custom(double gamma, double alpha) {
    require_finite(gamma, "gamma");
    require_finite(alpha, "alpha");
    if (gamma <= 1.0) throw DomainError("gamma must be > 1");
    if (alpha <= 0.0) throw DomainError("alpha must be > 0");
    return Regime(Kind::Custom, 0.0, gamma, alpha);
}

double Regime::nu() const {
    if (kind_ != Kind::BEC) throw DomainError("nu is only defined for the BEC regime");
    return nu_;
}

PolytropeParams regime_params(const Regime& regime, double lambda_qp) {
    switch (regime.kind_) {
        case Regime::Kind::BCS:
            // Free-fermion pressure: alpha = (3/5) (hbar^2/2m) (3 pi^2)^(2/3).
            return make_polytrope_params(5.0 / 3.0, 0.3 * std::pow(3.0 * kPi * kPi, 2.0 / 3.0),
                                         lambda_qp);
        case Regime::Kind::BEC:
            return make_polytrope_params(2.0, 4.0 * kPi * regime.nu_, lambda_qp);
        case Regime::Kind::Custom:
            return make_polytrope_params(regime.gamma_, regime.alpha_, lambda_qp);
    }
    throw DomainError("unknown regime");
}

double energy_per_particle(const PolytropeParams& params, double n3d) {
    require_finite(n3d, "n3d");
    if (n3d < 0.0) throw DomainError("n3d must be >= 0");
    return params.alpha / params.gamma * std::pow(n3d, params.gamma - 1.0);
}

double chemical_potential_cigar(const PolytropeParams& params, double n1, double sigma) {
    require_finite(n1, "n1");
    if (n1 < 0.0) throw DomainError("n1 must be >= 0");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be > 0");
    return params.alpha / params.gamma *
           std::pow(n1 / (kPi * sigma * sigma), params.gamma - 1.0);
}

double chemical_potential_disk(const PolytropeParams& params, double n1, double eta) {
    require_finite(n1, "n1");
    if (n1 < 0.0) throw DomainError("n1 must be >= 0");
    if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("eta must be > 0");
    return params.alpha / std::sqrt(params.gamma) *
           std::pow(n1 / (std::sqrt(kPi) * eta), params.gamma - 1.0);
}

double feshbach_scattering_length(double a_bg, double delta, double b0, double b) {
    require_finite(a_bg, "a_bg");
    require_finite(delta, "delta");
    require_finite(b0, "b0");
    require_finite(b, "b");
    if (b == b0) throw ResonanceDivergence("magnetic field sits exactly on the resonance pole");
    return a_bg * (1.0 - delta / (b - b0));
}

FermiScales fermi_scales(double n3d) {
    require_finite(n3d, "n3d");
    if (n3d <= 0.0) throw DomainError("n3d must be > 0");
    const double kf = std::pow(3.0 * kPi * kPi * n3d, 1.0 / 3.0);
    return FermiScales{kf, kf};
}

}  // namespace polysound
