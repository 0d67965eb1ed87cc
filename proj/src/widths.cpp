#include "polysound/widths.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace polysound {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxIterations = 200;

// Width equations for both geometries share the shape
//   w^(p+4) - lam_a4 * w^p - c = 0,  c >= 0, lam_a4 >= 0,
// with p = 2 gamma - 4 (cigar) or gamma - 3 (disk).  On
// [lam_a4^(1/4), infinity) the left side is strictly increasing, so the
// root is unique there.
struct WidthEquation {
    double p;       // low exponent
    double lam_a4;  // lambda * a^4
    double c;       // interaction term
};

double interaction_coeff_cigar(const PolytropeParams& params, const TrapGeometry& geom) {
    const double g = params.gamma;
    const double w2 = geom.omega_tight * geom.omega_tight;
    return 2.0 * params.alpha * (g - 1.0) / (g * g * std::pow(kPi, g - 1.0) * w2);
}

double interaction_coeff_disk(const PolytropeParams& params, const TrapGeometry& geom) {
    const double g = params.gamma;
    const double w2 = geom.omega_tight * geom.omega_tight;
    return 2.0 * params.alpha * (g - 1.0) /
           (std::pow(g, 1.5) * std::pow(kPi, (g - 1.0) / 2.0) * w2);
}

// Printed form, used for the reported residual.
double residual_at(const WidthEquation& eq, double w) {
    return std::pow(w, eq.p + 4.0) - eq.lam_a4 * std::pow(w, eq.p) - eq.c;
}

// Factored form w^p (w^4 - lam_a4) - c avoids inf - inf for large w.
double factored_at(const WidthEquation& eq, double w) {
    const double w2 = w * w;
    return std::pow(w, eq.p) * (w2 * w2 - eq.lam_a4) - eq.c;
}

double derivative_at(const WidthEquation& eq, double w) {
    const double w2 = w * w;
    return std::pow(w, eq.p - 1.0) * ((eq.p + 4.0) * w2 * w2 - eq.p * eq.lam_a4);
}

WidthSolution solve_width_equation(const WidthEquation& eq) {
    if (!std::isfinite(eq.c))
        throw ConvergenceFailure("width equation interaction term overflows double range");

    if (eq.lam_a4 == 0.0) {
        if (eq.c == 0.0)
            throw DegenerateInput(
                "width equation has no positive root: lambda = 0 and vanishing interaction term");
        const double w = std::pow(eq.c, 1.0 / (eq.p + 4.0));
        return WidthSolution{w, residual_at(eq, w), 0, WidthBranch::Full};
    }

    const double floor = std::pow(eq.lam_a4, 0.25);
    if (eq.c == 0.0) return WidthSolution{floor, residual_at(eq, floor), 0, WidthBranch::Full};

    double lo = floor;  // f(lo) = -c < 0
    double hi = std::max(2.0 * lo, 1.5 * std::pow(eq.c, 1.0 / (eq.p + 4.0)));
    int growths = 0;
    while (!(factored_at(eq, hi) > 0.0)) {
        hi *= 2.0;
        if (++growths > 1100)
            throw ConvergenceFailure("width equation bracket search failed to enclose a root");
    }

    // Safeguarded Newton: fall back to bisection whenever the Newton step
    // leaves the bracket or fails to shrink it fast enough.
    double x = 0.5 * (lo + hi);
    double dx_old = hi - lo;
    double dx = dx_old;
    double f = factored_at(eq, x);
    double df = derivative_at(eq, x);
    int iter = 0;
    for (; iter < kMaxIterations; ++iter) {
        const bool newton_bad =
            ((x - hi) * df - f) * ((x - lo) * df - f) > 0.0 ||
            std::abs(2.0 * f) > std::abs(dx_old * df);
        if (newton_bad) {
            dx_old = dx;
            dx = 0.5 * (hi - lo);
            x = lo + dx;
            if (x == lo) break;
        } else {
            dx_old = dx;
            dx = f / df;
            const double tmp = x;
            x -= dx;
            if (tmp == x) break;
        }
        if (std::abs(dx) < 1e-15 * x) break;
        f = factored_at(eq, x);
        df = derivative_at(eq, x);
        if (f == 0.0) break;
        if (f < 0.0)
            lo = x;
        else
            hi = x;
    }
    if (iter >= kMaxIterations)
        throw ConvergenceFailure("width equation root refinement exceeded the iteration cap");
    return WidthSolution{x, residual_at(eq, x), iter + 1, WidthBranch::Full};
}

void check_density(double n_eq) {
    if (!std::isfinite(n_eq)) throw DomainError("n_eq must be finite");
    if (n_eq < 0.0) throw DomainError("n_eq must be >= 0");
}

WidthEquation cigar_equation(const PolytropeParams& params, const TrapGeometry& geom,
                             double interaction_factor) {
    const double a = geom.char_length;
    const double a2 = a * a;
    return WidthEquation{2.0 * params.gamma - 4.0, params.lambda_qp * a2 * a2,
                         interaction_coeff_cigar(params, geom) * interaction_factor};
}

WidthEquation disk_equation(const PolytropeParams& params, const TrapGeometry& geom,
                            double interaction_factor) {
    const double a = geom.char_length;
    const double a2 = a * a;
    return WidthEquation{params.gamma - 3.0, params.lambda_qp * a2 * a2,
                         interaction_coeff_disk(params, geom) * interaction_factor};
}

void require_kind(const TrapGeometry& geom, GeometryKind kind, const char* what) {
    if (geom.kind != kind) throw DomainError(std::string(what) + ": wrong trap geometry");
}

}  // namespace

DensityProfile make_density_profile(std::vector<double> positions, std::vector<double> values) {
    if (positions.size() != values.size())
        throw DomainError("density profile: positions and values differ in length");
    if (positions.size() < 2) throw DomainError("density profile needs at least two samples");
    const double spacing =
        (positions.back() - positions.front()) / static_cast<double>(positions.size() - 1);
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw DomainError("density profile positions must be strictly increasing");
    for (std::size_t i = 0; i + 1 < positions.size(); ++i) {
        const double step = positions[i + 1] - positions[i];
        if (!(step > 0.0))
            throw DomainError("density profile positions must be strictly increasing");
        if (std::abs(step - spacing) > 1e-12 * std::max(1.0, std::abs(spacing)))
            throw DomainError("density profile spacing is not uniform");
    }
    for (double v : values) {
        if (!std::isfinite(v) || v < 0.0)
            throw DomainError("density profile values must be finite and >= 0");
    }
    return DensityProfile{std::move(positions), std::move(values), spacing};
}

double cigar_width_residual(const PolytropeParams& params, const TrapGeometry& geom,
                            double sigma, double n_eq) {
    require_kind(geom, GeometryKind::Cigar, "cigar_width_residual");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be > 0");
    check_density(n_eq);
    return residual_at(cigar_equation(params, geom, std::pow(n_eq, params.gamma - 1.0)), sigma);
}

double disk_width_residual(const PolytropeParams& params, const TrapGeometry& geom,
                           double eta, double n_eq) {
    require_kind(geom, GeometryKind::Disk, "disk_width_residual");
    if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("eta must be > 0");
    check_density(n_eq);
    return residual_at(disk_equation(params, geom, std::pow(n_eq, params.gamma - 1.0)), eta);
}

WidthSolution solve_cigar_width(const PolytropeParams& params, const TrapGeometry& geom,
                                double n_eq) {
    require_kind(geom, GeometryKind::Cigar, "solve_cigar_width");
    check_density(n_eq);
    return solve_width_equation(cigar_equation(params, geom, std::pow(n_eq, params.gamma - 1.0)));
}

WidthSolution solve_disk_width(const PolytropeParams& params, const TrapGeometry& geom,
                               double n_eq) {
    require_kind(geom, GeometryKind::Disk, "solve_disk_width");
    check_density(n_eq);
    return solve_width_equation(disk_equation(params, geom, std::pow(n_eq, params.gamma - 1.0)));
}

double asymptotic_width_3d(const PolytropeParams& params, const TrapGeometry& geom, double n_eq) {
    if (!std::isfinite(n_eq) || n_eq <= 0.0)
        throw DomainError("asymptotic_width_3d requires n_eq > 0");
    const double factor = std::pow(n_eq, params.gamma - 1.0);
    if (geom.kind == GeometryKind::Cigar) {
        const double c = interaction_coeff_cigar(params, geom) * factor;
        return std::pow(c, 1.0 / (2.0 * params.gamma));
    }
    const double c = interaction_coeff_disk(params, geom) * factor;
    return std::pow(c, 1.0 / (params.gamma + 1.0));
}

double profile_moment_ratio(const DensityProfile& profile, double gamma) {
    if (!(gamma > 1.0) || !std::isfinite(gamma)) throw DomainError("gamma must be > 1");
    double i1 = 0.0;
    double ig = 0.0;
    const std::size_t n = profile.values.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        i1 += w * profile.values[i];
        ig += w * std::pow(profile.values[i], gamma);
    }
    if (i1 == 0.0) throw DegenerateInput("profile_moment_ratio: profile carries no mass");
    return ig / i1;
}

WidthSolution variational_width(const PolytropeParams& params, const TrapGeometry& geom,
                                double moment_ratio) {
    if (!std::isfinite(moment_ratio) || moment_ratio < 0.0)
        throw DomainError("moment_ratio must be >= 0");
    if (geom.kind == GeometryKind::Cigar)
        return solve_width_equation(cigar_equation(params, geom, moment_ratio));
    return solve_width_equation(disk_equation(params, geom, moment_ratio));
}

}  // namespace polysound
