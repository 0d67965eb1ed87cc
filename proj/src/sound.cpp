#include "polysound/sound.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace polysound {

namespace {
constexpr double kPi = std::numbers::pi;

void check_density(double n, const char* name) {
    if (!std::isfinite(n)) throw DomainError(std::string(name) + " must be finite");
    if (n < 0.0) throw DomainError(std::string(name) + " must be >= 0");
}

std::string format_density(double n) {
    std::ostringstream os;
    os.precision(17);
    os << n;
    return os.str();
}
}  // namespace

double sound_uniform_3d(const PolytropeParams& params, double n3d) {
    check_density(n3d, "n3d");
    return std::sqrt(params.alpha * (params.gamma - 1.0) * std::pow(n3d, params.gamma - 1.0));
}

double sound_cigar(const PolytropeParams& params, double n_eq, double sigma) {
    check_density(n_eq, "n_eq");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be > 0");
    const double g = params.gamma;
    return std::sqrt(params.alpha * (g - 1.0) / g) *
           std::pow(n_eq / (kPi * sigma * sigma), (g - 1.0) / 2.0);
}

double sound_disk(const PolytropeParams& params, double n_eq, double eta) {
    check_density(n_eq, "n_eq");
    if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("eta must be > 0");
    const double g = params.gamma;
    return std::sqrt(params.alpha * (g - 1.0) / std::sqrt(g)) *
           std::pow(n_eq / (std::sqrt(kPi) * eta), (g - 1.0) / 2.0);
}

double sound_from_width(const TrapGeometry& geom, double gamma, double lambda_qp, double width) {
    if (!(gamma > 1.0) || !std::isfinite(gamma)) throw DomainError("gamma must be > 1");
    if (!(lambda_qp >= 0.0) || !std::isfinite(lambda_qp))
        throw DomainError("lambda_qp must be >= 0");
    if (!(width > 0.0) || !std::isfinite(width)) throw DomainError("width must be > 0");
    const double a2 = geom.char_length * geom.char_length;
    const double lam_a4 = lambda_qp * a2 * a2;
    double gap = width * width * width * width - lam_a4;
    // A width equal to the gradient-correction floor can round a hair below
    // it; treat that as exactly critical rather than subcritical.
    if (gap < 0.0 && gap >= -8.0 * 2.2204460492503131e-16 * lam_a4) gap = 0.0;
    if (gap < 0.0)
        throw SubcriticalWidth("width lies below the gradient-correction floor lambda^(1/4) a");
    return geom.omega_tight * std::sqrt(gamma * gap / 2.0) / width;
}

DispersionResult dispersion_omega(double c_s, double lambda_qp, double k) {
    if (!(c_s >= 0.0) || !std::isfinite(c_s)) throw DomainError("c_s must be >= 0");
    if (!(lambda_qp >= 0.0) || !std::isfinite(lambda_qp))
        throw DomainError("lambda_qp must be >= 0");
    if (!(k >= 0.0) || !std::isfinite(k)) throw DomainError("k must be >= 0");
    if (c_s == 0.0 && lambda_qp > 0.0)
        return DispersionResult{0.5 * std::sqrt(lambda_qp) * k * k, true};
    if (lambda_qp == 0.0) return DispersionResult{c_s * k, false};
    return DispersionResult{k * std::sqrt(c_s * c_s + 0.25 * lambda_qp * k * k), false};
}

std::vector<SweepRow> sweep_sound_curve(const PolytropeParams& params, const TrapGeometry& geom,
                                        const std::vector<double>& densities) {
    for (std::size_t i = 0; i < densities.size(); ++i) {
        if (!std::isfinite(densities[i]) || densities[i] <= 0.0)
            throw DomainError("sweep densities must be finite and > 0");
        if (i > 0 && !(densities[i] > densities[i - 1]))
            throw DomainError("sweep densities must be strictly increasing");
    }

    const bool cigar = geom.kind == GeometryKind::Cigar;
    std::vector<SweepRow> rows;
    rows.reserve(densities.size());
    for (double n : densities) {
        try {
            const double width = cigar ? solve_cigar_width(params, geom, n).width
                                       : solve_disk_width(params, geom, n).width;
            const double w3d = asymptotic_width_3d(params, geom, n);
            const double cs_num = cigar ? sound_cigar(params, n, width) : sound_disk(params, n, width);
            const double cs_low = cigar ? sound_cigar(params, n, geom.char_length)
                                        : sound_disk(params, n, geom.char_length);
            const double cs_3d = cigar ? sound_cigar(params, n, w3d) : sound_disk(params, n, w3d);
            rows.push_back(SweepRow{n, width, cs_num, cs_low, cs_3d});
        } catch (const ConvergenceFailure& e) {
            throw ConvergenceFailure("n_eq=" + format_density(n) + ": " + e.what());
        } catch (const Error& e) {
            throw Error("n_eq=" + format_density(n) + ": " + e.what());
        }
    }
    return rows;
}

std::vector<double> log_spaced_densities(double lo, double hi, int count) {
    if (!(lo > 0.0) || !std::isfinite(lo) || !std::isfinite(hi))
        throw DomainError("log grid bounds must be finite and > 0");
    if (count < 1) throw DomainError("log grid needs at least one point");
    if (count == 1) {
        if (lo != hi) throw DomainError("single-point grid requires lo == hi");
        return {lo};
    }
    if (!(hi > lo)) throw DomainError("log grid requires hi > lo");
    std::vector<double> grid(static_cast<std::size_t>(count));
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    for (int i = 0; i < count; ++i)
        grid[static_cast<std::size_t>(i)] = std::exp(llo + (lhi - llo) * i / (count - 1));
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

std::vector<double> default_density_grid() { return log_spaced_densities(1e-4, 1e4, 200); }

}  // namespace polysound
