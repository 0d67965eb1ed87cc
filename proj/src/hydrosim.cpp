#include "polysound/hydrosim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "polysound/sound.hpp"
#include "polysound/widths.hpp"

namespace polysound {

namespace {

constexpr double kPi = std::numbers::pi;

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw DomainError(std::string(name) + " must be finite");
}

// Periodic stencil application: fast interior loop, wrapped edges.
template <std::size_t HalfWidth>
void apply_stencil(std::span<const double> f, double scale,
                   const std::array<double, 2 * HalfWidth + 1>& coeff,
                   std::vector<double>& out) {
    const std::size_t n = f.size();
    if (n < 2 * HalfWidth + 1) throw DomainError("grid too small for the difference stencil");
    out.resize(n);
    for (std::size_t i = HalfWidth; i + HalfWidth < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= 2 * HalfWidth; ++j) acc += coeff[j] * f[i - HalfWidth + j];
        out[i] = acc * scale;
    }
    auto wrapped = [&](std::size_t i) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= 2 * HalfWidth; ++j)
            acc += coeff[j] * f[(i + n - HalfWidth + j) % n];
        out[i] = acc * scale;
    };
    for (std::size_t i = 0; i < HalfWidth; ++i) wrapped(i);
    for (std::size_t i = n - HalfWidth; i < n; ++i) wrapped(i);
}

// Fourth-order central coefficients.
const std::array<double, 5> kD1{1.0, -8.0, 0.0, 8.0, -1.0};
const std::array<double, 5> kD2{-1.0, 16.0, -30.0, 16.0, -1.0};
const std::array<double, 7> kD3{1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0};

void d1_into(std::span<const double> f, double dz, std::vector<double>& out) {
    apply_stencil<2>(f, 1.0 / (12.0 * dz), kD1, out);
}
void d2_into(std::span<const double> f, double dz, std::vector<double>& out) {
    apply_stencil<2>(f, 1.0 / (12.0 * dz * dz), kD2, out);
}
void d3_into(std::span<const double> f, double dz, std::vector<double>& out) {
    apply_stencil<3>(f, 1.0 / (8.0 * dz * dz * dz), kD3, out);
}

void check_positive_density(std::span<const double> n) {
    for (double v : n) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw DensityFloorViolation("density reached the floor (n1 <= 0)");
    }
}

struct RhsWorkspace {
    std::vector<double> flux, bern, nd1, nd2, nd3;
};

// Shared evaluation core so the integrator can reuse buffers and the frozen
// width is solved once per run, not once per call.
void rhs_into(std::span<const double> n, std::span<const double> v,
              const PolytropeParams& params, const TrapGeometry& geom,
              const SimSettings& settings, double frozen_width, double dz,
              std::vector<double>& dn, std::vector<double>& dv, RhsWorkspace& ws) {
    const std::size_t N = n.size();
    check_positive_density(n);

    ws.flux.resize(N);
    for (std::size_t i = 0; i < N; ++i) ws.flux[i] = n[i] * v[i];
    d1_into(ws.flux, dz, dn);
    for (std::size_t i = 0; i < N; ++i) dn[i] = -dn[i];

    const bool cigar = geom.kind == GeometryKind::Cigar;
    const double g = params.gamma;
    const double em1 = g - 1.0;
    const bool frozen = settings.width_mode == WidthMode::FrozenAtEquilibrium;
    double mu_coeff = 0.0;
    double inv_scale = 0.0;
    if (frozen) {
        if (cigar) {
            mu_coeff = params.alpha / g;
            inv_scale = 1.0 / (kPi * frozen_width * frozen_width);
        } else {
            mu_coeff = params.alpha / std::sqrt(g);
            inv_scale = 1.0 / (std::sqrt(kPi) * frozen_width);
        }
    }
    const bool linear_mu = em1 == 1.0;
    // gamma = 5/3 parses to a power two ulps off 2/3 after the subtraction;
    // match that exact constant so the common case avoids pow in the hot loop.
    const bool cbrt_mu = em1 == 5.0 / 3.0 - 1.0;
    const double* V =
        settings.external_potential.empty() ? nullptr : settings.external_potential.data();

    ws.bern.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        double mu;
        if (frozen) {
            const double x = n[i] * inv_scale;
            mu = linear_mu ? mu_coeff * x
                 : cbrt_mu ? mu_coeff * std::cbrt(x * x)
                           : mu_coeff * std::pow(x, em1);
        } else if (cigar) {
            const double w = solve_cigar_width(params, geom, n[i]).width;
            mu = chemical_potential_cigar(params, n[i], w);
        } else {
            const double w = solve_disk_width(params, geom, n[i]).width;
            mu = chemical_potential_disk(params, n[i], w);
        }
        ws.bern[i] = 0.5 * v[i] * v[i] + (V ? V[i] : 0.0) + mu;
    }
    d1_into(ws.bern, dz, dv);
    for (std::size_t i = 0; i < N; ++i) dv[i] = -dv[i];

    const double lam = params.lambda_qp;
    if (lam > 0.0) {
        d1_into(n, dz, ws.nd1);
        d2_into(n, dz, ws.nd2);
        d3_into(n, dz, ws.nd3);
        for (std::size_t i = 0; i < N; ++i) {
            const double ni = n[i];
            const double d1 = ws.nd1[i];
            dv[i] += lam * (0.25 * ws.nd3[i] / ni) -
                     d1 * (0.5 * lam * ws.nd2[i] / (ni * ni) -
                           0.25 * lam * d1 * d1 / (ni * ni * ni));
        }
    }
}

void check_state_shape(const HydroState& state) {
    if (state.points < 16) throw DomainError("hydro grid needs at least 16 points");
    if (state.n1.size() != state.points || state.v.size() != state.points)
        throw DomainError("hydro state field lengths disagree with points");
    if (!(state.grid_length > 0.0) || !std::isfinite(state.grid_length))
        throw DomainError("grid_length must be > 0");
}

double solve_frozen_width(const PolytropeParams& params, const TrapGeometry& geom, double n_ref) {
    return geom.kind == GeometryKind::Cigar ? solve_cigar_width(params, geom, n_ref).width
                                            : solve_disk_width(params, geom, n_ref).width;
}

// Linear least squares of x against {cos(w t), sin(w t), 1}.
struct ToneFit {
    double a, b, c, rss;
};

ToneFit fit_tone(const std::vector<double>& t, const std::vector<double>& x, double w) {
    double scc = 0, scs = 0, sc1 = 0, sss = 0, ss1 = 0, s11 = 0;
    double sxc = 0, sxs = 0, sx1 = 0;
    const std::size_t n = t.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double c = std::cos(w * t[i]);
        const double s = std::sin(w * t[i]);
        scc += c * c;
        scs += c * s;
        sc1 += c;
        sss += s * s;
        ss1 += s;
        s11 += 1.0;
        sxc += x[i] * c;
        sxs += x[i] * s;
        sx1 += x[i];
    }
    // 3x3 Gaussian elimination with partial pivoting.
    double m[3][4] = {{scc, scs, sc1, sxc}, {scs, sss, ss1, sxs}, {sc1, ss1, s11, sx1}};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        std::swap(m[col], m[piv]);
        const double d = m[col][col];
        if (d == 0.0) return ToneFit{0, 0, 0, std::numeric_limits<double>::infinity()};
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double factor = m[r][col] / d;
            for (int cc = col; cc < 4; ++cc) m[r][cc] -= factor * m[col][cc];
        }
    }
    ToneFit fit{m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2], 0.0};
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r =
            x[i] - (fit.a * std::cos(w * t[i]) + fit.b * std::sin(w * t[i]) + fit.c);
        rss += r * r;
    }
    fit.rss = rss;
    return fit;
}

}  // namespace

double cfl_cap(double dx, double lambda_qp, double c_max) {
    if (!(dx > 0.0) || !std::isfinite(dx)) throw DomainError("dx must be > 0");
    if (!(lambda_qp >= 0.0) || !std::isfinite(lambda_qp))
        throw DomainError("lambda_qp must be >= 0");
    if (!(c_max >= 0.0) || !std::isfinite(c_max)) throw DomainError("c_max must be >= 0");
    double cap = std::numeric_limits<double>::infinity();
    if (c_max > 0.0) cap = dx / c_max;
    if (lambda_qp > 0.0) cap = std::min(cap, 2.0 * dx * dx / std::sqrt(lambda_qp));
    return 0.2 * cap;
}

HydroState init_standing_wave(double n_eq, double epsilon, double k, std::size_t points,
                              double grid_length) {
    require_finite(n_eq, "n_eq");
    require_finite(epsilon, "epsilon");
    require_finite(k, "k");
    require_finite(grid_length, "grid_length");
    if (!(n_eq > 0.0)) throw DomainError("n_eq must be > 0");
    if (epsilon < 0.0 || epsilon > 1e-2) throw DomainError("epsilon must lie in [0, 1e-2]");
    if (!(k >= 0.0)) throw DomainError("k must be >= 0");
    if (points < 16) throw DomainError("points must be >= 16");
    if (!(grid_length > 0.0)) throw DomainError("grid_length must be > 0");
    const double cycles = k * grid_length / (2.0 * kPi);
    if (std::abs(cycles - std::round(cycles)) > 1e-9 * std::max(1.0, std::abs(cycles)))
        throw DomainError("k does not fit the periodic box (k L / 2 pi must be an integer)");

    HydroState state{grid_length, points, std::vector<double>(points),
                     std::vector<double>(points, 0.0), 0.0};
    const double dz = state.dz();
    for (std::size_t j = 0; j < points; ++j)
        state.n1[j] = n_eq * (1.0 + epsilon * std::cos(k * (static_cast<double>(j) * dz)));
    return state;
}

HydroState init_gaussian_pulse(double n_eq, double epsilon, double z0, double w,
                               std::size_t points, double grid_length) {
    require_finite(n_eq, "n_eq");
    require_finite(epsilon, "epsilon");
    require_finite(z0, "z0");
    require_finite(w, "w");
    require_finite(grid_length, "grid_length");
    if (!(n_eq > 0.0)) throw DomainError("n_eq must be > 0");
    if (epsilon < 0.0) throw DomainError("epsilon must be >= 0");
    if (points < 16) throw DomainError("points must be >= 16");
    if (!(grid_length > 0.0)) throw DomainError("grid_length must be > 0");
    if (z0 < 0.0 || z0 > grid_length) throw DomainError("z0 must lie inside the box");

    HydroState state{grid_length, points, std::vector<double>(points),
                     std::vector<double>(points, 0.0), 0.0};
    const double dz = state.dz();
    if (!(w >= 5.0 * dz)) throw DomainError("pulse width under-resolved (w < 5 dz)");
    const double edge_dist = std::min(z0, grid_length - z0);
    if (std::exp(-edge_dist * edge_dist / (w * w)) >= 1e-12)
        throw DomainError("pulse tail exceeds 1e-12 at the box edge");

    for (std::size_t j = 0; j < points; ++j) {
        const double z = static_cast<double>(j) * dz;
        state.n1[j] = n_eq * (1.0 + epsilon * std::exp(-(z - z0) * (z - z0) / (w * w)));
    }
    return state;
}

std::vector<double> periodic_d1(std::span<const double> f, double dz) {
    if (!(dz > 0.0) || !std::isfinite(dz)) throw DomainError("dz must be > 0");
    std::vector<double> out;
    d1_into(f, dz, out);
    return out;
}

std::vector<double> periodic_d2(std::span<const double> f, double dz) {
    if (!(dz > 0.0) || !std::isfinite(dz)) throw DomainError("dz must be > 0");
    std::vector<double> out;
    d2_into(f, dz, out);
    return out;
}

std::vector<double> periodic_d3(std::span<const double> f, double dz) {
    if (!(dz > 0.0) || !std::isfinite(dz)) throw DomainError("dz must be > 0");
    std::vector<double> out;
    d3_into(f, dz, out);
    return out;
}

std::vector<double> quantum_pressure_force(std::span<const double> n, double dz,
                                           double lambda_qp) {
    if (!(dz > 0.0) || !std::isfinite(dz)) throw DomainError("dz must be > 0");
    if (!(lambda_qp >= 0.0) || !std::isfinite(lambda_qp))
        throw DomainError("lambda_qp must be >= 0");
    if (lambda_qp == 0.0) return std::vector<double>(n.size(), 0.0);
    check_positive_density(n);
    std::vector<double> d1, d2, d3;
    d1_into(n, dz, d1);
    d2_into(n, dz, d2);
    d3_into(n, dz, d3);
    std::vector<double> out(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) {
        const double ni = n[i];
        out[i] = lambda_qp * (0.25 * d3[i] / ni) -
                 d1[i] * (0.5 * lambda_qp * d2[i] / (ni * ni) -
                          0.25 * lambda_qp * d1[i] * d1[i] / (ni * ni * ni));
    }
    return out;
}

std::vector<double> bohm_force(std::span<const double> n, double dz, double lambda_qp) {
    if (!(dz > 0.0) || !std::isfinite(dz)) throw DomainError("dz must be > 0");
    if (!(lambda_qp >= 0.0) || !std::isfinite(lambda_qp))
        throw DomainError("lambda_qp must be >= 0");
    if (lambda_qp == 0.0) return std::vector<double>(n.size(), 0.0);
    check_positive_density(n);
    std::vector<double> s(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) s[i] = std::sqrt(n[i]);
    std::vector<double> d2s;
    d2_into(s, dz, d2s);
    for (std::size_t i = 0; i < n.size(); ++i) d2s[i] /= s[i];
    std::vector<double> out;
    d1_into(d2s, dz, out);
    for (double& v : out) v *= 0.5 * lambda_qp;
    return out;
}

HydroRhs rhs_eval(const HydroState& state, const PolytropeParams& params,
                  const TrapGeometry& geom, const SimSettings& settings, double n_eq_ref) {
    check_state_shape(state);
    require_finite(n_eq_ref, "n_eq_ref");
    if (n_eq_ref < 0.0) throw DomainError("n_eq_ref must be >= 0");
    if (!settings.external_potential.empty() &&
        settings.external_potential.size() != state.points)
        throw DomainError("external potential sample count disagrees with the grid");

    double frozen_width = 0.0;
    if (settings.width_mode == WidthMode::FrozenAtEquilibrium)
        frozen_width = solve_frozen_width(params, geom, n_eq_ref);

    HydroRhs rhs;
    RhsWorkspace ws;
    rhs_into(state.n1, state.v, params, geom, settings, frozen_width, state.dz(), rhs.dn_dt,
             rhs.dv_dt, ws);
    return rhs;
}

ProbeSeries integrate_run(HydroState state, const PolytropeParams& params,
                          const TrapGeometry& geom, const SimSettings& settings,
                          double probe_k) {
    check_state_shape(state);
    require_finite(probe_k, "probe_k");
    if (probe_k < 0.0) throw DomainError("probe_k must be >= 0");
    if (!(settings.dt > 0.0) || !std::isfinite(settings.dt))
        throw DomainError("dt must be > 0");
    if (settings.steps < 1) throw DomainError("steps must be >= 1");
    if (settings.record_every < 1) throw DomainError("record_every must be >= 1");
    if (!settings.external_potential.empty() &&
        settings.external_potential.size() != state.points)
        throw DomainError("external potential sample count disagrees with the grid");

    const std::size_t N = state.points;
    const double dz = state.dz();
    check_positive_density(state.n1);

    // Reference density for the frozen width and the CFL sound speed.
    double mass0 = 0.0;
    for (double v : state.n1) mass0 += v;
    mass0 *= dz;
    const double n_ref = mass0 / state.grid_length;

    double frozen_width = 0.0;
    double c_ref = 0.0;
    {
        const double w = solve_frozen_width(params, geom, n_ref);
        if (settings.width_mode == WidthMode::FrozenAtEquilibrium) frozen_width = w;
        c_ref = geom.kind == GeometryKind::Cigar ? sound_cigar(params, n_ref, w)
                                                 : sound_disk(params, n_ref, w);
    }
    const double cap = cfl_cap(dz, params.lambda_qp, c_ref);
    if (!(settings.dt <= cap)) {
        std::ostringstream os;
        os.precision(17);
        os << "dt=" << settings.dt << " exceeds the CFL cap " << cap;
        throw DomainError(os.str());
    }

    // Probe tables.
    std::vector<double> ck(N), sk(N);
    for (std::size_t j = 0; j < N; ++j) {
        const double z = static_cast<double>(j) * dz;
        ck[j] = std::cos(probe_k * z);
        sk[j] = std::sin(probe_k * z);
    }

    // Window anchor for the peak probe: the position of the initial maximum.
    std::size_t i_ref = 0;
    for (std::size_t j = 1; j < N; ++j)
        if (state.n1[j] > state.n1[i_ref]) i_ref = j;

    // Instability references.
    double amp0 = 0.0;
    for (double v : state.n1) amp0 = std::max(amp0, std::abs(v - n_ref));
    const double amp_limit = amp0 > 1e-12 * n_ref ? 10.0 * amp0 : n_ref;

    ProbeSeries series;
    auto record = [&]() {
        double mass = 0.0, re = 0.0, im = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            mass += state.n1[j];
            re += state.n1[j] * ck[j];
            im -= state.n1[j] * sk[j];
        }
        series.times.push_back(state.time);
        series.mass.push_back(mass * dz);
        series.mode_amplitude.emplace_back(re * dz, im * dz);

        std::size_t jm = i_ref;
        for (std::size_t j = i_ref + 1; j < N; ++j)
            if (state.n1[j] > state.n1[jm]) jm = j;
        const double ym = state.n1[(jm + N - 1) % N];
        const double y0 = state.n1[jm];
        const double yp = state.n1[(jm + 1) % N];
        const double denom = ym - 2.0 * y0 + yp;
        double off = denom != 0.0 ? 0.5 * (ym - yp) / denom : 0.0;
        off = std::clamp(off, -0.5, 0.5);
        series.peak_position.push_back((static_cast<double>(jm) + off) * dz);
    };

    auto check_stability = [&]() {
        double mass = 0.0, amp = 0.0, nmin = state.n1[0];
        for (double v : state.n1) {
            mass += v;
            amp = std::max(amp, std::abs(v - n_ref));
            nmin = std::min(nmin, v);
        }
        mass *= dz;
        std::ostringstream os;
        os.precision(6);
        if (!std::isfinite(mass) || !std::isfinite(amp)) {
            os << "non-finite fields at t=" << state.time;
            throw SimulationUnstable(os.str());
        }
        if (nmin <= 0.0) {
            os << "density reached the floor at t=" << state.time << " (min n1 = " << nmin
               << ")";
            throw DensityFloorViolation(os.str());
        }
        if (std::abs(mass / mass0 - 1.0) > 1e-6) {
            os << "mass drifted by " << mass / mass0 - 1.0 << " at t=" << state.time;
            throw SimulationUnstable(os.str());
        }
        if (amp > amp_limit) {
            os << "amplitude grew to " << amp << " (limit " << amp_limit << ") at t="
               << state.time;
            throw SimulationUnstable(os.str());
        }
    };

    record();
    check_stability();

    RhsWorkspace ws;
    std::vector<double> k1n, k1v, k2n, k2v, k3n, k3v, k4n, k4v;
    std::vector<double> tn(N), tv(N);
    const double dt = settings.dt;
    const double t0 = state.time;

    for (long step = 1; step <= settings.steps; ++step) {
        rhs_into(state.n1, state.v, params, geom, settings, frozen_width, dz, k1n, k1v, ws);
        for (std::size_t i = 0; i < N; ++i) {
            tn[i] = state.n1[i] + 0.5 * dt * k1n[i];
            tv[i] = state.v[i] + 0.5 * dt * k1v[i];
        }
        rhs_into(tn, tv, params, geom, settings, frozen_width, dz, k2n, k2v, ws);
        for (std::size_t i = 0; i < N; ++i) {
            tn[i] = state.n1[i] + 0.5 * dt * k2n[i];
            tv[i] = state.v[i] + 0.5 * dt * k2v[i];
        }
        rhs_into(tn, tv, params, geom, settings, frozen_width, dz, k3n, k3v, ws);
        for (std::size_t i = 0; i < N; ++i) {
            tn[i] = state.n1[i] + dt * k3n[i];
            tv[i] = state.v[i] + dt * k3v[i];
        }
        rhs_into(tn, tv, params, geom, settings, frozen_width, dz, k4n, k4v, ws);
        for (std::size_t i = 0; i < N; ++i) {
            state.n1[i] += dt / 6.0 * (k1n[i] + 2.0 * k2n[i] + 2.0 * k3n[i] + k4n[i]);
            state.v[i] += dt / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
        }
        state.time = t0 + static_cast<double>(step) * dt;

        if (step % settings.record_every == 0) {
            record();
            check_stability();
        } else if (step % 100 == 0) {
            check_stability();
        }
    }
    return series;
}

ModeFrequencyFit measure_mode_frequency(const ProbeSeries& series) {
    const std::vector<double>& t = series.times;
    const std::size_t n = t.size();
    if (n != series.mode_amplitude.size())
        throw DomainError("probe series fields differ in length");
    if (n < 8) throw InsufficientData("too few samples to fit a frequency");

    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = series.mode_amplitude[i].real();

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double amp = 0.0;
    for (double v : x) amp = std::max(amp, std::abs(v - mean));
    if (amp <= 1e-12 * std::max(1.0, std::abs(mean)))
        throw InsufficientData("mode amplitude is constant");

    // Zero crossings of the demeaned signal give the seed frequency.  A gap
    // filter absorbs noise flicker near the axis.
    std::vector<double> tc;
    const double min_gap = (t.back() - t.front()) * 0.01;
    for (std::size_t i = 1; i < n; ++i) {
        const double y0 = x[i - 1] - mean;
        const double y1 = x[i] - mean;
        if ((y0 < 0.0 && y1 >= 0.0) || (y0 > 0.0 && y1 <= 0.0)) {
            const double tz = t[i - 1] + (t[i] - t[i - 1]) * (-y0) / (y1 - y0);
            if (tc.empty() || tz - tc.back() > min_gap) tc.push_back(tz);
        }
    }
    if (tc.size() < 6)
        throw InsufficientData("series spans fewer than three oscillation periods");
    const double w_seed =
        kPi * static_cast<double>(tc.size() - 1) / (tc.back() - tc.front());

    // Golden-section minimization of the fit residual over omega.  The
    // linear subproblem (amplitude, phase, offset) is solved exactly at
    // each candidate, so the residual vanishes at the true tone.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.75 * w_seed;
    double hi = 1.30 * w_seed;
    double w1 = hi - gr * (hi - lo);
    double w2 = lo + gr * (hi - lo);
    double f1 = fit_tone(t, x, w1).rss;
    double f2 = fit_tone(t, x, w2).rss;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * w_seed; ++it) {
        if (f1 < f2) {
            hi = w2;
            w2 = w1;
            f2 = f1;
            w1 = hi - gr * (hi - lo);
            f1 = fit_tone(t, x, w1).rss;
        } else {
            lo = w1;
            w1 = w2;
            f1 = f2;
            w2 = lo + gr * (hi - lo);
            f2 = fit_tone(t, x, w2).rss;
        }
    }
    const double w_hat = 0.5 * (lo + hi);
    const ToneFit fit = fit_tone(t, x, w_hat);
    return ModeFrequencyFit{w_hat, std::hypot(fit.a, fit.b), std::atan2(-fit.b, fit.a),
                            std::sqrt(fit.rss / static_cast<double>(n))};
}

double measure_pulse_speed(const ProbeSeries& series) {
    const std::vector<double>& t = series.times;
    const std::vector<double>& z = series.peak_position;
    const std::size_t n = t.size();
    if (n != z.size()) throw DomainError("probe series fields differ in length");
    if (n < 5) throw InvalidWindow("too few samples to fit a pulse speed");

    // Trailing 60% of the samples: the split transient near t = 0 is over
    // and the right-moving peak should advance monotonically.
    const std::size_t i0 = (n * 2) / 5;
    double zmax = 0.0;
    for (std::size_t i = i0; i < n; ++i) zmax = std::max(zmax, std::abs(z[i]));
    const double tol = 1e-9 * std::max(1.0, zmax);
    for (std::size_t i = i0 + 1; i < n; ++i) {
        if (z[i] < z[i - 1] - tol)
            throw InvalidWindow("peak trajectory not monotone (wrapped or reflected pulse)");
    }
    if (!(z[n - 1] - z[i0] > tol)) throw InvalidWindow("peak is not advancing");

    double tbar = 0.0, zbar = 0.0;
    const double count = static_cast<double>(n - i0);
    for (std::size_t i = i0; i < n; ++i) {
        tbar += t[i];
        zbar += z[i];
    }
    tbar /= count;
    zbar /= count;
    double num = 0.0, den = 0.0;
    for (std::size_t i = i0; i < n; ++i) {
        num += (t[i] - tbar) * (z[i] - zbar);
        den += (t[i] - tbar) * (t[i] - tbar);
    }
    if (den == 0.0) throw InvalidWindow("fit window has no time extent");
    return num / den;
}

}  // namespace polysound
