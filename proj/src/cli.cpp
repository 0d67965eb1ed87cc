#include "polysound/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "polysound/csvio.hpp"
#include "polysound/hydrosim.hpp"
#include "polysound/polytrope.hpp"
#include "polysound/sound.hpp"
#include "polysound/svgplot.hpp"
#include "polysound/widths.hpp"

namespace polysound {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& value) {
    const char* begin = value.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(v))
        throw UsageError("bad value for '" + key + "': '" + value + "'");
    return v;
}

long parse_long(const std::string& key, const std::string& value) {
    const char* begin = value.c_str();
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0' || errno == ERANGE)
        throw UsageError("bad value for '" + key + "': '" + value + "'");
    return v;
}

std::vector<std::string> split_list(const std::string& key, const std::string& value) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : value) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    for (const auto& item : out)
        if (item.empty())
            throw UsageError("'" + key + "' needs a comma-separated list without empty entries");
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw UsageError("'" + key + "' must be true or false");
}

// Shared by config keys and --flags; every provided value is validated here
// even if the subcommand does not consume it.
void apply_pair(Invocation& inv, const std::string& key, const std::string& value,
                bool is_flag) {
    if (key == "regime") {
        if (value != "bcs" && value != "bec" && value != "custom")
            throw UsageError("regime must be bcs, bec, or custom (got '" + value + "')");
        inv.regime = value;
    } else if (key == "nu") {
        const double v = parse_double(key, value);
        if (!(v > 0.0)) throw UsageError("nu must be > 0");
        inv.nu = v;
    } else if (key == "gamma") {
        const double v = parse_double(key, value);
        if (!(v > 1.0)) throw UsageError("gamma must be > 1");
        inv.gamma = v;
        inv.gamma_set = true;
    } else if (key == "alpha") {
        const double v = parse_double(key, value);
        if (!(v > 0.0)) throw UsageError("alpha must be > 0");
        inv.alpha = v;
        inv.alpha_set = true;
    } else if (key == "lambda") {
        const double v = parse_double(key, value);
        if (!(v >= 0.0)) throw UsageError("lambda must be >= 0");
        inv.lambda_qp = v;
    } else if (key == "geometry") {
        if (value != "cigar" && value != "disk")
            throw UsageError("geometry must be cigar or disk (got '" + value + "')");
        inv.geometry = value;
    } else if (key == "n-eq") {
        const double v = parse_double(key, value);
        if (!(v >= 0.0)) throw UsageError("n-eq must be >= 0");
        inv.n_eq = v;
    } else if (key == "n-min") {
        const double v = parse_double(key, value);
        if (!(v > 0.0)) throw UsageError("n-min must be > 0");
        inv.n_min = v;
    } else if (key == "n-max") {
        const double v = parse_double(key, value);
        if (!(v > 0.0)) throw UsageError("n-max must be > 0");
        inv.n_max = v;
    } else if (key == "n-points") {
        const long v = parse_long(key, value);
        if (v < 2) throw UsageError("n-points must be >= 2");
        inv.n_points = v;
    } else if (key == "k") {
        const double v = parse_double(key, value);
        if (!(v >= 0.0)) throw UsageError("k must be >= 0");
        inv.k = v;
        inv.k_set = true;
    } else if (key == "epsilon") {
        const double v = parse_double(key, value);
        if (!(v >= 0.0)) throw UsageError("epsilon must be >= 0");
        inv.epsilon = v;
    } else if (key == "dt") {
        const double v = parse_double(key, value);
        if (!(v >= 0.0)) throw UsageError("dt must be >= 0");
        inv.dt = v;
    } else if (key == "steps") {
        const long v = parse_long(key, value);
        if (v < 1) throw UsageError("steps must be >= 1");
        inv.steps = v;
    } else if (key == "points") {
        const long v = parse_long(key, value);
        if (v < 16) throw UsageError("points must be >= 16");
        inv.points = v;
    } else if (key == "box-length") {
        const double v = parse_double(key, value);
        if (!(v > 0.0)) throw UsageError("box-length must be > 0");
        inv.box_length = v;
    } else if (key == "width-mode") {
        if (value != "frozen" && value != "local")
            throw UsageError("width-mode must be frozen or local (got '" + value + "')");
        inv.width_mode = value;
    } else if (key == "init") {
        if (value != "wave" && value != "pulse")
            throw UsageError("init must be wave or pulse (got '" + value + "')");
        inv.init = value;
    } else if (key == "z0") {
        inv.z0 = parse_double(key, value);
        inv.z0_set = true;
    } else if (key == "pulse-width") {
        const double v = parse_double(key, value);
        if (!(v > 0.0)) throw UsageError("pulse-width must be > 0");
        inv.pulse_width = v;
    } else if (key == "record-every") {
        const long v = parse_long(key, value);
        if (v < 0) throw UsageError("record-every must be >= 0");
        inv.record_every = v;
    } else if (key == "potential") {
        if (value.empty()) throw UsageError("potential needs a file path");
        inv.potential_path = value;
    } else if (key == "out") {
        inv.out = value;
    } else if (key == "x") {
        if (value.empty()) throw UsageError("x needs a column name");
        inv.x_column = value;
    } else if (key == "y") {
        inv.y_columns = split_list(key, value);
    } else if (key == "styles") {
        inv.styles = split_list(key, value);
        for (const auto& s : inv.styles)
            if (s != "solid" && s != "dashed" && s != "dotted")
                throw UsageError("styles entries must be solid, dashed, or dotted (got '" + s +
                                 "')");
    } else if (key == "title") {
        inv.title = value;
    } else if (key == "log-x") {
        inv.log_x = parse_bool(key, value);
    } else if (key == "config") {
        if (!is_flag) throw UsageError("config cannot be set from a config file");
        // The path itself is consumed by the config loader before parsing.
    } else {
        throw UsageError(std::string(is_flag ? "unknown flag '--" : "unknown config key '") +
                         key + "'");
    }
}

void apply_config(Invocation& inv, const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw UsageError("config line " + std::to_string(lineno) + ": empty key");
        apply_pair(inv, key, value, false);
    }
}

Regime regime_from(const Invocation& inv) {
    if (inv.regime == "bcs") return Regime::bcs();
    if (inv.regime == "bec") return Regime::bec(inv.nu);
    return Regime::custom(inv.gamma, inv.alpha);
}

TrapGeometry geom_from(const Invocation& inv) {
    return make_trap_geometry(inv.geometry == "cigar" ? GeometryKind::Cigar
                                                      : GeometryKind::Disk);
}

const char* subcommand_name(Subcommand s) {
    switch (s) {
        case Subcommand::Width: return "width";
        case Subcommand::Sound: return "sound";
        case Subcommand::Sweep: return "sweep";
        case Subcommand::Dispersion: return "dispersion";
        case Subcommand::Simulate: return "simulate";
        case Subcommand::Plot: return "plot";
    }
    return "?";
}

using ParamList = std::vector<std::pair<std::string, std::string>>;

void add_physics_params(const Invocation& inv, ParamList& used) {
    used.emplace_back("regime", inv.regime);
    if (inv.regime == "bec") used.emplace_back("nu", fmt_double(inv.nu));
    if (inv.regime == "custom") {
        used.emplace_back("gamma", fmt_double(inv.gamma));
        used.emplace_back("alpha", fmt_double(inv.alpha));
    }
    used.emplace_back("lambda", fmt_double(inv.lambda_qp));
    used.emplace_back("geometry", inv.geometry);
}

std::string join_list(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out.push_back(',');
        out += items[i];
    }
    return out;
}

}  // namespace

std::string usage_text() {
    return
        "usage: polysound <subcommand> [--flag=value ...]\n"
        "\n"
        "subcommands:\n"
        "  width       equilibrium cloud width at one density\n"
        "              columns: n_eq,width,residual,iterations\n"
        "  sound       sound velocities at one density\n"
        "              columns: n_eq,width,cs_numeric,cs_lowdim,cs_3d\n"
        "  sweep       velocities across a log-spaced density grid\n"
        "  dispersion  omega(k) table from 0 to --k\n"
        "              columns: k,omega\n"
        "  simulate    1D dispersive-hydrodynamics run with probe series\n"
        "              columns: t,mass,mode_re,mode_im,peak_z\n"
        "  plot        render a CSV as an SVG line chart\n"
        "\n"
        "physics flags: --regime={bcs|bec|custom} --nu=F --gamma=F --alpha=F\n"
        "               --lambda=F --geometry={cigar|disk} --n-eq=F\n"
        "grid flags:    --n-min=F --n-max=F --n-points=N --k=F\n"
        "simulate:      --init={wave|pulse} --epsilon=F --points=N --box-length=F\n"
        "               --dt=F (0=auto) --steps=N --width-mode={frozen|local}\n"
        "               --z0=F --pulse-width=F --record-every=N --potential=PATH\n"
        "plot:          plot CSVPATH [--x=COL] [--y=COL,COL,...]\n"
        "               [--styles={solid|dashed|dotted},...] [--log-x] [--title=T]\n"
        "common:        --config=PATH --out=PATH (default stdout; with --out a\n"
        "               manifest is written at <out>.manifest)\n"
        "environment:   POLYTROPE_SOUND_CONFIG names a default config file\n"
        "exit codes:    0 ok, 2 usage/config, 3 convergence failure,\n"
        "               4 simulation instability, 1 unexpected internal error\n";
}

std::string find_config_path(const std::vector<std::string>& argv) {
    std::string path;
    for (const auto& arg : argv)
        if (arg.rfind("--config=", 0) == 0) path = arg.substr(9);
    return path;
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Invocation parse_invocation(const std::vector<std::string>& argv,
                            const std::optional<std::string>& config_text) {
    if (argv.empty()) throw UsageError("missing subcommand (try 'polysound help')");

    Invocation inv;
    const std::string& sub = argv[0];
    if (sub == "width") inv.subcommand = Subcommand::Width;
    else if (sub == "sound") inv.subcommand = Subcommand::Sound;
    else if (sub == "sweep") inv.subcommand = Subcommand::Sweep;
    else if (sub == "dispersion") inv.subcommand = Subcommand::Dispersion;
    else if (sub == "simulate") inv.subcommand = Subcommand::Simulate;
    else if (sub == "plot") inv.subcommand = Subcommand::Plot;
    else throw UsageError("unknown subcommand '" + sub + "'");

    if (config_text) apply_config(inv, *config_text);

    for (std::size_t i = 1; i < argv.size(); ++i) {
        const std::string& arg = argv[i];
        if (arg == "--log-x") {
            inv.log_x = true;
        } else if (arg.rfind("--", 0) == 0) {
            const std::size_t eq = arg.find('=');
            if (eq == std::string::npos)
                throw UsageError("flag '" + arg + "' needs =value");
            apply_pair(inv, arg.substr(2, eq - 2), arg.substr(eq + 1), true);
        } else if (inv.subcommand == Subcommand::Plot && inv.plot_csv.empty()) {
            inv.plot_csv = arg;
        } else {
            throw UsageError("unexpected argument '" + arg + "'");
        }
    }

    inv.config_hash = fnv1a_hex(config_text.value_or(""));

    if (inv.regime == "custom" && (!inv.gamma_set || !inv.alpha_set))
        throw UsageError("regime=custom requires gamma and alpha");
    if (inv.subcommand == Subcommand::Sweep && !(inv.n_min < inv.n_max))
        throw UsageError("n-min must be < n-max");
    if (inv.subcommand == Subcommand::Plot && inv.plot_csv.empty())
        throw UsageError("plot needs a csv file argument");
    return inv;
}

std::vector<double> load_potential_table(const std::string& path, std::size_t points,
                                         double grid_length) {
    const std::string text = read_file(path);
    std::istringstream is(text);
    std::string line;
    std::vector<double> zs, vs;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::istringstream row(line);
        double z, v;
        std::string extra;
        if (!(row >> z >> v) || (row >> extra))
            throw IoError(path + ":" + std::to_string(lineno) +
                          ": expected two numbers (position, value)");
        if (!std::isfinite(z) || !std::isfinite(v))
            throw IoError(path + ":" + std::to_string(lineno) + ": non-finite entry");
        if (!zs.empty() && !(z > zs.back()))
            throw IoError(path + ":" + std::to_string(lineno) +
                          ": positions must be strictly increasing");
        zs.push_back(z);
        vs.push_back(v);
    }
    if (zs.size() < 2) throw IoError(path + ": potential table needs at least two rows");

    std::vector<double> sampled(points);
    const double dz = grid_length / static_cast<double>(points);
    std::size_t seg = 0;
    for (std::size_t j = 0; j < points; ++j) {
        const double z = static_cast<double>(j) * dz;
        if (z <= zs.front()) {
            sampled[j] = vs.front();
            continue;
        }
        if (z >= zs.back()) {
            sampled[j] = vs.back();
            continue;
        }
        while (zs[seg + 1] < z) ++seg;
        const double t = (z - zs[seg]) / (zs[seg + 1] - zs[seg]);
        sampled[j] = vs[seg] + t * (vs[seg + 1] - vs[seg]);
    }
    return sampled;
}

int run_command(const Invocation& inv) {
    const auto t_begin = std::chrono::steady_clock::now();
    std::string payload;
    ParamList used;

    switch (inv.subcommand) {
        case Subcommand::Width: {
            const PolytropeParams params = regime_params(regime_from(inv), inv.lambda_qp);
            const TrapGeometry geom = geom_from(inv);
            add_physics_params(inv, used);
            used.emplace_back("n-eq", fmt_double(inv.n_eq));
            const WidthSolution sol = geom.kind == GeometryKind::Cigar
                                          ? solve_cigar_width(params, geom, inv.n_eq)
                                          : solve_disk_width(params, geom, inv.n_eq);
            CsvTable table;
            table.columns = {"n_eq", "width", "residual", "iterations"};
            table.rows = {{inv.n_eq, sol.width, sol.residual,
                           static_cast<double>(sol.iterations)}};
            payload = format_csv(table);
            break;
        }
        case Subcommand::Sound: {
            if (!(inv.n_eq > 0.0)) throw UsageError("n-eq must be > 0 for sound");
            const PolytropeParams params = regime_params(regime_from(inv), inv.lambda_qp);
            const TrapGeometry geom = geom_from(inv);
            add_physics_params(inv, used);
            used.emplace_back("n-eq", fmt_double(inv.n_eq));
            const auto rows = sweep_sound_curve(params, geom, {inv.n_eq});
            CsvTable table;
            table.columns = {"n_eq", "width", "cs_numeric", "cs_lowdim", "cs_3d"};
            for (const SweepRow& r : rows)
                table.rows.push_back({r.n_eq, r.width, r.cs_numeric, r.cs_lowdim, r.cs_3d});
            payload = format_csv(table);
            break;
        }
        case Subcommand::Sweep: {
            const PolytropeParams params = regime_params(regime_from(inv), inv.lambda_qp);
            const TrapGeometry geom = geom_from(inv);
            add_physics_params(inv, used);
            used.emplace_back("n-min", fmt_double(inv.n_min));
            used.emplace_back("n-max", fmt_double(inv.n_max));
            used.emplace_back("n-points", std::to_string(inv.n_points));
            const auto grid = log_spaced_densities(inv.n_min, inv.n_max,
                                                   static_cast<std::size_t>(inv.n_points));
            const auto rows = sweep_sound_curve(params, geom, grid);
            CsvTable table;
            table.columns = {"n_eq", "width", "cs_numeric", "cs_lowdim", "cs_3d"};
            for (const SweepRow& r : rows)
                table.rows.push_back({r.n_eq, r.width, r.cs_numeric, r.cs_lowdim, r.cs_3d});
            payload = format_csv(table);
            break;
        }
        case Subcommand::Dispersion: {
            if (!(inv.n_eq > 0.0)) throw UsageError("n-eq must be > 0 for dispersion");
            const PolytropeParams params = regime_params(regime_from(inv), inv.lambda_qp);
            const TrapGeometry geom = geom_from(inv);
            add_physics_params(inv, used);
            used.emplace_back("n-eq", fmt_double(inv.n_eq));
            used.emplace_back("k", fmt_double(inv.k));
            used.emplace_back("n-points", std::to_string(inv.n_points));
            const double c_s = sweep_sound_curve(params, geom, {inv.n_eq})[0].cs_numeric;
            CsvTable table;
            table.columns = {"k", "omega"};
            for (long i = 0; i < inv.n_points; ++i) {
                const double ki = inv.k * static_cast<double>(i) /
                                  static_cast<double>(inv.n_points - 1);
                table.rows.push_back({ki, dispersion_omega(c_s, params.lambda_qp, ki).omega});
            }
            payload = format_csv(table);
            break;
        }
        case Subcommand::Simulate: {
            if (!(inv.n_eq > 0.0)) throw UsageError("n-eq must be > 0 for simulate");
            const PolytropeParams params = regime_params(regime_from(inv), inv.lambda_qp);
            const TrapGeometry geom = geom_from(inv);
            const double L = inv.box_length;
            const auto points = static_cast<std::size_t>(inv.points);

            HydroState state;
            double probe_k;
            if (inv.init == "wave") {
                const double k_wave = inv.k_set ? inv.k : 16.0 * std::numbers::pi / L;
                state = init_standing_wave(inv.n_eq, inv.epsilon, k_wave, points, L);
                probe_k = k_wave;
            } else {
                const double z0 = inv.z0_set ? inv.z0 : 0.5 * L;
                state = init_gaussian_pulse(inv.n_eq, inv.epsilon, z0, inv.pulse_width,
                                            points, L);
                probe_k = inv.k_set ? inv.k : 2.0 * std::numbers::pi / L;
            }

            SimSettings settings;
            settings.width_mode = inv.width_mode == "frozen"
                                      ? WidthMode::FrozenAtEquilibrium
                                      : WidthMode::LocalAdiabatic;
            settings.steps = inv.steps;
            settings.record_every =
                inv.record_every > 0 ? inv.record_every : std::max(1L, inv.steps / 2000);
            if (!inv.potential_path.empty())
                settings.external_potential =
                    load_potential_table(inv.potential_path, points, L);
            if (inv.dt > 0.0) {
                settings.dt = inv.dt;
            } else {
                const double c_ref = sweep_sound_curve(params, geom, {inv.n_eq})[0].cs_numeric;
                settings.dt = 0.5 * cfl_cap(state.dz(), params.lambda_qp, c_ref);
            }

            add_physics_params(inv, used);
            used.emplace_back("n-eq", fmt_double(inv.n_eq));
            used.emplace_back("init", inv.init);
            used.emplace_back("epsilon", fmt_double(inv.epsilon));
            used.emplace_back("points", std::to_string(inv.points));
            used.emplace_back("box-length", fmt_double(L));
            used.emplace_back("dt", fmt_double(settings.dt));
            used.emplace_back("steps", std::to_string(settings.steps));
            used.emplace_back("record-every", std::to_string(settings.record_every));
            used.emplace_back("width-mode", inv.width_mode);
            used.emplace_back("k", fmt_double(probe_k));
            if (inv.init == "pulse") {
                used.emplace_back("z0", fmt_double(inv.z0_set ? inv.z0 : 0.5 * L));
                used.emplace_back("pulse-width", fmt_double(inv.pulse_width));
            }
            if (!inv.potential_path.empty())
                used.emplace_back("potential", inv.potential_path);

            const ProbeSeries series =
                integrate_run(std::move(state), params, geom, settings, probe_k);
            CsvTable table;
            table.columns = {"t", "mass", "mode_re", "mode_im", "peak_z"};
            for (std::size_t i = 0; i < series.times.size(); ++i) {
                table.rows.push_back({series.times[i], series.mass[i],
                                      series.mode_amplitude[i].real(),
                                      series.mode_amplitude[i].imag(),
                                      series.peak_position[i]});
            }
            payload = format_csv(table);
            break;
        }
        case Subcommand::Plot: {
            const CsvTable table = read_csv(inv.plot_csv);
            if (table.columns.empty()) throw DomainError("csv has no columns");
            PlotSpec spec;
            spec.x_column = inv.x_column.empty() ? table.columns.front() : inv.x_column;
            if (inv.y_columns.empty()) {
                for (const auto& c : table.columns)
                    if (c != spec.x_column) spec.y_columns.push_back(c);
                if (spec.y_columns.empty())
                    throw DomainError("csv has no y columns besides '" + spec.x_column + "'");
            } else {
                spec.y_columns = inv.y_columns;
            }
            spec.styles = inv.styles;
            spec.log_x = inv.log_x;
            spec.title = inv.title;

            used.emplace_back("csv", inv.plot_csv);
            used.emplace_back("x", spec.x_column);
            used.emplace_back("y", join_list(spec.y_columns));
            if (!spec.styles.empty()) used.emplace_back("styles", join_list(spec.styles));
            used.emplace_back("log-x", inv.log_x ? "true" : "false");
            if (!spec.title.empty()) used.emplace_back("title", spec.title);

            payload = render_svg(table, spec);
            break;
        }
    }

    if (inv.out.empty()) {
        std::fwrite(payload.data(), 1, payload.size(), stdout);
        return 0;
    }
    write_file_atomic(inv.out, payload);

    const auto t_end = std::chrono::steady_clock::now();
    const double seconds =
        std::chrono::duration_cast<std::chrono::duration<double>>(t_end - t_begin).count();
    std::sort(used.begin(), used.end());
    std::string manifest;
    manifest += std::string("version=") + kToolVersion + "\n";
    manifest += std::string("subcommand=") + subcommand_name(inv.subcommand) + "\n";
    manifest += "config_hash=" + inv.config_hash + "\n";
    manifest += "duration_seconds=" + fmt_double(seconds) + "\n";
    manifest += "output=" + inv.out + "\n";
    for (const auto& [key, value] : used) manifest += "param." + key + "=" + value + "\n";
    write_file_atomic(inv.out + ".manifest", manifest);
    return 0;
}

}  // namespace polysound
