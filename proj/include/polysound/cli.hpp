#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polysound/errors.hpp"

namespace polysound {

inline constexpr const char* kToolVersion = "1.0.0";

enum class Subcommand { Width, Sound, Sweep, Dispersion, Simulate, Plot };

// Fully resolved run request: defaults, then config-file pairs, then
// command-line flags, later sources winning.  Validation happens at parse
// time for every provided key, whether or not the subcommand consumes it.
struct Invocation {
    Subcommand subcommand = Subcommand::Sweep;

    std::string regime = "bcs";  // bcs | bec | custom
    double nu = 1.0;
    double gamma = 0.0;
    double alpha = 0.0;
    bool gamma_set = false;
    bool alpha_set = false;
    double lambda_qp = 1.0;
    std::string geometry = "cigar";  // cigar | disk

    double n_eq = 1.0;
    double n_min = 1e-4;
    double n_max = 1e4;
    long n_points = 200;

    double k = 2.0;  // dispersion: top of the k grid; simulate: wave/probe number
    bool k_set = false;
    double epsilon = 1e-3;
    double dt = 0.0;  // 0 means auto: half the CFL cap
    long steps = 40000;
    long points = 2048;
    double box_length = 100.0;
    std::string width_mode = "frozen";  // frozen | local
    std::string init = "wave";          // wave | pulse
    double z0 = 0.0;                    // pulse center; defaults to box midpoint
    bool z0_set = false;
    double pulse_width = 5.0;
    long record_every = 0;  // 0 means auto: about 2000 records per run
    std::string potential_path;

    std::string out;  // empty: write the table to stdout, no manifest

    // plot
    std::string plot_csv;  // positional argument
    std::string x_column;  // empty: first csv column
    std::vector<std::string> y_columns;  // empty: every non-x column
    std::vector<std::string> styles;
    bool log_x = false;
    std::string title;

    std::string config_hash;  // FNV-1a 64 of the config text ("" hashed if absent)
};

// One-line-per-flag usage summary for stderr/stdout.
std::string usage_text();

// Scan argv for the last --config=<path>; empty string when absent.
std::string find_config_path(const std::vector<std::string>& argv);

// Pure parser: argv is the argument list after the program name; config_text
// is the already-loaded config file body, if any.  Throws UsageError with a
// one-line message naming the offending flag or key.
Invocation parse_invocation(const std::vector<std::string>& argv,
                            const std::optional<std::string>& config_text);

// Execute the request.  Returns 0 on success; failures are reported by
// throwing (ConvergenceFailure, SimulationUnstable, DensityFloorViolation,
// UsageError, DomainError, IoError, ...) for the caller to map onto exit
// codes.  Tables go to stdout unless --out is set, in which case the file is
// written atomically and a key=value manifest is placed at <out>.manifest.
int run_command(const Invocation& inv);

// FNV-1a 64-bit hash, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

// Read a two-column (position, value) whitespace-separated table, "#"
// comments allowed, and sample it onto the uniform grid of `points` cells
// spanning [0, grid_length) by linear interpolation, clamping beyond the
// tabulated range.
std::vector<double> load_potential_table(const std::string& path, std::size_t points,
                                         double grid_length);

}  // namespace polysound
