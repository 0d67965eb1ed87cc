#include <cstdio>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "polysound/cli.hpp"
#include "polysound/csvio.hpp"

namespace {

int fail(const char* what, int code) {
    std::fprintf(stderr, "polysound: %s\n", what);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace polysound;
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        if (args.empty()) {
            std::fputs(usage_text().c_str(), stderr);
            return 2;
        }
        if (args[0] == "help" || args[0] == "--help") {
            std::fputs(usage_text().c_str(), stdout);
            return 0;
        }

        std::string config_path = find_config_path(args);
        if (config_path.empty()) {
            if (const char* env = std::getenv("POLYTROPE_SOUND_CONFIG"); env && *env)
                config_path = env;
        }
        std::optional<std::string> config_text;
        if (!config_path.empty()) config_text = read_file(config_path);

        return run_command(parse_invocation(args, config_text));
    } catch (const ConvergenceFailure& e) {
        return fail(e.what(), 3);
    } catch (const SimulationUnstable& e) {
        return fail(e.what(), 4);
    } catch (const DensityFloorViolation& e) {
        return fail(e.what(), 4);
    } catch (const Error& e) {
        return fail(e.what(), 2);
    } catch (const std::exception& e) {
        return fail(e.what(), 1);
    }
}
