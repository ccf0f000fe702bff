#pragma once

#include <annmoc/problems.hpp>
#include <annmoc/solver.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace annmoc::app {

/// Everything one CLI invocation needs: the problem, the solver settings,
/// the evaluation grid and which artifacts to write.
struct RunConfig {
    std::string problem = "problem1";
    ProblemOverrides overrides;
    SolverConfig solver = default_solver();
    /// Unset means "draw one at startup"; the drawn value is reported.
    std::optional<std::uint64_t> seed;
    std::filesystem::path out = "annmoc-out";
    std::size_t grid = 101;

    bool emit_flux = true;
    bool emit_history = true;
    bool emit_checkpoint = true;
    bool emit_summary = true;

    /// Reference solution for problems without a closed form.
    OracleSettings oracle;
    bool reference = true;

    static SolverConfig default_solver();
};

/// One named, text-valued configuration key. The same table drives the
/// config file, the command-line flags and the summary.
struct Setting {
    std::string_view key;
    std::string_view help;
    std::function<void(RunConfig&, std::string_view)> set;
    /// Empty when the key does not apply to the resolved configuration.
    std::function<std::string(const RunConfig&)> get;
};

const std::vector<Setting>& settings();
const Setting* find_setting(std::string_view key);

/// Applies `key = value` lines. Blank lines and lines starting with '#' are
/// skipped; a "[name]" header ends the configuration block, so a summary
/// file can be fed back in. Throws ConfigError naming the line on failure.
void load_config(std::istream& in, RunConfig& config, std::string_view source = "config");
void load_config_file(const std::filesystem::path& path, RunConfig& config);

/// Throws ConfigError if the configuration cannot run.
void validate(const RunConfig& config);

/// The seed to use: the configured one or a fresh draw from std::random_device.
std::uint64_t resolve_seed(RunConfig& config);

/// "key = value" for every applicable setting.
void write_settings(std::ostream& out, const RunConfig& config);

std::string format_double(double value);

}  // namespace annmoc::app
