#include "app/commands.hpp"
#include "app/run_config.hpp"

#include <annmoc/error.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

namespace {

using annmoc::app::ExitCode;
using annmoc::app::RunConfig;

std::string flag_name(std::string_view key) {
    std::string flag = "--" + std::string(key);
    for (char& c : flag) {
        if (c == '_') c = '-';
    }
    return flag;
}

/// Options shared by every subcommand; values stay as text until the config
/// file (if any) has been applied, so flags override it.
struct CommonOptions {
    std::string config_file;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    bool no_resample = false;

    void attach(CLI::App& sub) {
        sub.add_option("--config", config_file, "key = value file applied before the flags")->check(CLI::ExistingFile);
        for (const auto& s : annmoc::app::settings()) {
            const std::string key(s.key);
            options[key] = sub.add_option(flag_name(key), values[key], std::string(s.help));
        }
        sub.add_flag("--no-resample", no_resample, "keep the first sample set for every iteration");
    }

    RunConfig resolve() const {
        RunConfig config;
        if (!config_file.empty()) {
            annmoc::app::load_config_file(config_file, config);
        }
        for (const auto& s : annmoc::app::settings()) {
            const std::string key(s.key);
            if (options.at(key)->count() > 0) {
                s.set(config, values.at(key));
            }
        }
        if (no_resample) {
            config.solver.resample = false;
        }
        return config;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Source iteration with method-of-characteristics sweeps and a neural-network flux surrogate"};
    app.require_subcommand(1);

    CommonOptions run_options;
    auto* run = app.add_subcommand("run", "solve one problem and write flux, history and summary files");
    run_options.attach(*run);

    CommonOptions compare_options;
    std::vector<std::string> kinds{"ann", "mesh"};
    auto* compare = app.add_subcommand("compare", "solve one problem with several estimators and tabulate them");
    compare_options.attach(*compare);
    compare->add_option("--kinds", kinds, "estimator kinds to compare")->delimiter(',')->capture_default_str();

    CommonOptions oracle_options;
    auto* oracle = app.add_subcommand("oracle", "write the mesh reference flux of a problem2 variant");
    oracle_options.attach(*oracle);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int status = app.exit(e);
        return status == 0 ? 0 : static_cast<int>(ExitCode::config_error);
    }

    ExitCode code = ExitCode::ok;
    try {
        if (*run) {
            code = annmoc::app::run(run_options.resolve(), std::cout);
        } else if (*compare) {
            std::vector<annmoc::EstimatorKind> parsed;
            for (const auto& k : kinds) {
                parsed.push_back(annmoc::parse_estimator_kind(k));
            }
            code = annmoc::app::compare(compare_options.resolve(), parsed, std::cout);
        } else {
            code = annmoc::app::oracle(oracle_options.resolve(), std::cout);
        }
    } catch (const annmoc::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        code = ExitCode::config_error;
    }
    if (code != ExitCode::ok && code != ExitCode::not_converged) {
        std::cerr << "annmoc: exiting with status " << static_cast<int>(code) << '\n';
    }
    return static_cast<int>(code);
}
