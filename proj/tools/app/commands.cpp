#include "commands.hpp"

#include "csv.hpp"

#include <annmoc/error.hpp>

#include <chrono>
#include <fstream>
#include <memory>
#include <sstream>
#include <ostream>
#include <stdexcept>
#include <system_error>

namespace annmoc::app {

namespace {

struct Reference {
    std::function<double(double)> flux;
    std::string source = "none";
    std::shared_ptr<MeshEstimator> mesh;
};

Reference make_reference(const CatalogEntry& entry, const RunConfig& config, std::ostream& log) {
    Reference ref;
    if (entry.exact) {
        ref.flux = entry.exact;
        ref.source = "exact";
    } else if (entry.benchmark && config.reference) {
        log << "computing reference flux (" << config.oracle.mesh_points << "-point mesh)\n";
        OracleSettings settings = config.oracle;
        settings.threads = config.solver.threads;
        OracleResult oracle = benchmark_oracle(*entry.benchmark, settings);
        ref.mesh = std::shared_ptr<MeshEstimator>(std::move(oracle.flux));
        ref.flux = [mesh = ref.mesh](double x) { return (*mesh)(x); };
        ref.source = "oracle";
    }
    return ref;
}

SolverConfig solver_for(const RunConfig& config, const CatalogEntry& entry, EstimatorKind kind) {
    SolverConfig solver = config.solver;
    solver.estimator = kind;
    solver.exact_flux = entry.exact;
    return solver;
}

struct Errors {
    double l2 = 0.0;
    double max = 0.0;
};

std::optional<Errors> errors_against(const FluxEstimator& estimator, const Reference& ref,
                                     const std::vector<double>& grid) {
    if (!ref.flux) return std::nullopt;
    return Errors{l2_error(estimator, ref.flux, grid), max_error(estimator, ref.flux, grid)};
}

CsvTable flux_table(const FluxEstimator& estimator, const Reference& ref, const std::vector<double>& grid) {
    CsvTable table;
    table.header = {"x", "psi_estimate"};
    if (ref.flux) {
        table.header.insert(table.header.end(), {"psi_reference", "abs_error"});
    }
    std::vector<double> psi(grid.size());
    estimator.evaluate(grid, psi);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        std::vector<std::string> row{format_double(grid[k]), format_double(psi[k])};
        if (ref.flux) {
            const double exact = ref.flux(grid[k]);
            row.push_back(format_double(exact));
            row.push_back(format_double(std::abs(psi[k] - exact)));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << text;
    out.flush();
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

void prepare_output(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw std::runtime_error("cannot create output directory " + dir.string() +
                                 (ec ? ": " + ec.message() : std::string()));
    }
}

std::string summary_header(const RunConfig& config, std::string_view command) {
    std::ostringstream text;
    text << "# annmoc " << command << '\n';
    write_settings(text, config);
    return text.str();
}

IterationObserver progress(std::ostream& log) {
    return [&log](const IterationRecord& r) {
        log << "iter " << r.iteration << "  metric " << format_double(r.metric) << "  threshold "
            << format_double(r.threshold) << "  loss " << format_double(r.train_loss) << "  epochs " << r.epochs
            << '\n';
    };
}

template <typename Body>
ExitCode guarded(std::ostream& log, Body body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        log << "configuration error: " << e.what() << '\n';
        return ExitCode::config_error;
    } catch (const SweepError& e) {
        log << "sweep failed: " << e.what() << '\n';
        return ExitCode::solver_failure;
    } catch (const TrainingDivergence& e) {
        log << "training diverged: " << e.what() << '\n';
        return ExitCode::solver_failure;
    } catch (const IntegrationError& e) {
        log << "integration failed: " << e.what() << '\n';
        return ExitCode::solver_failure;
    } catch (const std::runtime_error& e) {
        log << "error: " << e.what() << '\n';
        return ExitCode::io_error;
    }
}

}  // namespace

ExitCode run(RunConfig config, std::ostream& log) {
    return guarded(log, [&] {
        validate(config);
        const std::uint64_t seed = resolve_seed(config);
        const CatalogEntry entry = resolve_problem(config.problem, config.overrides);
        const std::vector<double> grid = uniform_samples(config.grid, entry.problem.a, entry.problem.b);
        log << "problem " << entry.name << "  estimator " << to_string(config.solver.estimator) << "  seed " << seed
            << '\n';

        Reference ref;
        try {
            ref = make_reference(entry, config, log);
        } catch (const std::runtime_error& e) {
            log << "reference solve failed: " << e.what() << '\n';
            return ExitCode::solver_failure;
        }
        SolveResult result =
            solve(entry.problem, solver_for(config, entry, config.solver.estimator), progress(log));
        const auto errors = errors_against(*result.estimator, ref, grid);

        prepare_output(config.out);
        if (config.emit_flux) {
            write_csv_file(config.out / "flux.csv", flux_table(*result.estimator, ref, grid));
        }
        if (config.emit_history) {
            CsvTable history{{"iter", "metric", "train_loss", "epochs"}, {}};
            CsvTable timing{{"iter", "seconds"}, {}};
            for (const auto& r : result.history) {
                history.rows.push_back({std::to_string(r.iteration), format_double(r.metric),
                                        format_double(r.train_loss), std::to_string(r.epochs)});
                timing.rows.push_back({std::to_string(r.iteration), format_double(r.seconds)});
            }
            write_csv_file(config.out / "history.csv", history);
            write_csv_file(config.out / "timing.csv", timing);
        }
        if (config.emit_checkpoint) {
            if (const auto* ann = dynamic_cast<const AnnEstimator*>(result.estimator.get())) {
                std::ostringstream text;
                write_mlp(text, ann->standalone_network());
                write_text(config.out / "surrogate.mlp", text.str());
            }
        }
        if (config.emit_summary) {
            std::ostringstream text;
            text << summary_header(config, "run") << "\n[result]\n";
            text << "converged = " << (result.converged ? "true" : "false") << '\n';
            text << "iterations = " << result.history.size() << '\n';
            if (!result.history.empty()) {
                text << "final_metric = " << format_double(result.history.back().metric) << '\n';
                text << "final_train_loss = " << format_double(result.history.back().train_loss) << '\n';
            }
            text << "reference = " << ref.source << '\n';
            if (errors) {
                text << "l2_error = " << format_double(errors->l2) << '\n';
                text << "max_error = " << format_double(errors->max) << '\n';
            }
            text << "clamped_evaluations = " << result.estimator->clamp_count() << '\n';
            text << "seconds = " << format_double(result.seconds) << '\n';
            write_text(config.out / "summary.txt", text.str());
        }

        log << (result.converged ? "converged" : "not converged") << " after " << result.history.size()
            << " iterations";
        if (errors) {
            log << "  L2 error " << format_double(errors->l2) << "  max error " << format_double(errors->max);
        }
        log << '\n';
        return result.converged ? ExitCode::ok : ExitCode::not_converged;
    });
}

ExitCode compare(RunConfig config, const std::vector<EstimatorKind>& kinds, std::ostream& log) {
    return guarded(log, [&] {
        if (kinds.size() < 2) {
            throw ConfigError("compare needs at least two estimator kinds");
        }
        validate(config);
        for (const auto kind : kinds) {
            RunConfig probe = config;
            probe.solver.estimator = kind;
            validate(probe);
        }
        const std::uint64_t seed = resolve_seed(config);
        const CatalogEntry entry = resolve_problem(config.problem, config.overrides);
        const std::vector<double> grid = uniform_samples(config.grid, entry.problem.a, entry.problem.b);
        log << "problem " << entry.name << "  seed " << seed << '\n';

        Reference ref;
        try {
            ref = make_reference(entry, config, log);
        } catch (const std::runtime_error& e) {
            log << "reference solve failed: " << e.what() << '\n';
            return ExitCode::solver_failure;
        }

        CsvTable table{{"kind", "converged", "iterations", "final_metric", "l2_error", "max_error", "seconds"}, {}};
        bool all_converged = true;
        for (const auto kind : kinds) {
            log << "estimator " << to_string(kind) << '\n';
            SolveResult result = solve(entry.problem, solver_for(config, entry, kind), progress(log));
            const auto errors = errors_against(*result.estimator, ref, grid);
            all_converged = all_converged && result.converged;
            table.rows.push_back({std::string(to_string(kind)), result.converged ? "true" : "false",
                                  std::to_string(result.history.size()),
                                  result.history.empty() ? "nan" : format_double(result.history.back().metric),
                                  errors ? format_double(errors->l2) : "nan",
                                  errors ? format_double(errors->max) : "nan", format_double(result.seconds)});
        }

        prepare_output(config.out);
        write_csv_file(config.out / "compare.csv", table);
        if (config.emit_summary) {
            std::ostringstream text;
            text << summary_header(config, "compare") << "\n[result]\n";
            text << "kinds = ";
            for (std::size_t k = 0; k < kinds.size(); ++k) {
                text << (k ? "," : "") << to_string(kinds[k]);
            }
            text << "\nreference = " << ref.source << '\n';
            text << "all_converged = " << (all_converged ? "true" : "false") << '\n';
            write_text(config.out / "summary.txt", text.str());
        }
        std::ostringstream rendered;
        write_csv(rendered, table);
        log << rendered.str();
        return all_converged ? ExitCode::ok : ExitCode::not_converged;
    });
}

ExitCode oracle(RunConfig config, std::ostream& log) {
    return guarded(log, [&] {
        validate(config);
        const CatalogEntry entry = resolve_problem(config.problem, config.overrides);
        if (!entry.benchmark) {
            throw ConfigError("oracle applies to the problem2 family only");
        }
        const std::vector<double> grid = uniform_samples(config.grid, entry.problem.a, entry.problem.b);
        OracleSettings settings = config.oracle;
        settings.threads = config.solver.threads;
        const auto started = std::chrono::steady_clock::now();
        OracleResult result;
        try {
            result = benchmark_oracle(*entry.benchmark, settings);
        } catch (const std::runtime_error& e) {
            log << "oracle failed: " << e.what() << '\n';
            return ExitCode::not_converged;
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

        prepare_output(config.out);
        CsvTable table{{"x", "psi_reference"}, {}};
        for (const double x : grid) {
            table.rows.push_back({format_double(x), format_double((*result.flux)(x))});
        }
        write_csv_file(config.out / "flux.csv", table);
        if (config.emit_summary) {
            std::ostringstream text;
            text << summary_header(config, "oracle") << "\n[result]\n";
            text << "iterations = " << result.iterations << '\n';
            text << "final_metric = " << format_double(result.metric) << '\n';
            text << "seconds = " << format_double(seconds) << '\n';
            write_text(config.out / "summary.txt", text.str());
        }
        log << "oracle converged after " << result.iterations << " iterations\n";
        return ExitCode::ok;
    });
}

}  // namespace annmoc::app
