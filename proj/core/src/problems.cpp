#include "annmoc/problems.hpp"

#include "annmoc/error.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

namespace annmoc {

ManufacturedProblem ManufacturedProblem::consistent(double kappa, double sigma_s, double alpha) {
    return ManufacturedProblem{kappa, alpha, kappa + sigma_s, sigma_s};
}

void validate(const ManufacturedProblem& p) {
    if (!(p.sigma_t > 0.0) || !(p.sigma_s >= 0.0) || p.sigma_s > p.sigma_t) {
        throw ConfigError("manufactured problem: need sigma_t > 0 and 0 <= sigma_s <= sigma_t");
    }
    if (std::abs(p.kappa - (p.sigma_t - p.sigma_s)) > 1e-12) {
        throw ConfigError("manufactured problem: kappa must equal sigma_t - sigma_s");
    }
    if (!std::isfinite(p.alpha)) {
        throw ConfigError("manufactured problem: alpha must be finite");
    }
}

double manufactured_source(double x, double mu, const ManufacturedProblem& p) {
    const double rate = p.alpha * p.sigma_t;
    return (p.kappa - rate * mu) * std::exp(-rate * x);
}

double exact_average_flux(double x, const ManufacturedProblem& p) { return std::exp(-p.alpha * p.sigma_t * x); }

TransportProblem to_transport(const ManufacturedProblem& p) {
    validate(p);
    TransportProblem problem;
    problem.a = 0.0;
    problem.b = 1.0;
    problem.sigma_t = Coefficient(p.sigma_t);
    problem.sigma_s = Coefficient(p.sigma_s);
    problem.q = [p](double x, double mu) { return manufactured_source(x, mu, p); };
    problem.inflow_a = 1.0;
    problem.inflow_b = std::exp(-p.alpha * p.sigma_t);
    return problem;
}

void validate(const BenchmarkProblem& p) {
    if (!(p.sigma_s >= 0.0 && p.sigma_s < 1.0)) {
        throw ConfigError("benchmark problem: need 0 <= sigma_s < sigma_t = 1");
    }
}

TransportProblem to_transport(const BenchmarkProblem& p) {
    validate(p);
    TransportProblem problem;
    problem.a = 0.0;
    problem.b = 1.0;
    problem.sigma_t = Coefficient(1.0);
    problem.sigma_s = Coefficient(p.sigma_s);
    problem.q = [](double x, double) { return x - x * x; };
    problem.inflow_a = 0.0;
    problem.inflow_b = 0.0;
    return problem;
}

double l2_error(const FluxEstimator& estimator, const std::function<double(double)>& reference,
                std::span<const double> grid) {
    double sum = 0.0;
    for (const double x : grid) {
        const double d = estimator(x) - reference(x);
        sum += d * d;
    }
    return std::sqrt(sum);
}

double max_error(const FluxEstimator& estimator, const std::function<double(double)>& reference,
                 std::span<const double> grid) {
    double worst = 0.0;
    for (const double x : grid) {
        worst = std::max(worst, std::abs(estimator(x) - reference(x)));
    }
    return worst;
}

OracleResult benchmark_oracle(const BenchmarkProblem& p, const OracleSettings& settings) {
    if (settings.mesh_points < 2) {
        throw ConfigError("benchmark oracle: need at least 2 mesh points");
    }
    SolverConfig config;
    config.quadrature_size = settings.quadrature_size;
    config.samples = settings.mesh_points;
    config.epsilon = settings.epsilon;
    config.max_iterations = settings.max_iterations;
    config.sweep_tolerance = settings.sweep_tolerance;
    config.resample = false;
    config.layout = SampleLayout::uniform;
    config.estimator = EstimatorKind::mesh;
    config.mesh_order = Interpolation::cubic;
    config.threads = settings.threads;

    SolveResult solved = solve(to_transport(p), config);
    if (!solved.converged) {
        throw std::runtime_error("benchmark oracle: source iteration did not converge in " +
                                 std::to_string(settings.max_iterations) + " iterations");
    }
    OracleResult result;
    result.iterations = solved.history.size();
    result.metric = solved.history.back().metric;
    result.flux.reset(static_cast<MeshEstimator*>(solved.estimator.release()));
    return result;
}

namespace {

double parse_number(std::string_view text, std::string_view context) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("cannot parse '" + std::string(text) + "' in problem name " + std::string(context));
    }
    return value;
}

}  // namespace

CatalogEntry resolve_problem(std::string_view name, const ProblemOverrides& overrides) {
    CatalogEntry entry;
    entry.name = std::string(name);

    if (name == "problem1") {
        const ManufacturedProblem defaults;
        const double kappa = overrides.kappa.value_or(defaults.kappa);
        const double sigma_s = overrides.sigma_s.value_or(defaults.sigma_s);
        const double alpha = overrides.alpha.value_or(defaults.alpha);
        const auto p = ManufacturedProblem::consistent(kappa, sigma_s, alpha);
        entry.problem = to_transport(p);
        entry.exact = [p](double x) { return exact_average_flux(x, p); };
        entry.manufactured = p;
        return entry;
    }

    constexpr std::string_view benchmark_prefix = "problem2";
    if (name.starts_with(benchmark_prefix)) {
        std::string_view rest = name.substr(benchmark_prefix.size());
        BenchmarkProblem p;
        if (!rest.empty()) {
            if (rest.front() != '-') {
                throw ConfigError("unknown problem '" + std::string(name) + "'");
            }
            p.sigma_s = parse_number(rest.substr(1), name);
        }
        if (overrides.kappa || overrides.alpha) {
            throw ConfigError("problem2 takes no kappa/alpha overrides");
        }
        if (overrides.sigma_s) {
            p.sigma_s = *overrides.sigma_s;
        }
        entry.problem = to_transport(p);
        entry.benchmark = p;
        return entry;
    }

    throw ConfigError("unknown problem '" + std::string(name) + "' (expected problem1, problem2 or problem2-<sigma_s>)");
}

}  // namespace annmoc
