#pragma once

#include "annmoc/estimator.hpp"
#include "annmoc/solver.hpp"
#include "annmoc/transport.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace annmoc {

/// Manufactured problem with angular flux I(x, mu) = exp(-alpha sigma_t x)
/// on [0, 1]. The source that makes it exact is
///   q(x, mu) = (kappa - alpha sigma_t mu) exp(-alpha sigma_t x),
/// which requires kappa = sigma_t - sigma_s.
struct ManufacturedProblem {
    double kappa = 0.1;
    double alpha = 5.0;
    double sigma_t = 0.6;
    double sigma_s = 0.5;

    /// Sets sigma_t = kappa + sigma_s.
    static ManufacturedProblem consistent(double kappa, double sigma_s, double alpha);
};

/// Throws ConfigError unless |kappa - (sigma_t - sigma_s)| <= 1e-12,
/// sigma_t > 0 and 0 <= sigma_s <= sigma_t.
void validate(const ManufacturedProblem& p);

double manufactured_source(double x, double mu, const ManufacturedProblem& p);
double exact_average_flux(double x, const ManufacturedProblem& p);
/// Domain [0, 1] with inflows I_a = 1 and I_b = exp(-alpha sigma_t).
TransportProblem to_transport(const ManufacturedProblem& p);

/// q(x, mu) = x - x^2, sigma_t = 1, zero inflow on [0, 1].
struct BenchmarkProblem {
    double sigma_s = 0.9;
};

void validate(const BenchmarkProblem& p);
TransportProblem to_transport(const BenchmarkProblem& p);

/// Unnormalized Euclidean norm of estimator - reference over `grid`.
double l2_error(const FluxEstimator& estimator, const std::function<double(double)>& reference,
                std::span<const double> grid);
/// Largest |estimator - reference| over `grid`.
double max_error(const FluxEstimator& estimator, const std::function<double(double)>& reference,
                 std::span<const double> grid);

struct OracleSettings {
    std::size_t mesh_points = 1025;
    std::size_t quadrature_size = 100;
    double epsilon = 1e-8;
    double sweep_tolerance = 1e-11;
    std::size_t max_iterations = 2000;
    std::size_t threads = 1;
};

struct OracleResult {
    std::unique_ptr<MeshEstimator> flux;
    std::size_t iterations = 0;
    double metric = 0.0;
};

/// Reference flux for a benchmark problem: source iteration with a cubic
/// mesh estimator on a fixed uniform grid, no resampling and no network.
/// Throws std::runtime_error if it does not converge.
OracleResult benchmark_oracle(const BenchmarkProblem& p, const OracleSettings& settings = {});

/// A named problem from the catalog, ready to solve.
struct CatalogEntry {
    std::string name;
    TransportProblem problem;
    /// Analytic average flux when known.
    std::function<double(double)> exact;
    std::optional<ManufacturedProblem> manufactured;
    std::optional<BenchmarkProblem> benchmark;
};

struct ProblemOverrides {
    std::optional<double> sigma_s;
    std::optional<double> kappa;
    std::optional<double> alpha;
};

/// Resolves "problem1", "problem2" or "problem2-<sigma_s>" (for example
/// "problem2-0.99"). Overrides replace the named parameters; for problem1
/// sigma_t is always re-derived as kappa + sigma_s. Throws ConfigError for
/// unknown names.
CatalogEntry resolve_problem(std::string_view name, const ProblemOverrides& overrides = {});

}  // namespace annmoc
