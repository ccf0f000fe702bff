#pragma once

#include "annmoc/estimator.hpp"
#include "annmoc/quadrature.hpp"
#include "annmoc/random.hpp"
#include "annmoc/transport.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace annmoc {

enum class SampleLayout { random, uniform };
enum class InitialFluxKind { zero, constant, boundary_average };
/// What the stop test compares at the iteration's samples:
/// `estimate_change` the refit estimator against the one before it,
/// `sweep_residual` the swept fluxes against the estimator they came from.
enum class StopMetric { estimate_change, sweep_residual };

std::string_view to_string(SampleLayout layout);
SampleLayout parse_sample_layout(std::string_view name);
std::string_view to_string(InitialFluxKind kind);
InitialFluxKind parse_initial_flux(std::string_view name);
std::string_view to_string(StopMetric metric);
StopMetric parse_stop_metric(std::string_view name);

struct InitialFlux {
    InitialFluxKind kind = InitialFluxKind::zero;
    /// Used by InitialFluxKind::constant.
    double value = 0.0;
};

struct SolverConfig {
    std::size_t quadrature_size = 100;
    std::size_t samples = 101;
    double epsilon = 1e-5;
    std::size_t max_iterations = 500;
    double sweep_tolerance = 1e-9;
    StopMetric stop_metric = StopMetric::estimate_change;
    bool resample = true;
    SampleLayout layout = SampleLayout::random;
    std::uint64_t seed = 0;
    EstimatorKind estimator = EstimatorKind::ann;
    Interpolation mesh_order = Interpolation::cubic;
    AnnSettings ann;
    InitialFlux initial;
    /// Sweep worker threads; 0 picks std::thread::hardware_concurrency().
    std::size_t threads = 1;
    /// Function wrapped by the exact estimator kind.
    std::function<double(double)> exact_flux;
};

/// Throws ConfigError unless N is even and >= 2, n_s >= 2, epsilon > 0,
/// L >= 1, the sweep tolerance is positive, and the exact kind has a function.
void validate(const SolverConfig& config);

/// Builds the estimator `config` asks for on [problem.a, problem.b].
std::unique_ptr<FluxEstimator> make_estimator(const TransportProblem& problem, const SolverConfig& config);

/// n points in ascending order: a and b plus n - 2 uniform draws in (a, b).
std::vector<double> draw_samples(std::size_t n, double a, double b, RandomStream& rng);
/// n evenly spaced points from a to b.
std::vector<double> uniform_samples(std::size_t n, double a, double b);

struct FluxSamples {
    std::vector<double> x;
    std::vector<double> psi;
};

/// Average flux at every sample from the characteristic solution in each
/// quadrature direction. Work is split by sample across `threads` workers;
/// the result does not depend on the thread count. Integration failures are
/// rethrown as SweepError naming the (sample, direction) pair.
FluxSamples sweep(const TransportProblem& problem, const AngularQuadrature& quad, const FluxEstimator& estimator,
                  std::span<const double> samples, const MocOptions& options = {}, std::size_t threads = 1);

struct ConvergenceCheck {
    double metric = 0.0;
    double threshold = 0.0;
    bool converged = false;
};

/// ||new - old||_2 < max(epsilon, epsilon * ||new||_2).
ConvergenceCheck converged(std::span<const double> psi_new, std::span<const double> psi_old, double epsilon);

struct IterationRecord {
    std::size_t iteration = 0;
    double metric = 0.0;
    double threshold = 0.0;
    double train_loss = 0.0;
    std::size_t epochs = 0;
    double seconds = 0.0;
};

struct SolveResult {
    std::unique_ptr<FluxEstimator> estimator;
    std::vector<IterationRecord> history;
    bool converged = false;
    /// Samples of the last iterate with the swept average flux.
    FluxSamples final_samples;
    /// Misfit of the fit to the initial approximation.
    FitReport initial_fit;
    double seconds = 0.0;
};

using IterationObserver = std::function<void(const IterationRecord&)>;

/// Source iteration with a refit flux estimator:
///   fit psi_0 at the samples; then for j = 1..L sweep with the current
///   estimator, refit it on the new fluxes, test the stop criterion on the
///   same samples, and redraw them when resampling is on.
/// With StopMetric::estimate_change the criterion compares the refit
/// estimator against the previous one; with sweep_residual it compares the
/// swept fluxes against the previous estimator.
/// Stops unconverged after L iterations without throwing. Training
/// divergence propagates as TrainingDivergence carrying the iteration.
SolveResult solve(const TransportProblem& problem, const SolverConfig& config,
                  const IterationObserver& observer = {});

}  // namespace annmoc
