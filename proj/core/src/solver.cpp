#include "annmoc/solver.hpp"

#include "annmoc/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

namespace annmoc {

std::string_view to_string(SampleLayout layout) { return layout == SampleLayout::random ? "random" : "uniform"; }

SampleLayout parse_sample_layout(std::string_view name) {
    if (name == "random") return SampleLayout::random;
    if (name == "uniform") return SampleLayout::uniform;
    throw ConfigError("unknown sample layout '" + std::string(name) + "'");
}

std::string_view to_string(InitialFluxKind kind) {
    switch (kind) {
        case InitialFluxKind::zero:
            return "zero";
        case InitialFluxKind::constant:
            return "constant";
        case InitialFluxKind::boundary_average:
            return "boundary-average";
    }
    return "zero";
}

InitialFluxKind parse_initial_flux(std::string_view name) {
    if (name == "zero") return InitialFluxKind::zero;
    if (name == "constant") return InitialFluxKind::constant;
    if (name == "boundary-average") return InitialFluxKind::boundary_average;
    throw ConfigError("unknown initial flux '" + std::string(name) + "'");
}

std::string_view to_string(StopMetric metric) {
    return metric == StopMetric::estimate_change ? "estimate-change" : "sweep-residual";
}

StopMetric parse_stop_metric(std::string_view name) {
    if (name == "estimate-change") return StopMetric::estimate_change;
    if (name == "sweep-residual") return StopMetric::sweep_residual;
    throw ConfigError("unknown stop metric '" + std::string(name) + "'");
}

void validate(const SolverConfig& config) {
    if (config.quadrature_size < 2 || config.quadrature_size % 2 != 0) {
        throw ConfigError("solver: quadrature size must be even and at least 2");
    }
    if (config.samples < 2) {
        throw ConfigError("solver: need at least 2 samples");
    }
    if (!(config.epsilon > 0.0)) {
        throw ConfigError("solver: epsilon must be positive");
    }
    if (config.max_iterations < 1) {
        throw ConfigError("solver: max iterations must be at least 1");
    }
    if (!(config.sweep_tolerance > 0.0)) {
        throw ConfigError("solver: sweep tolerance must be positive");
    }
    if (config.estimator == EstimatorKind::exact && !config.exact_flux) {
        throw ConfigError("solver: exact estimator needs a flux function");
    }
}

std::unique_ptr<FluxEstimator> make_estimator(const TransportProblem& problem, const SolverConfig& config) {
    switch (config.estimator) {
        case EstimatorKind::ann:
            return std::make_unique<AnnEstimator>(problem.a, problem.b, config.ann, config.seed);
        case EstimatorKind::mesh:
            return std::make_unique<MeshEstimator>(problem.a, problem.b, config.mesh_order);
        case EstimatorKind::exact:
            return std::make_unique<ExactEstimator>(problem.a, problem.b, config.exact_flux);
    }
    throw ConfigError("solver: unknown estimator kind");
}

std::vector<double> draw_samples(std::size_t n, double a, double b, RandomStream& rng) {
    if (n < 2) {
        throw ConfigError("draw_samples: need at least 2 samples");
    }
    std::vector<double> x;
    x.reserve(n);
    x.push_back(a);
    while (x.size() < n - 1) {
        const double v = rng.uniform(a, b);
        if (v > a && v < b) {
            x.push_back(v);
        }
    }
    x.push_back(b);
    std::sort(x.begin(), x.end());
    return x;
}

std::vector<double> uniform_samples(std::size_t n, double a, double b) {
    if (n < 2) {
        throw ConfigError("uniform_samples: need at least 2 samples");
    }
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) {
        x[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
    }
    x.back() = b;
    return x;
}

FluxSamples sweep(const TransportProblem& problem, const AngularQuadrature& quad, const FluxEstimator& estimator,
                  std::span<const double> samples, const MocOptions& options, std::size_t threads) {
    FluxSamples out;
    out.x.assign(samples.begin(), samples.end());
    out.psi.assign(samples.size(), 0.0);

    auto work = [&](std::size_t begin, std::size_t end) {
        std::vector<double> intensity(quad.size());
        for (std::size_t m = begin; m < end; ++m) {
            for (std::size_t i = 0; i < quad.size(); ++i) {
                try {
                    const auto point = path_length(samples[m], quad.nodes[i], problem);
                    intensity[i] = moc_intensity(point, estimator, problem, options);
                } catch (const IntegrationError& e) {
                    throw SweepError(std::string(e.what()) + " (sample " + std::to_string(m) + ", direction " +
                                         std::to_string(i) + ")",
                                     m, i);
                }
            }
            out.psi[m] = average_flux(intensity, quad);
        }
    };

    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min(threads, std::max<std::size_t>(1, samples.size()));
    if (threads <= 1) {
        work(0, samples.size());
        return out;
    }

    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    const std::size_t block = (samples.size() + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t begin = std::min(samples.size(), t * block);
        const std::size_t end = std::min(samples.size(), begin + block);
        pool.emplace_back([&, t, begin, end] {
            try {
                work(begin, end);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    // Blocks are ordered by sample, so the first error is the lowest sample.
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

ConvergenceCheck converged(std::span<const double> psi_new, std::span<const double> psi_old, double epsilon) {
    if (psi_new.size() != psi_old.size()) {
        throw ConfigError("converged: vectors differ in length");
    }
    double diff = 0.0;
    double norm = 0.0;
    for (std::size_t k = 0; k < psi_new.size(); ++k) {
        const double d = psi_new[k] - psi_old[k];
        diff += d * d;
        norm += psi_new[k] * psi_new[k];
    }
    ConvergenceCheck check;
    check.metric = std::sqrt(diff);
    check.threshold = std::max(epsilon, epsilon * std::sqrt(norm));
    check.converged = check.metric < check.threshold;
    return check;
}

namespace {

double initial_value(const TransportProblem& problem, const InitialFlux& initial) {
    switch (initial.kind) {
        case InitialFluxKind::zero:
            return 0.0;
        case InitialFluxKind::constant:
            return initial.value;
        case InitialFluxKind::boundary_average:
            return 0.5 * (problem.inflow_a + problem.inflow_b);
    }
    return 0.0;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

SolveResult solve(const TransportProblem& problem, const SolverConfig& config, const IterationObserver& observer) {
    validate(problem);
    validate(config);
    const auto started = Clock::now();

    const AngularQuadrature quad = gauss_legendre(config.quadrature_size, ZeroNode::reject);
    MocOptions moc;
    moc.tol = config.sweep_tolerance;

    SolveResult result;
    result.estimator = make_estimator(problem, config);
    FluxEstimator& estimator = *result.estimator;

    RandomStream sampler(derive_seed(config.seed, 1));
    auto next_samples = [&] {
        return config.layout == SampleLayout::random ? draw_samples(config.samples, problem.a, problem.b, sampler)
                                                     : uniform_samples(config.samples, problem.a, problem.b);
    };

    std::vector<double> x = next_samples();
    {
        TrainingSet initial{x, std::vector<double>(x.size(), initial_value(problem, config.initial))};
        try {
            result.initial_fit = estimator.fit(initial);
        } catch (const TrainingDivergence& e) {
            throw TrainingDivergence(e.what(), e.epoch(), 0);
        }
    }

    std::vector<double> previous(x.size());
    std::vector<double> current(x.size());
    for (std::size_t j = 1; j <= config.max_iterations; ++j) {
        const auto iteration_start = Clock::now();

        FluxSamples swept = sweep(problem, quad, estimator, x, moc, config.threads);
        estimator.evaluate(x, previous);

        FitReport fit;
        try {
            fit = estimator.fit(TrainingSet{swept.x, swept.psi});
        } catch (const TrainingDivergence& e) {
            throw TrainingDivergence(std::string(e.what()) + " (source iteration " + std::to_string(j) + ")",
                                     e.epoch(), j);
        }

        std::span<const double> latest = swept.psi;
        if (config.stop_metric == StopMetric::estimate_change) {
            estimator.evaluate(x, current);
            latest = current;
        }
        const ConvergenceCheck check = converged(latest, previous, config.epsilon);
        IterationRecord record{j, check.metric, check.threshold, fit.loss, fit.epochs, seconds_since(iteration_start)};
        result.history.push_back(record);
        if (observer) {
            observer(record);
        }

        result.final_samples = std::move(swept);
        if (check.converged) {
            result.converged = true;
            break;
        }
        if (config.resample) {
            x = next_samples();
        }
    }
    result.seconds = seconds_since(started);
    return result;
}

}  // namespace annmoc
