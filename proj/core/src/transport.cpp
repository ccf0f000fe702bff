#include "annmoc/transport.hpp"

#include "annmoc/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace annmoc {

void validate(const TransportProblem& problem, std::size_t checks) {
    if (!(problem.a < problem.b) || !std::isfinite(problem.a) || !std::isfinite(problem.b)) {
        throw ConfigError("transport problem: require finite a < b");
    }
    if (!(problem.inflow_a >= 0.0) || !(problem.inflow_b >= 0.0) || !std::isfinite(problem.inflow_a) ||
        !std::isfinite(problem.inflow_b)) {
        throw ConfigError("transport problem: boundary inflows must be finite and nonnegative");
    }
    if (!problem.q) {
        throw ConfigError("transport problem: missing source term");
    }
    const std::size_t n = std::max<std::size_t>(2, checks);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = problem.a + (problem.b - problem.a) * static_cast<double>(k) / static_cast<double>(n - 1);
        const double st = problem.sigma_t(x);
        const double ss = problem.sigma_s(x);
        if (!std::isfinite(st) || !std::isfinite(ss) || !std::isfinite(problem.q(x, 1.0)) ||
            !std::isfinite(problem.q(x, -1.0))) {
            throw ConfigError("transport problem: non-finite data at x = " + std::to_string(x));
        }
        if (ss < 0.0 || ss > st) {
            throw ConfigError("transport problem: need 0 <= sigma_s <= sigma_t, violated at x = " +
                              std::to_string(x));
        }
    }
}

double inflow_boundary(double mu, const TransportProblem& problem) { return mu > 0.0 ? problem.a : problem.b; }

CharacteristicPoint path_length(double x, double mu, const TransportProblem& problem) {
    if (mu == 0.0 || !std::isfinite(mu)) {
        throw ConfigError("path_length: direction cosine must be nonzero");
    }
    if (!(x >= problem.a && x <= problem.b)) {
        throw ConfigError("path_length: x = " + std::to_string(x) + " outside the domain");
    }
    const double s = (x - inflow_boundary(mu, problem)) / mu;
    return CharacteristicPoint{x, mu, std::max(0.0, s)};
}

double optical_depth(double s_lo, double s_hi, double mu, const TransportProblem& problem, double tol) {
    if (!(s_lo >= 0.0 && s_lo <= s_hi)) {
        throw ConfigError("optical_depth: require 0 <= s_lo <= s_hi");
    }
    if (s_lo == s_hi) {
        return 0.0;
    }
    if (problem.sigma_t.is_constant()) {
        return problem.sigma_t.constant_value() * (s_hi - s_lo);
    }
    const double x_in = inflow_boundary(mu, problem);
    return integrate_on_segment([&](double s) { return problem.sigma_t(x_in + mu * s); }, s_lo, s_hi, tol);
}

double moc_intensity(const CharacteristicPoint& point, const FluxEstimator& estimator,
                     const TransportProblem& problem, const MocOptions& options) {
    const double mu = point.mu;
    const double s = point.s;
    const double inflow = mu > 0.0 ? problem.inflow_a : problem.inflow_b;
    if (mu == 0.0) {
        throw ConfigError("moc_intensity: direction cosine must be nonzero");
    }
    if (s == 0.0) {
        return inflow;
    }

    const bool constant = problem.sigma_t.is_constant();
    const double sigma = constant ? problem.sigma_t.constant_value() : 0.0;
    const double depth = constant ? sigma * s : optical_depth(0.0, s, mu, problem);

    double lo = 0.0;
    if (constant && depth > options.depth_cutoff) {
        lo = s - options.depth_cutoff / sigma;
    }
    const double window_depth = constant ? sigma * (s - lo) : depth;

    IntegrationOptions integration = options.integration;
    integration.initial_panels = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(window_depth / options.panel_depth)), 1, 64);

    // Positions measured back from the evaluation point keep x(s) = x at s' = s
    // free of rounding.
    const BatchIntegrand integrand = [&](std::span<const double> sp, std::span<double> values) {
        constexpr std::size_t chunk = 32;
        std::array<double, chunk> x{};
        std::array<double, chunk> psi{};
        for (std::size_t start = 0; start < sp.size(); start += chunk) {
            const std::size_t n = std::min(chunk, sp.size() - start);
            for (std::size_t k = 0; k < n; ++k) {
                x[k] = point.x - mu * (s - sp[start + k]);
            }
            estimator.evaluate(std::span<const double>(x.data(), n), std::span<double>(psi.data(), n));
            for (std::size_t k = 0; k < n; ++k) {
                const double sk = sp[start + k];
                const double attenuation =
                    constant ? std::exp(-sigma * (s - sk)) : std::exp(-optical_depth(sk, s, mu, problem));
                values[start + k] = (problem.sigma_s(x[k]) * psi[k] + problem.q(x[k], mu)) * attenuation;
            }
        }
    };
    const IntegrationResult source = integrate_adaptive(integrand, lo, s, options.tol, integration);
    return inflow * std::exp(-depth) + source.value;
}

double average_flux(std::span<const double> intensities, const AngularQuadrature& quad) {
    if (intensities.size() != quad.size()) {
        throw ConfigError("average_flux: " + std::to_string(intensities.size()) + " intensities for a " +
                          std::to_string(quad.size()) + "-point quadrature");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < intensities.size(); ++i) {
        sum += quad.weights[i] * intensities[i];
    }
    return 0.5 * sum;
}

}  // namespace annmoc
