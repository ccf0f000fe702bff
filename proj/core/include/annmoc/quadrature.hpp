#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace annmoc {

/// Discrete ordinates {mu_i, w_i} on [-1, 1], nodes ascending.
struct AngularQuadrature {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

enum class ZeroNode { allow, reject };

/// N-point Gauss-Legendre rule on [-1, 1].
///
/// Nodes come from Newton iteration on P_N started at Chebyshev guesses and
/// are mirrored so the rule is exactly symmetric. Odd N places a node at
/// mu = 0; pass ZeroNode::reject to refuse such rules (the characteristic
/// sweep cannot use them).
AngularQuadrature gauss_legendre(std::size_t n, ZeroNode zero = ZeroNode::allow);

/// Fills `values[k] = f(points[k])` for every k.
using BatchIntegrand = std::function<void(std::span<const double> points, std::span<double> values)>;

struct IntegrationOptions {
    std::size_t max_panels = std::size_t{1} << 16;
    /// Number of equal panels the interval is split into before adapting.
    std::size_t initial_panels = 1;
};

struct IntegrationResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t panels = 0;
    std::size_t evaluations = 0;
};

/// Globally adaptive 21-point Gauss-Kronrod integration of f over [lo, hi].
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops below `tol`. Throws IntegrationError when the panel budget
/// runs out first. The integrand is called once per panel with all 21 nodes.
IntegrationResult integrate_adaptive(const BatchIntegrand& f, double lo, double hi, double tol,
                                     const IntegrationOptions& options = {});

/// Scalar convenience form returning only the integral value.
double integrate_on_segment(const std::function<double(double)>& f, double lo, double hi, double tol,
                            const IntegrationOptions& options = {});

}  // namespace annmoc
