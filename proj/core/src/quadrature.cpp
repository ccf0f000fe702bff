#include "annmoc/quadrature.hpp"

#include "annmoc/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>

namespace annmoc {

namespace {

// P_n(z) and P_n'(z) by the three-term recurrence.
std::pair<double, double> legendre_with_derivative(std::size_t n, double z) {
    double p_prev = 1.0;
    double p = z;
    for (std::size_t k = 2; k <= n; ++k) {
        const double p_next = ((2.0 * k - 1.0) * z * p - (k - 1.0) * p_prev) / static_cast<double>(k);
        p_prev = p;
        p = p_next;
    }
    const double dp = static_cast<double>(n) * (z * p - p_prev) / (z * z - 1.0);
    return {p, dp};
}

// 21-point Kronrod abscissae on [0, 1]; odd indices (1, 3, ..., 9) are the
// 10-point Gauss nodes. Last entry is the centre.
constexpr std::array<double, 11> kronrod_nodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0,
};

constexpr std::array<double, 11> kronrod_weights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
};

constexpr std::array<double, 5> gauss_weights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
};

constexpr std::size_t kronrod_points = 21;

struct Panel {
    double lo;
    double hi;
    double value;
    double error;

    bool operator<(const Panel& other) const { return error < other.error; }
};

// QUADPACK qk21 on one panel: Kronrod value plus a scaled |K - G| error.
Panel evaluate_panel(const BatchIntegrand& f, double lo, double hi, std::array<double, kronrod_points>& x,
                     std::array<double, kronrod_points>& fx) {
    const double centre = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    for (std::size_t j = 0; j < 10; ++j) {
        x[2 * j] = centre - half * kronrod_nodes[j];
        x[2 * j + 1] = centre + half * kronrod_nodes[j];
    }
    x[20] = centre;
    f(std::span<const double>(x), std::span<double>(fx));

    double kronrod = kronrod_weights[10] * fx[20];
    double gauss = 0.0;
    double abs_sum = std::abs(kronrod);
    for (std::size_t j = 0; j < 10; ++j) {
        const double pair = fx[2 * j] + fx[2 * j + 1];
        kronrod += kronrod_weights[j] * pair;
        abs_sum += kronrod_weights[j] * (std::abs(fx[2 * j]) + std::abs(fx[2 * j + 1]));
        if (j % 2 == 1) {
            gauss += gauss_weights[j / 2] * pair;
        }
    }
    const double mean = 0.5 * kronrod;
    double asc = kronrod_weights[10] * std::abs(fx[20] - mean);
    for (std::size_t j = 0; j < 10; ++j) {
        asc += kronrod_weights[j] * (std::abs(fx[2 * j] - mean) + std::abs(fx[2 * j + 1] - mean));
    }

    const double width = std::abs(half);
    double error = std::abs((kronrod - gauss) * half);
    const double res_asc = asc * width;
    const double res_abs = abs_sum * width;
    if (res_asc != 0.0 && error != 0.0) {
        error = res_asc * std::min(1.0, std::pow(200.0 * error / res_asc, 1.5));
    }
    constexpr double epsilon = std::numeric_limits<double>::epsilon();
    if (res_abs > std::numeric_limits<double>::min() / (50.0 * epsilon)) {
        error = std::max(50.0 * epsilon * res_abs, error);
    }
    return Panel{lo, hi, kronrod * half, error};
}

}  // namespace

AngularQuadrature gauss_legendre(std::size_t n, ZeroNode zero) {
    if (n == 0) {
        throw ConfigError("gauss_legendre: rule size must be at least 1");
    }
    if (zero == ZeroNode::reject && n % 2 == 1) {
        throw ConfigError("gauss_legendre: odd rule size " + std::to_string(n) +
                          " has a node at mu = 0");
    }

    AngularQuadrature rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);

    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        const bool centre = (n % 2 == 1) && (i == half - 1);
        double z = centre ? 0.0
                          : std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                                     (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            auto [p, d] = legendre_with_derivative(n, z);
            dp = d;
            if (centre) {
                break;
            }
            const double dz = p / d;
            z -= dz;
            if (std::abs(dz) <= 1e-15) {
                dp = legendre_with_derivative(n, z).second;
                break;
            }
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

IntegrationResult integrate_adaptive(const BatchIntegrand& f, double lo, double hi, double tol,
                                     const IntegrationOptions& options) {
    if (!(lo <= hi)) {
        throw ConfigError("integrate_adaptive: require lo <= hi");
    }
    if (!(tol > 0.0)) {
        throw ConfigError("integrate_adaptive: tolerance must be positive");
    }
    IntegrationResult result;
    if (lo == hi) {
        return result;
    }

    std::array<double, kronrod_points> x{};
    std::array<double, kronrod_points> fx{};
    std::priority_queue<Panel> panels;

    const std::size_t initial = std::max<std::size_t>(1, options.initial_panels);
    const double step = (hi - lo) / static_cast<double>(initial);
    double total_error = 0.0;
    for (std::size_t k = 0; k < initial; ++k) {
        const double p_lo = lo + step * static_cast<double>(k);
        const double p_hi = (k + 1 == initial) ? hi : lo + step * static_cast<double>(k + 1);
        Panel p = evaluate_panel(f, p_lo, p_hi, x, fx);
        total_error += p.error;
        panels.push(p);
    }
    result.evaluations = initial * kronrod_points;

    while (total_error > tol) {
        if (panels.size() >= options.max_panels) {
            double value = 0.0;
            for (auto copy = panels; !copy.empty(); copy.pop()) {
                value += copy.top().value;
            }
            throw IntegrationError("integrate_adaptive: panel budget of " + std::to_string(options.max_panels) +
                                       " exhausted before reaching tolerance",
                                   value, total_error);
        }
        const Panel worst = panels.top();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            throw IntegrationError("integrate_adaptive: panel cannot be bisected further", worst.value,
                                   total_error);
        }
        panels.pop();
        const Panel left = evaluate_panel(f, worst.lo, mid, x, fx);
        const Panel right = evaluate_panel(f, mid, worst.hi, x, fx);
        result.evaluations += 2 * kronrod_points;
        total_error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }

    // Resum from scratch so the incremental error bookkeeping never leaks into
    // the reported values.
    result.panels = panels.size();
    for (; !panels.empty(); panels.pop()) {
        result.value += panels.top().value;
        result.error_estimate += panels.top().error;
    }
    return result;
}

double integrate_on_segment(const std::function<double(double)>& f, double lo, double hi, double tol,
                            const IntegrationOptions& options) {
    const BatchIntegrand batch = [&f](std::span<const double> points, std::span<double> values) {
        for (std::size_t k = 0; k < points.size(); ++k) {
            values[k] = f(points[k]);
        }
    };
    return integrate_adaptive(batch, lo, hi, tol, options).value;
}

}  // namespace annmoc
