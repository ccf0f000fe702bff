#include "annmoc/estimator.hpp"

#include "annmoc/error.hpp"
#include "annmoc/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

namespace annmoc {

std::string_view to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::ann:
            return "ann";
        case EstimatorKind::mesh:
            return "mesh";
        case EstimatorKind::exact:
            return "exact";
    }
    return "ann";
}

EstimatorKind parse_estimator_kind(std::string_view name) {
    if (name == "ann") return EstimatorKind::ann;
    if (name == "mesh") return EstimatorKind::mesh;
    if (name == "exact") return EstimatorKind::exact;
    throw ConfigError("unknown estimator kind '" + std::string(name) + "'");
}

std::string_view to_string(Interpolation order) {
    return order == Interpolation::linear ? "linear" : "cubic";
}

Interpolation parse_interpolation(std::string_view name) {
    if (name == "linear") return Interpolation::linear;
    if (name == "cubic") return Interpolation::cubic;
    throw ConfigError("unknown interpolation order '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

FluxEstimator::FluxEstimator(double a, double b) : a_(a), b_(b) {
    if (!(a < b)) {
        throw ConfigError("flux estimator: domain requires a < b");
    }
}

FluxEstimator::FluxEstimator(const FluxEstimator& other) : a_(other.a_), b_(other.b_), clamped_(0) {}

void FluxEstimator::evaluate(std::span<const double> x, std::span<double> out) const {
    if (x.size() != out.size()) {
        throw ConfigError("flux estimator: input/output size mismatch");
    }
    constexpr std::size_t chunk = 64;
    std::array<double, chunk> inside{};
    for (std::size_t start = 0; start < x.size(); start += chunk) {
        const std::size_t len = std::min(chunk, x.size() - start);
        std::size_t clamped = 0;
        for (std::size_t k = 0; k < len; ++k) {
            const double v = x[start + k];
            const double c = std::clamp(v, a_, b_);
            clamped += (c != v);
            inside[k] = c;
        }
        if (clamped != 0) {
            clamped_.fetch_add(clamped, std::memory_order_relaxed);
        }
        evaluate_inside(std::span<const double>(inside.data(), len), out.subspan(start, len));
    }
}

double FluxEstimator::operator()(double x) const {
    double out = 0.0;
    evaluate(std::span<const double>(&x, 1), std::span<double>(&out, 1));
    return out;
}

// ---------------------------------------------------------------------------

AnnEstimator::AnnEstimator(double a, double b, const AnnSettings& settings, std::uint64_t seed)
    : AnnEstimator(a, b, Mlp::glorot(settings.widths, settings.hidden, settings.output, derive_seed(seed, 0)),
                   settings, seed) {}

AnnEstimator::AnnEstimator(double a, double b, Mlp net, const AnnSettings& settings, std::uint64_t seed)
    : FluxEstimator(a, b),
      settings_(settings),
      seed_(seed),
      net_(std::move(net)),
      adam_(AdamState::for_network(net_, settings.adam)) {}

FitReport AnnEstimator::fit(const TrainingSet& set) {
    ++fits_;
    if (settings_.cold_start) {
        net_ = Mlp::glorot(settings_.widths, settings_.hidden, settings_.output, derive_seed(seed_, fits_));
        adam_ = AdamState::for_network(net_, settings_.adam);
    }
    if (!settings_.normalize_input) {
        last_ = train(net_, set, settings_.schedule, adam_);
    } else {
        TrainingSet mapped{set.x, set.target};
        for (double& x : mapped.x) {
            x = input_scale() * x + input_shift();
        }
        last_ = train(net_, mapped, settings_.schedule, adam_);
    }
    return FitReport{last_.final_loss, last_.epochs};
}

double AnnEstimator::input_scale() const {
    return settings_.normalize_input ? 2.0 / (upper() - lower()) : 1.0;
}

double AnnEstimator::input_shift() const {
    return settings_.normalize_input ? -(upper() + lower()) / (upper() - lower()) : 0.0;
}

Mlp AnnEstimator::standalone_network() const {
    Parameters parameters = net_.parameters();
    auto& first = parameters.front();
    first.bias += input_shift() * first.weights.col(0);
    first.weights *= input_scale();
    return Mlp(std::move(parameters), net_.activations());
}

std::unique_ptr<FluxEstimator> AnnEstimator::clone() const { return std::make_unique<AnnEstimator>(*this); }

void AnnEstimator::evaluate_inside(std::span<const double> x, std::span<double> out) const {
    if (!settings_.normalize_input) {
        net_.forward(x, out);
        return;
    }
    std::array<double, 64> mapped;
    for (std::size_t begin = 0; begin < x.size(); begin += mapped.size()) {
        const std::size_t n = std::min(mapped.size(), x.size() - begin);
        for (std::size_t k = 0; k < n; ++k) {
            mapped[k] = input_scale() * x[begin + k] + input_shift();
        }
        net_.forward(std::span<const double>(mapped.data(), n), out.subspan(begin, n));
    }
}

// ---------------------------------------------------------------------------

namespace {

void check_grid(const std::vector<double>& grid, const std::vector<double>& values) {
    if (grid.size() < 2 || grid.size() != values.size()) {
        throw ConfigError("mesh estimator: need at least two nodes and one value per node");
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!std::isfinite(grid[k]) || !std::isfinite(values[k])) {
            throw ConfigError("mesh estimator: non-finite node or value");
        }
        if (k > 0 && !(grid[k] > grid[k - 1])) {
            throw ConfigError("mesh estimator: nodes must be strictly increasing");
        }
    }
}

}  // namespace

MeshEstimator::MeshEstimator(double a, double b, Interpolation order)
    : FluxEstimator(a, b), grid_{a, b}, values_{0.0, 0.0}, order_(order) {}

MeshEstimator::MeshEstimator(std::vector<double> grid, std::vector<double> values, Interpolation order)
    : FluxEstimator(grid.empty() ? 0.0 : grid.front(), grid.empty() ? 0.0 : grid.back()),
      grid_(std::move(grid)),
      values_(std::move(values)),
      order_(order) {
    check_grid(grid_, values_);
}

FitReport MeshEstimator::fit(const TrainingSet& set) {
    if (set.x.empty() || set.x.size() != set.target.size()) {
        throw ConfigError("mesh estimator: training set must be nonempty with one target per sample");
    }
    std::vector<std::size_t> order(set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return set.x[i] < set.x[j]; });

    std::vector<double> grid;
    std::vector<double> values;
    grid.reserve(set.size() + 2);
    values.reserve(set.size() + 2);
    for (const auto k : order) {
        const double x = set.x[k];
        if (x < lower() || x > upper()) {
            throw ConfigError("mesh estimator: sample outside the domain");
        }
        if (!grid.empty() && x == grid.back()) {
            throw ConfigError("mesh estimator: duplicate sample point " + std::to_string(x));
        }
        grid.push_back(x);
        values.push_back(set.target[k]);
    }
    if (grid.front() > lower()) {
        grid.insert(grid.begin(), lower());
        values.insert(values.begin(), values.front());
    }
    if (grid.back() < upper()) {
        grid.push_back(upper());
        values.push_back(values.back());
    }
    check_grid(grid, values);
    grid_ = std::move(grid);
    values_ = std::move(values);
    return FitReport{0.0, 0};
}

std::unique_ptr<FluxEstimator> MeshEstimator::clone() const { return std::make_unique<MeshEstimator>(*this); }

double MeshEstimator::interpolate(double x) const {
    const std::size_t n = grid_.size();
    // Interval [grid[k], grid[k+1]] containing x.
    auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    std::size_t k = (it == grid_.begin()) ? 0 : static_cast<std::size_t>(it - grid_.begin()) - 1;
    k = std::min(k, n - 2);

    if (order_ == Interpolation::linear || n == 2) {
        const double t = (x - grid_[k]) / (grid_[k + 1] - grid_[k]);
        return values_[k] + t * (values_[k + 1] - values_[k]);
    }

    const std::size_t width = std::min<std::size_t>(4, n);
    std::size_t first = (k >= 1) ? k - 1 : 0;
    first = std::min(first, n - width);
    double sum = 0.0;
    for (std::size_t i = first; i < first + width; ++i) {
        double basis = 1.0;
        for (std::size_t j = first; j < first + width; ++j) {
            if (j != i) {
                basis *= (x - grid_[j]) / (grid_[i] - grid_[j]);
            }
        }
        sum += basis * values_[i];
    }
    return sum;
}

void MeshEstimator::evaluate_inside(std::span<const double> x, std::span<double> out) const {
    for (std::size_t k = 0; k < x.size(); ++k) {
        out[k] = interpolate(x[k]);
    }
}

// ---------------------------------------------------------------------------

ExactEstimator::ExactEstimator(double a, double b, std::function<double(double)> psi)
    : FluxEstimator(a, b), psi_(std::move(psi)) {
    if (!psi_) {
        throw ConfigError("exact estimator: empty function");
    }
}

FitReport ExactEstimator::fit(const TrainingSet& set) {
    double sum = 0.0;
    for (std::size_t m = 0; m < set.size(); ++m) {
        const double r = psi_(set.x[m]) - set.target[m];
        sum += r * r;
    }
    return FitReport{set.size() ? sum / static_cast<double>(set.size()) : 0.0, 0};
}

std::unique_ptr<FluxEstimator> ExactEstimator::clone() const { return std::make_unique<ExactEstimator>(*this); }

void ExactEstimator::evaluate_inside(std::span<const double> x, std::span<double> out) const {
    for (std::size_t k = 0; k < x.size(); ++k) {
        out[k] = psi_(x[k]);
    }
}

}  // namespace annmoc
