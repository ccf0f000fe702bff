#pragma once

#include "annmoc/neural.hpp"

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace annmoc {

enum class EstimatorKind { ann, mesh, exact };

std::string_view to_string(EstimatorKind kind);
EstimatorKind parse_estimator_kind(std::string_view name);

struct FitReport {
    /// Mean squared misfit on the fitted set after the fit.
    double loss = 0.0;
    std::size_t epochs = 0;
};

/// Callable estimate of the average flux on [a, b].
///
/// Evaluation is const and safe for any number of concurrent readers; fit
/// needs exclusive access. Queries outside [a, b] are clamped to the nearest
/// endpoint and counted in clamp_count().
class FluxEstimator {
  public:
    FluxEstimator(double a, double b);
    virtual ~FluxEstimator() = default;

    FluxEstimator(const FluxEstimator& other);
    FluxEstimator& operator=(const FluxEstimator&) = delete;

    virtual EstimatorKind kind() const = 0;
    virtual FitReport fit(const TrainingSet& set) = 0;
    virtual std::unique_ptr<FluxEstimator> clone() const = 0;

    void evaluate(std::span<const double> x, std::span<double> out) const;
    double operator()(double x) const;

    double lower() const { return a_; }
    double upper() const { return b_; }
    std::size_t clamp_count() const { return clamped_.load(std::memory_order_relaxed); }

  protected:
    /// Called with points already inside [a, b].
    virtual void evaluate_inside(std::span<const double> x, std::span<double> out) const = 0;

  private:
    double a_;
    double b_;
    mutable std::atomic<std::size_t> clamped_{0};
};

/// estimate(est, x): the estimator's value at a single point.
inline double estimate(const FluxEstimator& estimator, double x) { return estimator(x); }

struct AnnSettings {
    std::vector<std::size_t> widths{1, 100, 50, 5, 1};
    Activation hidden = Activation::tanh;
    Activation output = Activation::identity;
    AdamConfig adam{.learning_rate = 1e-3, .decay_half_life = 1e4, .min_learning_rate = 1e-5};
    TrainSchedule schedule{.max_epochs = 5000, .loss_target = 3e-9, .patience = 200, .improvement_floor = 1e-3};
    /// Re-draw the weights before every fit instead of continuing from the
    /// previous ones.
    bool cold_start = false;
    /// Feed the network 2 (x - a) / (b - a) - 1 instead of x.
    bool normalize_input = true;
};

/// MLP surrogate; fit runs full-batch Adam from the current weights.
class AnnEstimator final : public FluxEstimator {
  public:
    AnnEstimator(double a, double b, const AnnSettings& settings, std::uint64_t seed);
    AnnEstimator(double a, double b, Mlp net, const AnnSettings& settings, std::uint64_t seed);

    EstimatorKind kind() const override { return EstimatorKind::ann; }
    FitReport fit(const TrainingSet& set) override;
    std::unique_ptr<FluxEstimator> clone() const override;

    /// The trained network, which sees inputs after the optional [-1, 1] map.
    const Mlp& network() const { return net_; }
    /// A network that takes x directly: the input map folded into layer 1.
    Mlp standalone_network() const;
    const AdamState& optimizer() const { return adam_; }
    const AnnSettings& settings() const { return settings_; }
    const TrainReport& last_training() const { return last_; }

  protected:
    void evaluate_inside(std::span<const double> x, std::span<double> out) const override;

  private:
    double input_scale() const;
    double input_shift() const;

    AnnSettings settings_;
    std::uint64_t seed_;
    std::uint64_t fits_ = 0;
    Mlp net_;
    AdamState adam_;
    TrainReport last_;
};

enum class Interpolation { linear, cubic };

std::string_view to_string(Interpolation order);
Interpolation parse_interpolation(std::string_view name);

/// Piecewise interpolant through stored (x, psi) nodes. Cubic order uses the
/// four nearest nodes (Lagrange form), falling back to fewer near the ends
/// of short grids.
class MeshEstimator final : public FluxEstimator {
  public:
    /// Starts as the zero function on the two-point grid {a, b}.
    MeshEstimator(double a, double b, Interpolation order);
    /// Throws ConfigError unless `grid` is strictly increasing from a to b
    /// with finite values.
    MeshEstimator(std::vector<double> grid, std::vector<double> values, Interpolation order);

    EstimatorKind kind() const override { return EstimatorKind::mesh; }
    /// Replaces the nodes by the set sorted in x. Missing endpoints are added
    /// with the value of the nearest sample. Duplicate x throws ConfigError.
    FitReport fit(const TrainingSet& set) override;
    std::unique_ptr<FluxEstimator> clone() const override;

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    Interpolation order() const { return order_; }

  protected:
    void evaluate_inside(std::span<const double> x, std::span<double> out) const override;

  private:
    double interpolate(double x) const;

    std::vector<double> grid_;
    std::vector<double> values_;
    Interpolation order_;
};

/// Wraps a known function; fit leaves it unchanged.
class ExactEstimator final : public FluxEstimator {
  public:
    ExactEstimator(double a, double b, std::function<double(double)> psi);

    EstimatorKind kind() const override { return EstimatorKind::exact; }
    FitReport fit(const TrainingSet& set) override;
    std::unique_ptr<FluxEstimator> clone() const override;

  protected:
    void evaluate_inside(std::span<const double> x, std::span<double> out) const override;

  private:
    std::function<double(double)> psi_;
};

}  // namespace annmoc
