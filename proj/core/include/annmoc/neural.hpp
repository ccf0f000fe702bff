#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace annmoc {

enum class Activation { identity, tanh, sigmoid };

std::string_view to_string(Activation activation);
/// Parses "identity", "tanh" or "sigmoid"; throws ConfigError otherwise.
Activation parse_activation(std::string_view name);

/// Weights (fan_out x fan_in) and bias (fan_out) of one dense layer.
struct LayerParameters {
    Eigen::MatrixXd weights;
    Eigen::VectorXd bias;
};

/// Parameter-shaped storage; also used for gradients and Adam moments.
using Parameters = std::vector<LayerParameters>;

/// Samples {x_m, psi_m} a surrogate is fit to.
struct TrainingSet {
    std::vector<double> x;
    std::vector<double> target;

    std::size_t size() const { return x.size(); }
};

/// Scalar-in, scalar-out multilayer perceptron:
///   a_0 = x,  a_l = f_l(W_l a_{l-1} + b_l),  output = a_L.
class Mlp {
  public:
    Mlp() = default;
    /// Throws ConfigError unless the shapes chain from width 1 to width 1 and
    /// every parameter is finite.
    Mlp(Parameters parameters, std::vector<Activation> activations);

    /// Uniform +-sqrt(6 / (fan_in + fan_out)) weights and biases drawn from a
    /// seeded stream. `widths` includes the input and output widths (both 1).
    static Mlp glorot(std::span<const std::size_t> widths, Activation hidden, Activation output,
                      std::uint64_t seed);
    /// Same architecture with every weight and bias set to zero.
    static Mlp zeros(std::span<const std::size_t> widths, Activation hidden, Activation output);

    double forward(double x) const;
    /// Batched forward pass, out[k] = forward(x[k]).
    void forward(std::span<const double> x, std::span<double> out) const;

    const Parameters& parameters() const { return parameters_; }
    Parameters& parameters() { return parameters_; }
    const std::vector<Activation>& activations() const { return activations_; }

    std::size_t layer_count() const { return parameters_.size(); }
    std::vector<std::size_t> widths() const;
    std::size_t parameter_count() const;

  private:
    Parameters parameters_;
    std::vector<Activation> activations_;
};

/// Zero-filled storage shaped like `net`'s parameters.
Parameters zeros_like(const Mlp& net);
/// True when every layer of `a` and `b` has identical shapes.
bool same_shape(const Parameters& a, const Parameters& b);

/// Mean squared error (1/n) sum (net(x_m) - psi_m)^2.
double mse_loss(const Mlp& net, const TrainingSet& set);

struct LossGradient {
    double loss = 0.0;
    Parameters gradient;
};

/// Loss and its exact gradient by reverse-mode differentiation.
LossGradient loss_and_gradient(const Mlp& net, const TrainingSet& set);
Parameters mlp_gradient(const Mlp& net, const TrainingSet& set);

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    /// Step size halves every `decay_half_life` optimizer steps (0 = constant)
    /// and never drops below `min_learning_rate`.
    double decay_half_life = 0.0;
    double min_learning_rate = 0.0;

    double step_size(std::size_t step) const;
};

struct AdamState {
    AdamConfig config;
    std::size_t step = 0;
    Parameters first_moment;
    Parameters second_moment;

    static AdamState for_network(const Mlp& net, const AdamConfig& config = {});
};

/// One bias-corrected Adam update of `net` in place. Throws ConfigError on
/// shape mismatch between net, gradient and state.
void adam_step(Mlp& net, const Parameters& gradient, AdamState& state);

struct TrainSchedule {
    std::size_t max_epochs = 5000;
    double loss_target = 1e-7;
    /// Stop once the best loss improved by less than `improvement_floor`
    /// (relative) over the last `patience` epochs.
    std::size_t patience = 200;
    double improvement_floor = 1e-3;
};

enum class TrainStop { target_reached, patience, max_epochs };

struct TrainReport {
    double initial_loss = 0.0;
    double final_loss = 0.0;
    std::size_t epochs = 0;
    TrainStop stop = TrainStop::max_epochs;
};

/// Full-batch Adam. On return `net` holds the best parameters seen, so the
/// final loss never exceeds the initial one. Throws TrainingDivergence on a
/// non-finite loss.
TrainReport train(Mlp& net, const TrainingSet& set, const TrainSchedule& schedule, AdamState& state);

/// Plain-text checkpoint of a network and (optionally) its optimizer state.
///
///   annmoc-mlp 1
///   layers <L>
///   layer <fan_in> <fan_out> <activation>     (repeated L times, each
///   <fan_out rows of fan_in weights>           followed by its weights
///   <one line of fan_out biases>               and biases)
///   adam <step> <lr> <beta1> <beta2> <eps>    (optional trailer, followed by
///   <first moments, then second moments>       moments in layer layout)
///
/// Values are written with 17 significant digits and read back exactly.
void write_mlp(std::ostream& out, const Mlp& net, const AdamState* state = nullptr);
/// Reads a checkpoint; `state` receives the Adam trailer when present.
/// Returns false in `has_state` if there is none. Throws ConfigError on a
/// malformed stream.
Mlp read_mlp(std::istream& in, AdamState* state = nullptr, bool* has_state = nullptr);

}  // namespace annmoc
