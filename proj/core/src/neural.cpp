#include "annmoc/neural.hpp"

#include "annmoc/error.hpp"
#include "annmoc/random.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace annmoc {

namespace {

using Matrix = Eigen::MatrixXd;

void apply_activation(Matrix& z, Activation activation) {
    switch (activation) {
        case Activation::identity:
            break;
        case Activation::tanh:
            // 1 - 2/(e^{2z}+1) vectorizes through Eigen's packet exp and stays
            // within a few ulp of std::tanh.
            z = (1.0 - 2.0 / ((2.0 * z.array()).exp() + 1.0)).matrix();
            break;
        case Activation::sigmoid:
            z = (1.0 / (1.0 + (-z.array()).exp())).matrix();
            break;
    }
}

// f'(z) expressed through the activation output a = f(z).
void multiply_by_derivative(Matrix& delta, const Matrix& a, Activation activation) {
    switch (activation) {
        case Activation::identity:
            break;
        case Activation::tanh:
            delta.array() *= 1.0 - a.array().square();
            break;
        case Activation::sigmoid:
            delta.array() *= a.array() * (1.0 - a.array());
            break;
    }
}

Matrix forward_layer(const LayerParameters& layer, Activation activation, const Matrix& input) {
    Matrix z = layer.weights * input;
    z.colwise() += layer.bias;
    apply_activation(z, activation);
    return z;
}

void check_set(const TrainingSet& set) {
    if (set.x.empty() || set.x.size() != set.target.size()) {
        throw ConfigError("training set must be nonempty with one target per sample");
    }
}

}  // namespace

std::string_view to_string(Activation activation) {
    switch (activation) {
        case Activation::identity:
            return "identity";
        case Activation::tanh:
            return "tanh";
        case Activation::sigmoid:
            return "sigmoid";
    }
    return "identity";
}

Activation parse_activation(std::string_view name) {
    if (name == "identity") return Activation::identity;
    if (name == "tanh") return Activation::tanh;
    if (name == "sigmoid") return Activation::sigmoid;
    throw ConfigError("unknown activation '" + std::string(name) + "'");
}

Mlp::Mlp(Parameters parameters, std::vector<Activation> activations)
    : parameters_(std::move(parameters)), activations_(std::move(activations)) {
    if (parameters_.empty() || parameters_.size() != activations_.size()) {
        throw ConfigError("Mlp: need one activation per layer and at least one layer");
    }
    Eigen::Index fan_in = 1;
    for (std::size_t l = 0; l < parameters_.size(); ++l) {
        const auto& layer = parameters_[l];
        if (layer.weights.cols() != fan_in || layer.bias.size() != layer.weights.rows() ||
            layer.weights.rows() < 1) {
            throw ConfigError("Mlp: layer " + std::to_string(l + 1) + " does not chain with its input");
        }
        if (!layer.weights.allFinite() || !layer.bias.allFinite()) {
            throw ConfigError("Mlp: layer " + std::to_string(l + 1) + " has non-finite parameters");
        }
        fan_in = layer.weights.rows();
    }
    if (fan_in != 1) {
        throw ConfigError("Mlp: output width must be 1");
    }
}

namespace {

void check_widths(std::span<const std::size_t> widths) {
    if (widths.size() < 2 || widths.front() != 1 || widths.back() != 1) {
        throw ConfigError("Mlp: widths must start and end with 1");
    }
    for (const auto w : widths) {
        if (w == 0) {
            throw ConfigError("Mlp: layer widths must be positive");
        }
    }
}

std::vector<Activation> layer_activations(std::size_t layers, Activation hidden, Activation output) {
    std::vector<Activation> activations(layers, hidden);
    activations.back() = output;
    return activations;
}

}  // namespace

Mlp Mlp::glorot(std::span<const std::size_t> widths, Activation hidden, Activation output, std::uint64_t seed) {
    check_widths(widths);
    RandomStream rng(seed);
    Parameters parameters;
    for (std::size_t l = 1; l < widths.size(); ++l) {
        const auto fan_in = static_cast<Eigen::Index>(widths[l - 1]);
        const auto fan_out = static_cast<Eigen::Index>(widths[l]);
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        LayerParameters layer{Matrix(fan_out, fan_in), Eigen::VectorXd(fan_out)};
        for (Eigen::Index i = 0; i < fan_out; ++i) {
            for (Eigen::Index j = 0; j < fan_in; ++j) {
                layer.weights(i, j) = rng.uniform(-limit, limit);
            }
        }
        for (Eigen::Index i = 0; i < fan_out; ++i) {
            layer.bias(i) = rng.uniform(-limit, limit);
        }
        parameters.push_back(std::move(layer));
    }
    return Mlp(std::move(parameters), layer_activations(widths.size() - 1, hidden, output));
}

Mlp Mlp::zeros(std::span<const std::size_t> widths, Activation hidden, Activation output) {
    check_widths(widths);
    Parameters parameters;
    for (std::size_t l = 1; l < widths.size(); ++l) {
        const auto fan_in = static_cast<Eigen::Index>(widths[l - 1]);
        const auto fan_out = static_cast<Eigen::Index>(widths[l]);
        parameters.push_back({Matrix::Zero(fan_out, fan_in), Eigen::VectorXd::Zero(fan_out)});
    }
    return Mlp(std::move(parameters), layer_activations(widths.size() - 1, hidden, output));
}

double Mlp::forward(double x) const {
    double out = 0.0;
    forward(std::span<const double>(&x, 1), std::span<double>(&out, 1));
    return out;
}

void Mlp::forward(std::span<const double> x, std::span<double> out) const {
    Matrix a = Eigen::Map<const Eigen::RowVectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    for (std::size_t l = 0; l < parameters_.size(); ++l) {
        a = forward_layer(parameters_[l], activations_[l], a);
    }
    Eigen::Map<Eigen::RowVectorXd>(out.data(), static_cast<Eigen::Index>(out.size())) = a.row(0);
}

std::vector<std::size_t> Mlp::widths() const {
    std::vector<std::size_t> widths{1};
    for (const auto& layer : parameters_) {
        widths.push_back(static_cast<std::size_t>(layer.weights.rows()));
    }
    return widths;
}

std::size_t Mlp::parameter_count() const {
    std::size_t count = 0;
    for (const auto& layer : parameters_) {
        count += static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
    }
    return count;
}

Parameters zeros_like(const Mlp& net) {
    Parameters zeros;
    for (const auto& layer : net.parameters()) {
        zeros.push_back({Matrix::Zero(layer.weights.rows(), layer.weights.cols()),
                         Eigen::VectorXd::Zero(layer.bias.size())});
    }
    return zeros;
}

bool same_shape(const Parameters& a, const Parameters& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t l = 0; l < a.size(); ++l) {
        if (a[l].weights.rows() != b[l].weights.rows() || a[l].weights.cols() != b[l].weights.cols() ||
            a[l].bias.size() != b[l].bias.size()) {
            return false;
        }
    }
    return true;
}

double mse_loss(const Mlp& net, const TrainingSet& set) {
    check_set(set);
    std::vector<double> out(set.size());
    net.forward(set.x, out);
    double sum = 0.0;
    for (std::size_t m = 0; m < set.size(); ++m) {
        const double r = out[m] - set.target[m];
        sum += r * r;
    }
    return sum / static_cast<double>(set.size());
}

LossGradient loss_and_gradient(const Mlp& net, const TrainingSet& set) {
    check_set(set);
    const auto& parameters = net.parameters();
    const auto& activations = net.activations();
    const std::size_t layers = parameters.size();
    const auto n = static_cast<Eigen::Index>(set.size());

    std::vector<Matrix> a(layers + 1);
    a[0] = Eigen::Map<const Eigen::RowVectorXd>(set.x.data(), n);
    for (std::size_t l = 0; l < layers; ++l) {
        a[l + 1] = forward_layer(parameters[l], activations[l], a[l]);
    }

    const Eigen::Map<const Eigen::RowVectorXd> target(set.target.data(), n);
    const Eigen::RowVectorXd residual = a[layers].row(0) - target;
    LossGradient result;
    result.loss = residual.squaredNorm() / static_cast<double>(n);
    result.gradient.resize(layers);

    Matrix delta = (2.0 / static_cast<double>(n)) * residual;
    for (std::size_t l = layers; l-- > 0;) {
        multiply_by_derivative(delta, a[l + 1], activations[l]);
        result.gradient[l].weights = delta * a[l].transpose();
        result.gradient[l].bias = delta.rowwise().sum();
        if (l > 0) {
            delta = parameters[l].weights.transpose() * delta;
        }
    }
    return result;
}

Parameters mlp_gradient(const Mlp& net, const TrainingSet& set) {
    return loss_and_gradient(net, set).gradient;
}

double AdamConfig::step_size(std::size_t step) const {
    if (decay_half_life <= 0.0) {
        return learning_rate;
    }
    const double decayed = learning_rate * std::exp2(-static_cast<double>(step) / decay_half_life);
    return std::max(min_learning_rate, decayed);
}

AdamState AdamState::for_network(const Mlp& net, const AdamConfig& config) {
    AdamState state;
    state.config = config;
    state.first_moment = zeros_like(net);
    state.second_moment = zeros_like(net);
    return state;
}

void adam_step(Mlp& net, const Parameters& gradient, AdamState& state) {
    auto& parameters = net.parameters();
    if (!same_shape(parameters, gradient) || !same_shape(parameters, state.first_moment) ||
        !same_shape(parameters, state.second_moment)) {
        throw ConfigError("adam_step: gradient/state shapes do not match the network");
    }
    const auto& c = state.config;
    const double step_size = c.step_size(state.step);
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(c.beta1, t);
    const double correction2 = 1.0 - std::pow(c.beta2, t);

    auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
        m = c.beta1 * m + (1.0 - c.beta1) * grad;
        v = c.beta2 * v + (1.0 - c.beta2) * grad.cwiseProduct(grad);
        param.array() -= step_size * (m.array() / correction1) /
                         ((v.array() / correction2).sqrt() + c.epsilon);
    };
    for (std::size_t l = 0; l < parameters.size(); ++l) {
        update(parameters[l].weights, gradient[l].weights, state.first_moment[l].weights,
               state.second_moment[l].weights);
        update(parameters[l].bias, gradient[l].bias, state.first_moment[l].bias, state.second_moment[l].bias);
    }
}

TrainReport train(Mlp& net, const TrainingSet& set, const TrainSchedule& schedule, AdamState& state) {
    check_set(set);
    if (!same_shape(net.parameters(), state.first_moment)) {
        state = AdamState::for_network(net, state.config);
    }

    TrainReport report;
    Parameters best = net.parameters();
    double best_loss = 0.0;
    // best_loss after each epoch, for the patience window.
    std::deque<double> window;

    for (std::size_t epoch = 0;; ++epoch) {
        LossGradient lg = loss_and_gradient(net, set);
        if (!std::isfinite(lg.loss)) {
            throw TrainingDivergence("training loss became non-finite at epoch " + std::to_string(epoch), epoch);
        }
        if (epoch == 0) {
            report.initial_loss = lg.loss;
            best_loss = lg.loss;
        } else if (lg.loss < best_loss) {
            best_loss = lg.loss;
            best = net.parameters();
        }
        report.epochs = epoch;

        if (best_loss <= schedule.loss_target) {
            report.stop = TrainStop::target_reached;
            break;
        }
        if (epoch >= schedule.max_epochs) {
            report.stop = TrainStop::max_epochs;
            break;
        }
        window.push_back(best_loss);
        if (schedule.patience > 0 && window.size() > schedule.patience) {
            const double reference = window.front();
            window.pop_front();
            if (reference - best_loss < schedule.improvement_floor * reference) {
                report.stop = TrainStop::patience;
                break;
            }
        }
        adam_step(net, lg.gradient, state);
    }

    net.parameters() = std::move(best);
    report.final_loss = best_loss;
    return report;
}

}  // namespace annmoc
