#include "annmoc/error.hpp"
#include "annmoc/neural.hpp"

#include <istream>
#include <locale>
#include <ostream>
#include <string>

namespace annmoc {

namespace {

constexpr const char* magic = "annmoc-mlp";
constexpr int format_version = 1;

class ClassicLocale {
  public:
    explicit ClassicLocale(std::ios_base& stream) : stream_(stream), previous_(stream.imbue(std::locale::classic())) {}
    ~ClassicLocale() { stream_.imbue(previous_); }
    ClassicLocale(const ClassicLocale&) = delete;
    ClassicLocale& operator=(const ClassicLocale&) = delete;

  private:
    std::ios_base& stream_;
    std::locale previous_;
};

void write_layer(std::ostream& out, const LayerParameters& layer) {
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
        for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) {
            out << (j ? " " : "") << layer.weights(i, j);
        }
        out << '\n';
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
        out << (i ? " " : "") << layer.bias(i);
    }
    out << '\n';
}

void expect_word(std::istream& in, const std::string& word) {
    std::string token;
    if (!(in >> token) || token != word) {
        throw ConfigError("mlp checkpoint: expected '" + word + "', found '" + token + "'");
    }
}

template <typename T>
T read_value(std::istream& in, const char* what) {
    T value{};
    if (!(in >> value)) {
        throw ConfigError(std::string("mlp checkpoint: cannot read ") + what);
    }
    return value;
}

void read_layer(std::istream& in, LayerParameters& layer) {
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
        for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) {
            layer.weights(i, j) = read_value<double>(in, "weight");
        }
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
        layer.bias(i) = read_value<double>(in, "bias");
    }
}

}  // namespace

void write_mlp(std::ostream& out, const Mlp& net, const AdamState* state) {
    ClassicLocale locale(out);
    const auto precision = out.precision(17);

    out << magic << ' ' << format_version << '\n';
    out << "layers " << net.layer_count() << '\n';
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const auto& layer = net.parameters()[l];
        out << "layer " << layer.weights.cols() << ' ' << layer.weights.rows() << ' '
            << to_string(net.activations()[l]) << '\n';
        write_layer(out, layer);
    }
    if (state != nullptr) {
        const auto& c = state->config;
        out << "adam " << state->step << ' ' << c.learning_rate << ' ' << c.beta1 << ' ' << c.beta2 << ' '
            << c.epsilon << '\n';
        for (const auto& layer : state->first_moment) write_layer(out, layer);
        for (const auto& layer : state->second_moment) write_layer(out, layer);
    }
    out.precision(precision);
}

Mlp read_mlp(std::istream& in, AdamState* state, bool* has_state) {
    ClassicLocale locale(in);
    expect_word(in, magic);
    if (read_value<int>(in, "format version") != format_version) {
        throw ConfigError("mlp checkpoint: unsupported format version");
    }
    expect_word(in, "layers");
    const auto count = read_value<std::size_t>(in, "layer count");
    if (count == 0 || count > 4096) {
        throw ConfigError("mlp checkpoint: implausible layer count");
    }

    Parameters parameters;
    std::vector<Activation> activations;
    for (std::size_t l = 0; l < count; ++l) {
        expect_word(in, "layer");
        const auto fan_in = read_value<Eigen::Index>(in, "fan_in");
        const auto fan_out = read_value<Eigen::Index>(in, "fan_out");
        if (fan_in < 1 || fan_out < 1) {
            throw ConfigError("mlp checkpoint: layer widths must be positive");
        }
        activations.push_back(parse_activation(read_value<std::string>(in, "activation")));
        LayerParameters layer{Eigen::MatrixXd(fan_out, fan_in), Eigen::VectorXd(fan_out)};
        read_layer(in, layer);
        parameters.push_back(std::move(layer));
    }
    Mlp net(std::move(parameters), std::move(activations));

    std::string token;
    const bool trailer = static_cast<bool>(in >> token);
    if (trailer && token != "adam") {
        throw ConfigError("mlp checkpoint: unexpected trailing token '" + token + "'");
    }
    if (has_state != nullptr) {
        *has_state = trailer;
    }
    if (trailer && state != nullptr) {
        AdamState s = AdamState::for_network(net);
        s.step = read_value<std::size_t>(in, "adam step");
        s.config.learning_rate = read_value<double>(in, "learning rate");
        s.config.beta1 = read_value<double>(in, "beta1");
        s.config.beta2 = read_value<double>(in, "beta2");
        s.config.epsilon = read_value<double>(in, "epsilon");
        for (auto& layer : s.first_moment) read_layer(in, layer);
        for (auto& layer : s.second_moment) read_layer(in, layer);
        *state = std::move(s);
    }
    return net;
}

}  // namespace annmoc
