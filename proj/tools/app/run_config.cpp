#include "run_config.hpp"

#include <annmoc/error.hpp>

#include <charconv>
#include <cmath>
#include <limits>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace annmoc::app {

namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(std::string(key) + ": cannot parse '" + std::string(text) + "'");
    }
    return value;
}

double parse_double(std::string_view key, std::string_view text) { return parse_number<double>(key, text); }

std::size_t parse_count(std::string_view key, std::string_view text) {
    return parse_number<std::size_t>(key, text);
}

bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(text) + "'");
}

// Shortest text that reads back to the same double.
std::string format_setting(double value) {
    char buffer[32];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, ptr);
}

std::string format_bool(bool value) { return value ? "true" : "false"; }

std::string trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r");
    return std::string(text.substr(first, last - first + 1));
}

std::optional<CatalogEntry> try_resolve(const RunConfig& c) {
    try {
        return resolve_problem(c.problem, c.overrides);
    } catch (const ConfigError&) {
        return std::nullopt;
    }
}

std::vector<std::size_t> parse_widths(std::string_view key, std::string_view text) {
    std::vector<std::size_t> widths;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto dash = text.find('-', start);
        const auto piece = text.substr(start, dash == std::string_view::npos ? std::string_view::npos : dash - start);
        widths.push_back(parse_count(key, piece));
        if (dash == std::string_view::npos) break;
        start = dash + 1;
    }
    return widths;
}

std::string format_widths(const std::vector<std::size_t>& widths) {
    std::string text;
    for (std::size_t k = 0; k < widths.size(); ++k) {
        if (k) text += '-';
        text += std::to_string(widths[k]);
    }
    return text;
}

template <typename Field>
Setting double_setting(std::string_view key, std::string_view help, Field field) {
    return Setting{key, help, [key, field](RunConfig& c, std::string_view v) { field(c) = parse_double(key, v); },
                   [field](const RunConfig& c) { return format_setting(field(c)); }};
}

template <typename Field>
Setting count_setting(std::string_view key, std::string_view help, Field field) {
    return Setting{key, help, [key, field](RunConfig& c, std::string_view v) { field(c) = parse_count(key, v); },
                   [field](const RunConfig& c) { return std::to_string(field(c)); }};
}

template <typename Field>
Setting bool_setting(std::string_view key, std::string_view help, Field field) {
    return Setting{key, help, [key, field](RunConfig& c, std::string_view v) { field(c) = parse_bool(key, v); },
                   [field](const RunConfig& c) { return format_bool(field(c)); }};
}

Setting problem_parameter(std::string_view key, std::string_view help, std::optional<double> ProblemOverrides::*field,
                          double (*resolved)(const CatalogEntry&)) {
    return Setting{key, help,
                   [key, field](RunConfig& c, std::string_view v) { c.overrides.*field = parse_double(key, v); },
                   [resolved](const RunConfig& c) -> std::string {
                       const auto entry = try_resolve(c);
                       if (!entry) return {};
                       const double value = resolved(*entry);
                       return std::isnan(value) ? std::string() : format_setting(value);
                   }};
}

double no_value(const CatalogEntry&) { return std::numeric_limits<double>::quiet_NaN(); }

std::vector<Setting> build_settings() {
    std::vector<Setting> s;
    s.push_back({"problem", "problem1, problem2 or problem2-<sigma_s>",
                 [](RunConfig& c, std::string_view v) { c.problem = std::string(v); },
                 [](const RunConfig& c) { return c.problem; }});
    s.push_back(problem_parameter("sigma_s", "scattering cross section", &ProblemOverrides::sigma_s,
                                  [](const CatalogEntry& e) {
                                      return e.manufactured ? e.manufactured->sigma_s
                                             : e.benchmark  ? e.benchmark->sigma_s
                                                            : no_value(e);
                                  }));
    s.push_back(problem_parameter("kappa", "absorption cross section (problem1)", &ProblemOverrides::kappa,
                                  [](const CatalogEntry& e) { return e.manufactured ? e.manufactured->kappa : no_value(e); }));
    s.push_back(problem_parameter("alpha", "manufactured decay parameter (problem1)", &ProblemOverrides::alpha,
                                  [](const CatalogEntry& e) { return e.manufactured ? e.manufactured->alpha : no_value(e); }));
    s.push_back(count_setting("n_quad", "Gauss-Legendre directions N",
                              [](auto& c) -> auto& { return c.solver.quadrature_size; }));
    s.push_back(count_setting("n_samples", "spatial samples per iteration",
                              [](auto& c) -> auto& { return c.solver.samples; }));
    s.push_back(double_setting("epsilon", "source iteration tolerance",
                               [](auto& c) -> auto& { return c.solver.epsilon; }));
    s.push_back(count_setting("max_iters", "source iteration limit",
                              [](auto& c) -> auto& { return c.solver.max_iterations; }));
    s.push_back({"estimator", "ann, mesh or exact",
                 [](RunConfig& c, std::string_view v) { c.solver.estimator = parse_estimator_kind(v); },
                 [](const RunConfig& c) { return std::string(to_string(c.solver.estimator)); }});
    s.push_back({"seed", "integer seed, or auto",
                 [](RunConfig& c, std::string_view v) {
                     if (v == "auto") {
                         c.seed.reset();
                     } else {
                         c.seed = parse_number<std::uint64_t>("seed", v);
                     }
                 },
                 [](const RunConfig& c) { return c.seed ? std::to_string(*c.seed) : std::string("auto"); }});
    s.push_back(count_setting("grid", "uniform evaluation points for flux.csv",
                              [](auto& c) -> auto& { return c.grid; }));
    s.push_back({"out", "output directory", [](RunConfig& c, std::string_view v) { c.out = std::string(v); },
                 [](const RunConfig& c) { return c.out.string(); }});
    s.push_back(bool_setting("resample", "redraw samples every iteration",
                             [](auto& c) -> auto& { return c.solver.resample; }));
    s.push_back({"layout", "random or uniform samples",
                 [](RunConfig& c, std::string_view v) { c.solver.layout = parse_sample_layout(v); },
                 [](const RunConfig& c) { return std::string(to_string(c.solver.layout)); }});
    s.push_back({"stop_metric", "estimate-change or sweep-residual",
                 [](RunConfig& c, std::string_view v) { c.solver.stop_metric = parse_stop_metric(v); },
                 [](const RunConfig& c) { return std::string(to_string(c.solver.stop_metric)); }});
    s.push_back(double_setting("sweep_tol", "characteristic integral tolerance",
                               [](auto& c) -> auto& { return c.solver.sweep_tolerance; }));
    s.push_back({"initial_flux", "zero, constant or boundary-average",
                 [](RunConfig& c, std::string_view v) { c.solver.initial.kind = parse_initial_flux(v); },
                 [](const RunConfig& c) { return std::string(to_string(c.solver.initial.kind)); }});
    s.push_back(double_setting("initial_value", "value for initial_flux = constant",
                               [](auto& c) -> auto& { return c.solver.initial.value; }));
    s.push_back({"mesh_order", "linear or cubic mesh interpolation",
                 [](RunConfig& c, std::string_view v) { c.solver.mesh_order = parse_interpolation(v); },
                 [](const RunConfig& c) { return std::string(to_string(c.solver.mesh_order)); }});
    s.push_back(count_setting("threads", "sweep threads, 0 for all cores",
                              [](auto& c) -> auto& { return c.solver.threads; }));
    s.push_back({"widths", "network layer widths, e.g. 1-100-50-5-1",
                 [](RunConfig& c, std::string_view v) { c.solver.ann.widths = parse_widths("widths", v); },
                 [](const RunConfig& c) { return format_widths(c.solver.ann.widths); }});
    s.push_back({"hidden_activation", "identity, tanh or sigmoid",
                 [](RunConfig& c, std::string_view v) { c.solver.ann.hidden = parse_activation(v); },
                 [](const RunConfig& c) { return std::string(to_string(c.solver.ann.hidden)); }});
    s.push_back({"output_activation", "identity, tanh or sigmoid",
                 [](RunConfig& c, std::string_view v) { c.solver.ann.output = parse_activation(v); },
                 [](const RunConfig& c) { return std::string(to_string(c.solver.ann.output)); }});
    s.push_back(double_setting("learning_rate", "initial Adam step size",
                               [](auto& c) -> auto& { return c.solver.ann.adam.learning_rate; }));
    s.push_back(double_setting("lr_half_life", "optimizer steps per halving of the step size, 0 for none",
                               [](auto& c) -> auto& { return c.solver.ann.adam.decay_half_life; }));
    s.push_back(double_setting("lr_floor", "smallest Adam step size",
                               [](auto& c) -> auto& { return c.solver.ann.adam.min_learning_rate; }));
    s.push_back(double_setting("beta1", "Adam first-moment decay",
                               [](auto& c) -> auto& { return c.solver.ann.adam.beta1; }));
    s.push_back(double_setting("beta2", "Adam second-moment decay",
                               [](auto& c) -> auto& { return c.solver.ann.adam.beta2; }));
    s.push_back(double_setting("adam_epsilon", "Adam denominator offset",
                               [](auto& c) -> auto& { return c.solver.ann.adam.epsilon; }));
    s.push_back(double_setting("loss_target", "stop training below this mean squared error",
                               [](auto& c) -> auto& { return c.solver.ann.schedule.loss_target; }));
    s.push_back(count_setting("max_epochs", "epoch limit per fit",
                              [](auto& c) -> auto& { return c.solver.ann.schedule.max_epochs; }));
    s.push_back(count_setting("patience", "epochs without enough improvement before a fit stops",
                              [](auto& c) -> auto& { return c.solver.ann.schedule.patience; }));
    s.push_back(double_setting("improvement_floor", "relative improvement that resets patience",
                               [](auto& c) -> auto& { return c.solver.ann.schedule.improvement_floor; }));
    s.push_back(bool_setting("cold_start", "re-initialize the network before every fit",
                             [](auto& c) -> auto& { return c.solver.ann.cold_start; }));
    s.push_back(bool_setting("normalize_input", "map the domain onto [-1, 1] before the network",
                             [](auto& c) -> auto& { return c.solver.ann.normalize_input; }));
    s.push_back(bool_setting("reference", "compute a reference flux when there is no closed form",
                             [](auto& c) -> auto& { return c.reference; }));
    s.push_back(count_setting("oracle_points", "mesh points of the reference solve",
                              [](auto& c) -> auto& { return c.oracle.mesh_points; }));
    s.push_back(count_setting("oracle_n_quad", "directions of the reference solve",
                              [](auto& c) -> auto& { return c.oracle.quadrature_size; }));
    s.push_back(double_setting("oracle_epsilon", "iteration tolerance of the reference solve",
                               [](auto& c) -> auto& { return c.oracle.epsilon; }));
    s.push_back(bool_setting("emit_flux", "write flux.csv", [](auto& c) -> auto& { return c.emit_flux; }));
    s.push_back(bool_setting("emit_history", "write history.csv and timing.csv",
                             [](auto& c) -> auto& { return c.emit_history; }));
    s.push_back(bool_setting("emit_checkpoint", "write the trained surrogate",
                             [](auto& c) -> auto& { return c.emit_checkpoint; }));
    s.push_back(bool_setting("emit_summary", "write summary.txt", [](auto& c) -> auto& { return c.emit_summary; }));
    return s;
}

}  // namespace

SolverConfig RunConfig::default_solver() {
    SolverConfig config;
    config.threads = 0;
    return config;
}

std::string format_double(double value) {
    char buffer[32];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
    return std::string(buffer, ptr);
}

const std::vector<Setting>& settings() {
    static const std::vector<Setting> table = build_settings();
    return table;
}

const Setting* find_setting(std::string_view key) {
    for (const auto& s : settings()) {
        if (s.key == key) return &s;
    }
    return nullptr;
}

void load_config(std::istream& in, RunConfig& config, std::string_view source) {
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        if (text.front() == '[') break;
        const auto where = std::string(source) + ":" + std::to_string(number) + ": ";
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(where + "expected key = value");
        }
        const std::string key = trim(std::string_view(text).substr(0, eq));
        const std::string value = trim(std::string_view(text).substr(eq + 1));
        const Setting* setting = find_setting(key);
        if (!setting) {
            throw ConfigError(where + "unknown key '" + key + "'");
        }
        try {
            setting->set(config, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
}

void load_config_file(const std::filesystem::path& path, RunConfig& config) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    load_config(in, config, path.string());
}

void validate(const RunConfig& config) {
    const CatalogEntry entry = resolve_problem(config.problem, config.overrides);
    SolverConfig solver = config.solver;
    if (solver.estimator == EstimatorKind::exact) {
        if (!entry.exact) {
            throw ConfigError("estimator exact needs a problem with a closed-form flux");
        }
        solver.exact_flux = entry.exact;
    }
    annmoc::validate(solver);
    if (config.grid < 2) {
        throw ConfigError("grid needs at least 2 points");
    }
    if (config.out.empty()) {
        throw ConfigError("output directory must not be empty");
    }
}

std::uint64_t resolve_seed(RunConfig& config) {
    if (!config.seed) {
        std::random_device device;
        config.seed = (static_cast<std::uint64_t>(device()) << 32) | device();
    }
    config.solver.seed = *config.seed;
    return *config.seed;
}

void write_settings(std::ostream& out, const RunConfig& config) {
    for (const auto& s : settings()) {
        const std::string value = s.get(config);
        if (!value.empty()) {
            out << s.key << " = " << value << '\n';
        }
    }
}

}  // namespace annmoc::app
