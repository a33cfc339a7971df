/**
 * @file scenario.hpp
 * @brief Scenario files: JSON ingestion with field-identified diagnostics,
 *        and serialization back to the same layout.
 *
 * Layout (complex numbers are [re, im] pairs):
 *
 *     {
 *       "name": "...",
 *       "network": {
 *         "d": [...], "A": [[[re, im], ...], ...], "B": ..., "H": [[re, im], ...],
 *         "f": [{"kind": "sigmoid-pair", "mix": [pR, qR, pI, qI], "bound": [[..], [..]]}, ...],
 *         "g": [...],
 *         "delays": [[{"kind": "logistic-shifted", "param": 0.0, "bound": 1.0}, ...], ...],
 *         "tau": 1.0,
 *         "phi_init": [[re, im], ...], "psi_init": [[re, im], ...]
 *       },
 *       "weights": {"xi": [...], "phi": [...]},
 *       "beta": 0.5,
 *       "mode": "theorem1",
 *       "controller": {"mu_bar": [...], "mu_tilde": [...], "rho_bar": [...], "rho_tilde": [...],
 *                      "eta_bar": [...], "eta_tilde": [...], "dead_zone": 0.0},
 *       "sim": {"dt": 1e-4, "t_end": 30, "scheme": "euler", "settle_tolerance": 0.01, "record_stride": 100},
 *       "monitor": {"epsilon": 0.25, "rho": 0.4},
 *       "reference": {"mu_bar_min": [...], ...}
 *     }
 *
 * "controller", "monitor", "reference", "bound", "tau" and "mode" are optional.
 */
#pragma once

#include "controller.hpp"
#include "criteria.hpp"
#include "dde_sim.hpp"
#include "model.hpp"

#include <json.hpp>

#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cvnn {

enum class ConfigErrorCode {
    Io,
    Syntax,
    MissingField,
    WrongType,
    DimensionMismatch,
    BetaRange,
    NonpositiveWeight,
    InvalidValue,
};

[[nodiscard]] inline std::string_view to_string(ConfigErrorCode c) {
    switch (c) {
        case ConfigErrorCode::Io: return "E-IO";
        case ConfigErrorCode::Syntax: return "E-SYNTAX";
        case ConfigErrorCode::MissingField: return "E-MISSING-FIELD";
        case ConfigErrorCode::WrongType: return "E-WRONG-TYPE";
        case ConfigErrorCode::DimensionMismatch: return "E-DIMENSION";
        case ConfigErrorCode::BetaRange: return "E-BETA-RANGE";
        case ConfigErrorCode::NonpositiveWeight: return "E-WEIGHT-NONPOSITIVE";
        case ConfigErrorCode::InvalidValue: return "E-INVALID-VALUE";
    }
    return "E-UNKNOWN";
}

class ConfigError : public std::runtime_error {
public:
    ConfigError(ConfigErrorCode code, std::string field, const std::string& msg)
        : std::runtime_error(std::string(to_string(code)) + " at '" + field + "': " + msg), code_(code),
          field_(std::move(field)) {}

    [[nodiscard]] ConfigErrorCode code() const noexcept { return code_; }
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    ConfigErrorCode code_;
    std::string field_;
};

/// Published threshold/certificate values kept alongside a scenario for comparison.
using ReferenceValues = std::map<std::string, std::vector<double>>;

struct MonitorOverrides {
    std::optional<double> epsilon;
    std::optional<double> rho;

    friend bool operator==(const MonitorOverrides&, const MonitorOverrides&) = default;
};

struct Scenario {
    std::string name;
    NetworkSpec network;
    NormWeights weights;
    double beta = 0.5;
    CriteriaMode mode = CriteriaMode::Theorem1;
    std::optional<ControllerGains> gains;
    SimConfig sim;
    MonitorOverrides monitor;
    ReferenceValues reference;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

using nlohmann::json;

class Reader {
public:
    Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {}

    [[nodiscard]] const std::string& path() const { return path_; }
    [[nodiscard]] const json& node() const { return node_; }

    [[nodiscard]] bool has(const char* key) const { return node_.is_object() && node_.contains(key); }

    [[nodiscard]] Reader at(const char* key) const {
        if (!node_.is_object()) throw ConfigError(ConfigErrorCode::WrongType, path_, "expected an object");
        if (!node_.contains(key))
            throw ConfigError(ConfigErrorCode::MissingField, join(key), "required field is missing");
        return {node_.at(key), join(key)};
    }

    [[nodiscard]] Reader at(std::size_t i) const { return {node_.at(i), path_ + "[" + std::to_string(i) + "]"}; }

    std::size_t array_size(std::optional<std::size_t> expected = std::nullopt) const {
        if (!node_.is_array()) throw ConfigError(ConfigErrorCode::WrongType, path_, "expected an array");
        if (expected && node_.size() != *expected)
            throw ConfigError(ConfigErrorCode::DimensionMismatch, path_,
                              "expected " + std::to_string(*expected) + " entries, got " +
                                  std::to_string(node_.size()));
        return node_.size();
    }

    [[nodiscard]] double number() const {
        if (!node_.is_number()) throw ConfigError(ConfigErrorCode::WrongType, path_, "expected a number");
        const double v = node_.get<double>();
        if (!std::isfinite(v)) throw ConfigError(ConfigErrorCode::InvalidValue, path_, "value must be finite");
        return v;
    }

    [[nodiscard]] std::string string() const {
        if (!node_.is_string()) throw ConfigError(ConfigErrorCode::WrongType, path_, "expected a string");
        return node_.get<std::string>();
    }

    [[nodiscard]] std::vector<double> numbers(std::optional<std::size_t> expected = std::nullopt) const {
        const std::size_t n = array_size(expected);
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = at(i).number();
        return out;
    }

    [[nodiscard]] SplitComplex complex() const {
        array_size(2);
        return {at(std::size_t{0}).number(), at(std::size_t{1}).number()};
    }

    [[nodiscard]] SplitVector complex_vector(std::size_t n) const {
        array_size(n);
        SplitVector out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = at(i).complex();
        return out;
    }

    [[nodiscard]] SplitMatrix complex_matrix(std::size_t n) const {
        array_size(n);
        SplitMatrix out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = at(i).complex_vector(n);
        return out;
    }

    [[nodiscard]] Mat2 mat2() const {
        array_size(2);
        Mat2 m{};
        for (std::size_t r = 0; r < 2; ++r) {
            const auto row = at(r).numbers(2);
            m[r] = {row[0], row[1]};
        }
        return m;
    }

    [[noreturn]] void fail(ConfigErrorCode code, const std::string& msg) const { throw ConfigError(code, path_, msg); }

private:
    [[nodiscard]] std::string join(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    const json& node_;
    std::string path_;
};

inline ActivationSpec read_activation(const Reader& r) {
    ActivationSpec s;
    try {
        s.kind = activation_kind_from(r.at("kind").string());
    } catch (const std::invalid_argument& e) {
        r.at("kind").fail(ConfigErrorCode::InvalidValue, e.what());
    }
    const auto mix = r.at("mix").numbers(4);
    s.mix = {mix[0], mix[1], mix[2], mix[3]};
    s.bound = r.has("bound") ? r.at("bound").mat2() : analytic_bounds(s).bar;
    return s;
}

inline DelaySpec read_delay(const Reader& r) {
    DelaySpec s;
    try {
        s.kind = delay_kind_from(r.at("kind").string());
    } catch (const std::invalid_argument& e) {
        r.at("kind").fail(ConfigErrorCode::InvalidValue, e.what());
    }
    s.param = r.has("param") ? r.at("param").number() : 0.0;
    s.bound = r.at("bound").number();
    return s;
}

inline NetworkSpec read_network(const Reader& r) {
    NetworkSpec net;
    net.d = r.at("d").numbers();
    net.n = net.d.size();
    const std::size_t n = net.n;
    if (n == 0) r.at("d").fail(ConfigErrorCode::DimensionMismatch, "network needs at least one neuron");
    for (std::size_t j = 0; j < n; ++j)
        if (!(net.d[j] > 0.0)) r.at("d").at(j).fail(ConfigErrorCode::InvalidValue, "self-feedback must be > 0");
    net.a = r.at("A").complex_matrix(n);
    net.b = r.at("B").complex_matrix(n);
    net.h = r.at("H").complex_vector(n);
    const Reader f = r.at("f");
    const Reader g = r.at("g");
    f.array_size(n);
    g.array_size(n);
    for (std::size_t k = 0; k < n; ++k) {
        net.f.push_back(read_activation(f.at(k)));
        net.g.push_back(read_activation(g.at(k)));
    }
    const Reader delays = r.at("delays");
    delays.array_size(n);
    net.delays.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Reader row = delays.at(j);
        row.array_size(n);
        for (std::size_t k = 0; k < n; ++k) net.delays[j].push_back(read_delay(row.at(k)));
    }
    net.tau = r.has("tau") ? r.at("tau").number() : net.max_delay_bound();
    net.phi_init = r.at("phi_init").complex_vector(n);
    net.psi_init = r.at("psi_init").complex_vector(n);
    try {
        validate(net);
    } catch (const ModelError& e) {
        throw ConfigError(ConfigErrorCode::InvalidValue, r.path().empty() ? e.field() : r.path() + "." + e.field(),
                          e.what());
    }
    return net;
}

inline ControllerGains read_gains(const Reader& r, std::size_t n, double beta) {
    ControllerGains g;
    g.beta = beta;
    auto read = [&](const char* key) {
        auto v = r.at(key).numbers(n);
        for (std::size_t j = 0; j < n; ++j)
            if (!(v[j] >= 0.0)) r.at(key).at(j).fail(ConfigErrorCode::InvalidValue, "gains must be nonnegative");
        return v;
    };
    g.mu_bar = read("mu_bar");
    g.mu_tilde = read("mu_tilde");
    g.rho_bar = read("rho_bar");
    g.rho_tilde = read("rho_tilde");
    g.eta_bar = read("eta_bar");
    g.eta_tilde = read("eta_tilde");
    if (r.has("dead_zone")) {
        g.dead_zone = r.at("dead_zone").number();
        if (g.dead_zone < 0.0) r.at("dead_zone").fail(ConfigErrorCode::InvalidValue, "dead_zone must be >= 0");
    }
    return g;
}

inline SimConfig read_sim(const Reader& r, double tau) {
    SimConfig c;
    if (r.has("dt")) c.dt = r.at("dt").number();
    if (r.has("t_end")) c.t_end = r.at("t_end").number();
    if (r.has("scheme")) {
        try {
            c.scheme = scheme_from(r.at("scheme").string());
        } catch (const std::invalid_argument& e) {
            r.at("scheme").fail(ConfigErrorCode::InvalidValue, e.what());
        }
    }
    if (r.has("settle_tolerance")) c.settle_tolerance = r.at("settle_tolerance").number();
    if (r.has("record_stride")) {
        const double s = r.at("record_stride").number();
        if (!(s >= 1.0) || s != std::floor(s))
            r.at("record_stride").fail(ConfigErrorCode::InvalidValue, "record_stride must be a positive integer");
        c.record_stride = static_cast<std::size_t>(s);
    }
    try {
        validate(c, tau);
    } catch (const std::invalid_argument& e) {
        r.fail(ConfigErrorCode::InvalidValue, e.what());
    }
    return c;
}

inline json complex_json(const SplitComplex& z) { return json::array({z.re, z.im}); }

inline json complex_vector_json(const SplitVector& v) {
    json a = json::array();
    for (const auto& z : v) a.push_back(complex_json(z));
    return a;
}

inline json mat2_json(const Mat2& m) { return json::array({json::array({m[0][0], m[0][1]}), json::array({m[1][0], m[1][1]})}); }

}  // namespace detail

/// Validates cross-field consistency after the network is known.
inline void validate_scenario(const Scenario& s) {
    if (!(s.beta > 0.0 && s.beta < 1.0))
        throw ConfigError(ConfigErrorCode::BetaRange, "beta", "exponent must lie strictly between 0 and 1");
    const std::size_t n = s.network.n;
    if (s.weights.xi.size() != n)
        throw ConfigError(ConfigErrorCode::DimensionMismatch, "weights.xi", "expected " + std::to_string(n) + " entries");
    if (s.weights.phi.size() != n)
        throw ConfigError(ConfigErrorCode::DimensionMismatch, "weights.phi", "expected " + std::to_string(n) + " entries");
    for (std::size_t j = 0; j < n; ++j) {
        if (!(s.weights.xi[j] > 0.0))
            throw ConfigError(ConfigErrorCode::NonpositiveWeight, "weights.xi[" + std::to_string(j) + "]",
                              "norm weights must be > 0");
        if (!(s.weights.phi[j] > 0.0))
            throw ConfigError(ConfigErrorCode::NonpositiveWeight, "weights.phi[" + std::to_string(j) + "]",
                              "norm weights must be > 0");
    }
    if (s.mode == CriteriaMode::Theorem1) {
        for (std::size_t k = 0; k < n; ++k)
            if (!s.network.f[k].monotone())
                throw ConfigError(ConfigErrorCode::InvalidValue, "network.f[" + std::to_string(k) + "].mix",
                                  "theorem1 mode needs nonnegative mix coefficients; use mode lipschitz");
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            if (delay_bound_violation(s.network.delays[j][k], s.sim.t_end) > 1e-12)
                throw ConfigError(ConfigErrorCode::InvalidValue,
                                  "network.delays[" + std::to_string(j) + "][" + std::to_string(k) + "]",
                                  "delay leaves [0, bound] on [0, t_end]");
        }
    }
    if (s.monitor.epsilon && !(*s.monitor.epsilon > 0.0))
        throw ConfigError(ConfigErrorCode::InvalidValue, "monitor.epsilon", "must be > 0");
    if (s.monitor.rho && !(*s.monitor.rho > 0.0))
        throw ConfigError(ConfigErrorCode::InvalidValue, "monitor.rho", "must be > 0");
}

[[nodiscard]] inline Scenario scenario_from_json(const nlohmann::json& root) {
    const detail::Reader r(root, "");
    if (!root.is_object()) r.fail(ConfigErrorCode::WrongType, "top level must be an object");
    Scenario s;
    s.name = r.has("name") ? r.at("name").string() : std::string{};
    s.network = detail::read_network(r.at("network"));
    const detail::Reader w = r.at("weights");
    s.weights.xi = w.at("xi").numbers(s.network.n);
    s.weights.phi = w.at("phi").numbers(s.network.n);
    s.beta = r.at("beta").number();
    if (!(s.beta > 0.0 && s.beta < 1.0))
        r.at("beta").fail(ConfigErrorCode::BetaRange, "exponent must lie strictly between 0 and 1");
    if (r.has("mode")) {
        try {
            s.mode = criteria_mode_from(r.at("mode").string());
        } catch (const std::invalid_argument& e) {
            r.at("mode").fail(ConfigErrorCode::InvalidValue, e.what());
        }
    }
    if (r.has("controller") && !root.at("controller").is_null())
        s.gains = detail::read_gains(r.at("controller"), s.network.n, s.beta);
    s.sim = r.has("sim") ? detail::read_sim(r.at("sim"), s.network.tau) : SimConfig{};
    if (r.has("monitor")) {
        const detail::Reader m = r.at("monitor");
        if (m.has("epsilon")) s.monitor.epsilon = m.at("epsilon").number();
        if (m.has("rho")) s.monitor.rho = m.at("rho").number();
    }
    if (r.has("reference")) {
        const detail::Reader ref = r.at("reference");
        if (!ref.node().is_object()) ref.fail(ConfigErrorCode::WrongType, "expected an object");
        for (auto it = ref.node().begin(); it != ref.node().end(); ++it)
            s.reference[it.key()] = ref.at(it.key().c_str()).numbers();
    }
    validate_scenario(s);
    return s;
}

[[nodiscard]] inline Scenario parse_scenario_text(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(ConfigErrorCode::Syntax, "byte " + std::to_string(e.byte), e.what());
    }
    return scenario_from_json(root);
}

[[nodiscard]] inline Scenario parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(ConfigErrorCode::Io, path, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario_text(ss.str());
}

[[nodiscard]] inline nlohmann::json to_json(const Scenario& s) {
    using nlohmann::json;
    using detail::complex_vector_json;
    const NetworkSpec& net = s.network;
    json network;
    network["d"] = net.d;
    json a = json::array(), b = json::array();
    for (std::size_t j = 0; j < net.n; ++j) {
        a.push_back(complex_vector_json(net.a[j]));
        b.push_back(complex_vector_json(net.b[j]));
    }
    network["A"] = a;
    network["B"] = b;
    network["H"] = complex_vector_json(net.h);
    auto act = [](const ActivationSpec& f) {
        return json{{"kind", std::string(to_string(f.kind))},
                    {"mix", json::array({f.mix.p_re, f.mix.q_re, f.mix.p_im, f.mix.q_im})},
                    {"bound", detail::mat2_json(f.bound)}};
    };
    json f = json::array(), g = json::array(), delays = json::array();
    for (std::size_t k = 0; k < net.n; ++k) {
        f.push_back(act(net.f[k]));
        g.push_back(act(net.g[k]));
        json row = json::array();
        for (const auto& d : net.delays[k])
            row.push_back({{"kind", std::string(to_string(d.kind))}, {"param", d.param}, {"bound", d.bound}});
        delays.push_back(row);
    }
    network["f"] = f;
    network["g"] = g;
    network["delays"] = delays;
    network["tau"] = net.tau;
    network["phi_init"] = complex_vector_json(net.phi_init);
    network["psi_init"] = complex_vector_json(net.psi_init);

    json root;
    root["name"] = s.name;
    root["network"] = network;
    root["weights"] = {{"xi", s.weights.xi}, {"phi", s.weights.phi}};
    root["beta"] = s.beta;
    root["mode"] = std::string(to_string(s.mode));
    if (s.gains) {
        const ControllerGains& gg = *s.gains;
        root["controller"] = {{"mu_bar", gg.mu_bar},   {"mu_tilde", gg.mu_tilde},   {"rho_bar", gg.rho_bar},
                              {"rho_tilde", gg.rho_tilde}, {"eta_bar", gg.eta_bar}, {"eta_tilde", gg.eta_tilde},
                              {"dead_zone", gg.dead_zone}};
    }
    root["sim"] = {{"dt", s.sim.dt},
                   {"t_end", s.sim.t_end},
                   {"scheme", std::string(to_string(s.sim.scheme))},
                   {"settle_tolerance", s.sim.settle_tolerance},
                   {"record_stride", s.sim.record_stride}};
    if (s.monitor.epsilon || s.monitor.rho) {
        json m = json::object();
        if (s.monitor.epsilon) m["epsilon"] = *s.monitor.epsilon;
        if (s.monitor.rho) m["rho"] = *s.monitor.rho;
        root["monitor"] = m;
    }
    if (!s.reference.empty()) root["reference"] = s.reference;
    return root;
}

}  // namespace cvnn
