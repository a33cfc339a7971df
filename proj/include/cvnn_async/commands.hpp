/**
 * @file commands.hpp
 * @brief Scenario orchestration behind the command-line tool: verify, bounds,
 *        simulate and sweep, plus the trajectory CSV and report writers.
 *
 * Exit codes: 0 success/admissible, 1 inadmissible or infeasible constants,
 * 2 input error, 3 divergence.
 */
#pragma once

#include "controller.hpp"
#include "criteria.hpp"
#include "dde_sim.hpp"
#include "scenario.hpp"

#include <json.hpp>

#include <cstdio>
#include <future>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace cvnn {

enum ExitCode : int { kExitOk = 0, kExitInadmissible = 1, kExitInputError = 2, kExitDivergence = 3 };

/// 17 significant digits; reads back to the same double.
[[nodiscard]] inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Trajectory CSV
// ---------------------------------------------------------------------------

inline void write_trajectory_header(std::ostream& os, std::size_t n) {
    os << "t";
    for (std::size_t j = 1; j <= n; ++j) {
        const std::string s = std::to_string(j);
        os << ",x" << s << "_re,x" << s << "_im,y" << s << "_re,y" << s << "_im,e" << s << "_re,e" << s << "_im";
    }
    os << ",norm_e1,monitor_m,norm_e2,monitor_v,settled\n";
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    const std::size_t n = tr.size() ? tr.x.front().size() : 0;
    write_trajectory_header(os, n);
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; };
    for (std::size_t i = 0; i < tr.size(); ++i) {
        os << format_double(tr.times[i]);
        for (std::size_t j = 0; j < n; ++j) {
            os << ',' << format_double(tr.x[i][j].re) << ',' << format_double(tr.x[i][j].im) << ','
               << format_double(tr.y[i][j].re) << ',' << format_double(tr.y[i][j].im) << ','
               << format_double(tr.e[i][j].re) << ',' << format_double(tr.e[i][j].im);
        }
        os << ',' << format_double(tr.norm_e1[i]) << ',' << opt(tr.monitor_m[i]) << ',' << opt(tr.norm_e2[i]) << ','
           << opt(tr.monitor_v[i]) << ',' << (tr.settled_at(i) ? 1 : 0) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Tolerance for declaring a computed value equal to a published 3-decimal value.
inline constexpr double kReferenceTolerance = 1e-3;

namespace detail {

inline nlohmann::json certificate_json(const ConvergenceCertificate& c) {
    return {{"epsilon", c.epsilon}, {"rho_ast", c.rho_ast}, {"rho_star", c.rho_star}, {"rho", c.rho},
            {"m_e1_0", c.m_e1_0},   {"t1_r", c.t1_r},       {"t1_i", c.t1_i},         {"t1", c.t1},
            {"t2", c.t2}};
}

inline nlohmann::json gains_json(const ControllerGains& g) {
    return {{"mu_bar", g.mu_bar},   {"mu_tilde", g.mu_tilde},   {"rho_bar", g.rho_bar}, {"rho_tilde", g.rho_tilde},
            {"eta_bar", g.eta_bar}, {"eta_tilde", g.eta_tilde}, {"beta", g.beta}};
}

inline void compare_reference(nlohmann::json& out, const ReferenceValues& ref, const std::string& key,
                              const std::vector<double>& computed) {
    const auto it = ref.find(key);
    if (it == ref.end()) return;
    for (std::size_t j = 0; j < computed.size() && j < it->second.size(); ++j) {
        const bool match = std::fabs(computed[j] - it->second[j]) <= kReferenceTolerance;
        out.push_back({{"quantity", key},
                       {"neuron", j + 1},
                       {"computed", computed[j]},
                       {"reference", it->second[j]},
                       {"difference", computed[j] - it->second[j]},
                       {"marker", match ? "match" : "MISMATCH"}});
    }
}

}  // namespace detail

struct VerifyResult {
    ThresholdReport thresholds;
    std::optional<GainVerdict> verdict;
    std::optional<ConvergenceCertificate> certificate;
    std::string certificate_error;
    nlohmann::json report;
    int exit_code = kExitOk;
};

[[nodiscard]] inline VerifyResult run_verify(const Scenario& s) {
    using nlohmann::json;
    VerifyResult res;
    res.thresholds = thresholds(s.network, s.weights, s.beta, s.mode);
    const ThresholdReport& t = res.thresholds;

    json rows = json::array();
    for (std::size_t j = 0; j < t.size(); ++j) {
        json row{{"neuron", j + 1},
                 {"mu_bar_min", t.mu_bar_min[j]},
                 {"mu_tilde_min", t.mu_tilde_min[j]},
                 {"rho_bar_offset", t.rho_bar_offset[j]},
                 {"rho_tilde_offset", t.rho_tilde_offset[j]},
                 {"eta_bar_min", t.eta_bar_min[j]},
                 {"eta_tilde_min", t.eta_tilde_min[j]}};
        if (s.gains) {
            row["rho_bar_min"] = t.rho_bar_min(j, s.gains->mu_bar[j]);
            row["rho_tilde_min"] = t.rho_tilde_min(j, s.gains->mu_tilde[j]);
        }
        rows.push_back(row);
    }

    json& rep = res.report;
    rep["scenario"] = s.name;
    rep["mode"] = std::string(to_string(s.mode));
    rep["beta"] = s.beta;
    rep["weights"] = {{"xi", s.weights.xi}, {"phi", s.weights.phi}};
    rep["thresholds"] = rows;

    json cmp = json::array();
    detail::compare_reference(cmp, s.reference, "mu_bar_min", t.mu_bar_min);
    detail::compare_reference(cmp, s.reference, "mu_tilde_min", t.mu_tilde_min);
    detail::compare_reference(cmp, s.reference, "rho_bar_offset", t.rho_bar_offset);
    detail::compare_reference(cmp, s.reference, "rho_tilde_offset", t.rho_tilde_offset);
    detail::compare_reference(cmp, s.reference, "eta_bar_min", t.eta_bar_min);
    detail::compare_reference(cmp, s.reference, "eta_tilde_min", t.eta_tilde_min);
    rep["reference_comparison"] = cmp;

    if (!s.gains) {
        rep["gains"] = nullptr;
        rep["admissible"] = false;
        rep["margins"] = json::array();
        rep["certificate"] = nullptr;
        res.exit_code = kExitInadmissible;
        return res;
    }

    rep["gains"] = detail::gains_json(*s.gains);
    res.verdict = verify_gains(t, *s.gains);
    json margins = json::array();
    for (const Margin& m : res.verdict->margins) {
        margins.push_back({{"inequality", m.name},
                           {"neuron", m.neuron + 1},
                           {"threshold", m.threshold},
                           {"value", m.value},
                           {"margin", m.margin()},
                           {"strict", m.strict},
                           {"holds", m.ok}});
    }
    rep["margins"] = margins;
    rep["admissible"] = res.verdict->admissible;
    rep["certificate"] = nullptr;
    if (res.verdict->admissible) {
        try {
            res.certificate = certify(s.network, s.weights, *s.gains, s.mode);
            rep["certificate"] = detail::certificate_json(*res.certificate);
        } catch (const InfeasibleError& e) {
            res.certificate_error = e.what();
            rep["certificate_error"] = res.certificate_error;
        }
        // Times for the scenario's own decay constants, when it pins them.
        if (s.monitor.epsilon && s.monitor.rho) {
            const auto pinned = certificate(s.network, s.weights, s.beta, *s.monitor.epsilon, *s.monitor.rho);
            rep["certificate_pinned"] = detail::certificate_json(pinned);
        }
    }
    res.exit_code = res.verdict->admissible ? kExitOk : kExitInadmissible;
    return res;
}

struct BoundsResult {
    double epsilon = 0.0;
    bool epsilon_supplied = false;
    bool epsilon_ok = false;
    double epsilon_worst_lhs = 0.0;
    std::optional<double> epsilon_sup;  ///< searched supremum (before the safety factor)
    RhoBounds rho_bounds;
    RhoChoice rho;
    bool rho_supplied = false;
    bool rho_ok = false;
    std::optional<ConvergenceCertificate> certificate;
    nlohmann::json report;
    int exit_code = kExitOk;
};

/**
 * Certificate for supplied (or searched) epsilon and rho, with feasibility of
 * each constant reported separately. Needs gains in the scenario.
 */
[[nodiscard]] inline BoundsResult run_bounds(const Scenario& s, std::optional<double> epsilon,
                                             std::optional<double> rho) {
    using nlohmann::json;
    if (!s.gains) throw ConfigError(ConfigErrorCode::MissingField, "controller", "bounds needs a controller section");
    const ControllerGains& g = *s.gains;
    BoundsResult res;
    json& rep = res.report;
    rep["scenario"] = s.name;
    rep["mode"] = std::string(to_string(s.mode));

    const GainVerdict verdict = verify_gains(thresholds(s.network, s.weights, s.beta, s.mode), g);
    rep["admissible"] = verdict.admissible;

    if (epsilon) {
        if (!(*epsilon > 0.0)) throw ConfigError(ConfigErrorCode::InvalidValue, "--epsilon", "must be > 0");
        res.epsilon = *epsilon;
        res.epsilon_supplied = true;
    } else {
        try {
            res.epsilon = find_epsilon(s.network, s.weights, g, s.mode);
            res.epsilon_sup = res.epsilon / kSafetyFactor;
        } catch (const InfeasibleError& e) {
            rep["error"] = e.what();
            res.exit_code = kExitInadmissible;
            return res;
        }
    }
    res.epsilon_worst_lhs = epsilon_worst_lhs(s.network, s.weights, g, res.epsilon, s.mode);
    res.epsilon_ok = res.epsilon_worst_lhs < 0.0;

    res.rho_bounds = rho_bounds(s.network, s.weights, g, s.mode);
    if (rho) {
        if (!(*rho > 0.0)) throw ConfigError(ConfigErrorCode::InvalidValue, "--rho", "must be > 0");
        res.rho = RhoChoice{*rho, *rho, *rho};
        res.rho_supplied = true;
        res.rho_ok = rho_feasible(res.rho_bounds, *rho);
    } else {
        try {
            res.rho = find_rho(s.network, s.weights, g, s.mode);
            res.rho_ok = true;
        } catch (const InfeasibleError& e) {
            rep["error"] = e.what();
            res.exit_code = kExitInadmissible;
            return res;
        }
    }

    res.certificate = certificate(s.network, s.weights, s.beta, res.epsilon, res.rho);

    rep["epsilon"] = {{"value", res.epsilon},
                      {"supplied", res.epsilon_supplied},
                      {"worst_lhs", res.epsilon_worst_lhs},
                      {"feasible", res.epsilon_ok}};
    if (res.epsilon_sup) rep["epsilon"]["supremum"] = *res.epsilon_sup;
    rep["rho"] = {{"value", res.rho.rho},
                  {"supplied", res.rho_supplied},
                  {"ast_bound", res.rho_bounds.ast_bound},
                  {"star_bound", res.rho_bounds.star_bound},
                  {"per_neuron_ast_bound", res.rho_bounds.per_neuron_bar},
                  {"per_neuron_star_bound", res.rho_bounds.per_neuron_tilde},
                  {"feasible", res.rho_ok}};
    rep["certificate"] = detail::certificate_json(*res.certificate);
    json cmp = json::array();
    detail::compare_reference(cmp, s.reference, "t1", {res.certificate->t1});
    detail::compare_reference(cmp, s.reference, "t2", {res.certificate->t2});
    detail::compare_reference(cmp, s.reference, "m_e1_0", {res.certificate->m_e1_0});
    rep["reference_comparison"] = cmp;
    res.exit_code = (verdict.admissible && res.epsilon_ok && res.rho_ok) ? kExitOk : kExitInadmissible;
    return res;
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

struct SimulateResult {
    Trajectory trajectory;
    std::optional<ConvergenceCertificate> certificate;
    MonitorSettings monitors;
};

/// Monitor constants: scenario overrides first, then the searched certificate.
[[nodiscard]] inline MonitorSettings monitor_settings(const Scenario& s,
                                                      const std::optional<ConvergenceCertificate>& cert) {
    MonitorSettings m{s.weights, s.beta, s.monitor.epsilon, s.monitor.rho};
    if (cert) {
        if (!m.epsilon) m.epsilon = cert->epsilon;
        if (!m.rho) m.rho = cert->rho;
    }
    return m;
}

[[nodiscard]] inline std::optional<ConvergenceCertificate> try_certify(const Scenario& s) {
    if (!s.gains) return std::nullopt;
    const GainVerdict v = verify_gains(thresholds(s.network, s.weights, s.beta, s.mode), *s.gains);
    if (!v.admissible) return std::nullopt;
    try {
        return certify(s.network, s.weights, *s.gains, s.mode);
    } catch (const InfeasibleError&) {
        return std::nullopt;
    }
}

[[nodiscard]] inline SimulateResult run_simulate(const Scenario& s) {
    SimulateResult res;
    res.certificate = try_certify(s);
    res.monitors = monitor_settings(s, res.certificate);
    res.trajectory = simulate(s.network, s.gains, s.sim, res.monitors);
    return res;
}

/// Human-readable summary printed after a simulation.
inline void print_simulation_summary(std::ostream& os, const SimulateResult& r) {
    const Trajectory& tr = r.trajectory;
    os << "settling_time: " << (tr.settling_time ? format_double(*tr.settling_time) : "none") << '\n';
    if (tr.chattering_amplitude) os << "chattering_amplitude: " << format_double(*tr.chattering_amplitude) << '\n';
    os << "final_norm_e1: " << format_double(tr.norm_e1.back()) << '\n';
    if (r.certificate) {
        os << "certified_t1: " << format_double(r.certificate->t1) << '\n';
        os << "certified_t2: " << format_double(r.certificate->t2) << '\n';
        const bool before = tr.settling_time && *tr.settling_time <= r.certificate->t2;
        os << "settled_before_t2: " << (before ? "yes" : "no") << '\n';
    } else {
        os << "settled_before_t2: n/a (no certificate)\n";
    }
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

struct SweepRow {
    double scale = 0.0;
    bool admissible = false;
    bool diverged = false;
    std::optional<double> settling_time;
    std::optional<double> chattering_amplitude;
    double final_max_abs_error = 0.0;
};

/// Gains with mu and rho scaled and eta pinned at its minima.
[[nodiscard]] inline ControllerGains scaled_gains(const ControllerGains& base, const ThresholdReport& t, double scale) {
    ControllerGains g = base;
    for (std::size_t j = 0; j < g.size(); ++j) {
        g.mu_bar[j] *= scale;
        g.mu_tilde[j] *= scale;
        g.rho_bar[j] *= scale;
        g.rho_tilde[j] *= scale;
        g.eta_bar[j] = t.eta_bar_min[j];
        g.eta_tilde[j] = t.eta_tilde_min[j];
    }
    return g;
}

[[nodiscard]] inline std::vector<SweepRow> run_sweep(const Scenario& s, const std::vector<double>& scales) {
    if (!s.gains) throw ConfigError(ConfigErrorCode::MissingField, "controller", "sweep needs a controller section");
    for (double sc : scales)
        if (!(sc >= 0.0) || !std::isfinite(sc))
            throw ConfigError(ConfigErrorCode::InvalidValue, "--scales", "scale factors must be finite and >= 0");
    const ThresholdReport t = thresholds(s.network, s.weights, s.beta, s.mode);
    SimConfig cfg = s.sim;
    cfg.record_stride = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt)) + 1;

    auto run_one = [&](double scale) {
        SweepRow row;
        row.scale = scale;
        const ControllerGains g = scaled_gains(*s.gains, t, scale);
        row.admissible = verify_gains(t, g).admissible;
        try {
            const Trajectory tr = simulate(s.network, g, cfg, MonitorSettings{s.weights, s.beta, {}, {}});
            row.settling_time = tr.settling_time;
            row.chattering_amplitude = tr.chattering_amplitude;
            row.final_max_abs_error = max_abs_component(tr.e.back());
        } catch (const DivergenceError&) {
            row.diverged = true;
        }
        return row;
    };

    std::vector<std::future<SweepRow>> jobs;
    jobs.reserve(scales.size());
    for (double sc : scales) jobs.push_back(std::async(std::launch::async, run_one, sc));
    std::vector<SweepRow> rows;
    rows.reserve(scales.size());
    for (auto& j : jobs) rows.push_back(j.get());
    return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "scale,admissible,settled,settling_time,chattering_amplitude,final_max_abs_error,status\n";
    for (const SweepRow& r : rows) {
        os << format_double(r.scale) << ',' << (r.admissible ? 1 : 0) << ',' << (r.settling_time ? 1 : 0) << ','
           << (r.settling_time ? format_double(*r.settling_time) : "") << ','
           << (r.chattering_amplitude ? format_double(*r.chattering_amplitude) : "") << ','
           << (r.diverged ? "" : format_double(r.final_max_abs_error)) << ',' << (r.diverged ? "diverged" : "ok")
           << '\n';
    }
}

}  // namespace cvnn
