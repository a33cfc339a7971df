/**
 * @file dde_sim.hpp
 * @brief Fixed-step integration of the coupled master/slave networks with
 *        per-edge time-varying delays, plus the weighted-norm monitors.
 *
 * Delayed arguments x_k(t - tau_jk(t)) are read from history buffers that keep
 * every integration step of the last tau + dt time units and are linearly
 * interpolated between steps.
 */
#pragma once

#include "controller.hpp"
#include "criteria.hpp"
#include "model.hpp"
#include "split_complex.hpp"

#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cvnn {

class OutOfWindowError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(double t, double last_finite)
        : std::runtime_error("state became non-finite at t = " + std::to_string(t)), time_(t),
          last_finite_(last_finite) {}
    [[nodiscard]] double time() const noexcept { return time_; }
    [[nodiscard]] double last_finite_time() const noexcept { return last_finite_; }

private:
    double time_;
    double last_finite_;
};

/// Equally spaced state samples; sample i sits at start_time + i * dt.
class HistoryBuffer {
public:
    HistoryBuffer(double start_time, double dt) : start_(start_time), dt_(dt) {
        if (!(dt > 0.0)) throw std::invalid_argument("HistoryBuffer: dt must be > 0");
    }

    /// Buffer holding a constant state on [start_time, start_time + count * dt].
    static HistoryBuffer constant(double start_time, double dt, std::size_t count, const SplitVector& value) {
        HistoryBuffer b(start_time, dt);
        for (std::size_t i = 0; i <= count; ++i) b.push(value);
        return b;
    }

    void push(SplitVector state) { samples_.push_back(std::move(state)); }

    /// Drops samples while the window still starts at or before t_min.
    void trim_before(double t_min) {
        while (samples_.size() > 2 && time_at(1) <= t_min) {
            samples_.pop_front();
            start_ += dt_;
        }
    }

    [[nodiscard]] double start_time() const { return start_; }
    [[nodiscard]] double end_time() const { return time_at(samples_.size() - 1); }
    [[nodiscard]] double dt() const { return dt_; }
    [[nodiscard]] std::size_t size() const { return samples_.size(); }
    [[nodiscard]] const SplitVector& back() const { return samples_.back(); }
    [[nodiscard]] const SplitVector& operator[](std::size_t i) const { return samples_[i]; }

    [[nodiscard]] SplitComplex interpolate(double s, std::size_t k) const {
        const auto [i, frac] = locate(s);
        const SplitComplex& a = samples_[i][k];
        if (frac == 0.0) return a;
        const SplitComplex& b = samples_[i + 1][k];
        return a + frac * (b - a);
    }

    [[nodiscard]] SplitVector interpolate(double s) const {
        SplitVector out(samples_.front().size());
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = interpolate(s, k);
        return out;
    }

private:
    [[nodiscard]] double time_at(std::size_t i) const { return start_ + static_cast<double>(i) * dt_; }

    [[nodiscard]] std::pair<std::size_t, double> locate(double s) const {
        if (samples_.empty()) throw OutOfWindowError("HistoryBuffer: empty");
        double pos = (s - start_) / dt_;
        const double last = static_cast<double>(samples_.size() - 1);
        const double snapped = std::round(pos);
        if (std::fabs(pos - snapped) < 1e-9) pos = snapped;
        if (pos < 0.0 || pos > last)
            throw OutOfWindowError("HistoryBuffer: lookup at t = " + std::to_string(s) + " outside [" +
                                   std::to_string(start_time()) + ", " + std::to_string(end_time()) + "]");
        const auto i = static_cast<std::size_t>(std::floor(pos));
        if (i == samples_.size() - 1) return {i, 0.0};
        return {i, pos - static_cast<double>(i)};
    }

    double start_;
    double dt_;
    std::deque<SplitVector> samples_;
};

/// Maximum of the values pushed within the trailing window [t - width, t].
class SlidingWindowMax {
public:
    explicit SlidingWindowMax(double width) : width_(width) {}

    void push(double t, double value) {
        while (!q_.empty() && q_.back().second <= value) q_.pop_back();
        q_.emplace_back(t, value);
        while (q_.front().first < t - width_ - 1e-12) q_.pop_front();
    }

    [[nodiscard]] bool empty() const { return q_.empty(); }
    [[nodiscard]] double value() const { return q_.front().second; }

private:
    double width_;
    std::deque<std::pair<double, double>> q_;
};

/// sup over the last tau of e^{eps s} ||E1(s)||
class MonitorM {
public:
    MonitorM(NormWeights w, double epsilon, double tau) : w_(std::move(w)), eps_(epsilon), win_(tau) {}

    double push(double t, const SplitVector& e) {
        win_.push(t, std::exp(eps_ * t) * weighted_inf_norm(e, w_));
        return win_.value();
    }

private:
    NormWeights w_;
    double eps_;
    SlidingWindowMax win_;
};

/// sup over the last tau of ||E2(s)|| + rho s
class MonitorV {
public:
    MonitorV(NormWeights w, double beta, double rho, double tau)
        : w_(std::move(w)), beta_(beta), rho_(rho), win_(tau) {}

    double push(double t, const SplitVector& e) {
        win_.push(t, weighted_power_norm(e, w_, beta_) + rho_ * t);
        return win_.value();
    }

private:
    NormWeights w_;
    double beta_;
    double rho_;
    SlidingWindowMax win_;
};

enum class Scheme { Euler, Rk4Lagged };

[[nodiscard]] inline std::string_view to_string(Scheme s) { return s == Scheme::Euler ? "euler" : "rk4"; }

[[nodiscard]] inline Scheme scheme_from(std::string_view s) {
    if (s == "euler") return Scheme::Euler;
    if (s == "rk4" || s == "rk4-lagged") return Scheme::Rk4Lagged;
    throw std::invalid_argument("unknown scheme '" + std::string(s) + "'");
}

struct SimConfig {
    double dt = 1e-4;
    double t_end = 30.0;
    Scheme scheme = Scheme::Euler;
    double settle_tolerance = 1e-2;
    std::size_t record_stride = 1;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

inline void validate(const SimConfig& c, double tau) {
    if (!(c.dt > 0.0)) throw std::invalid_argument("sim: dt must be > 0");
    if (tau > 0.0 && c.dt > tau / 10.0 + 1e-15) throw std::invalid_argument("sim: dt must be <= tau / 10");
    if (!(c.t_end > 0.0)) throw std::invalid_argument("sim: t_end must be > 0");
    if (!(c.settle_tolerance > 0.0)) throw std::invalid_argument("sim: settle_tolerance must be > 0");
    if (c.record_stride == 0) throw std::invalid_argument("sim: record_stride must be positive");
}

/// Norm weights and the decay constants driving the M and V monitors.
struct MonitorSettings {
    NormWeights weights;
    double beta = 0.5;
    std::optional<double> epsilon;  ///< enables monitor M
    std::optional<double> rho;      ///< enables monitor V
};

[[nodiscard]] inline MonitorSettings unit_monitors(std::size_t n, double beta = 0.5) {
    return {NormWeights{std::vector<double>(n, 1.0), std::vector<double>(n, 1.0)}, beta, std::nullopt, std::nullopt};
}

struct Trajectory {
    std::vector<double> times;
    std::vector<SplitVector> x, y, e;
    std::vector<double> norm_e1;
    std::vector<std::optional<double>> monitor_m;
    std::vector<std::optional<double>> norm_e2;
    std::vector<std::optional<double>> monitor_v;
    /// first grid time after which every step stays below settle_tolerance (step resolution, not record stride)
    std::optional<double> settling_time;
    /// max |e| component at or after settling_time
    std::optional<double> chattering_amplitude;
    /// first time every |e| component was <= 1
    std::optional<double> phase_two_start;

    [[nodiscard]] std::size_t size() const { return times.size(); }
    [[nodiscard]] bool settled_at(std::size_t i) const { return settling_time && times[i] >= *settling_time; }
};

namespace detail {

struct PairState {
    SplitVector x;
    SplitVector y;
};

inline void add_scaled(SplitVector& out, const SplitVector& base, double h, const SplitVector& d) {
    out.resize(base.size());
    for (std::size_t j = 0; j < base.size(); ++j) out[j] = base[j] + h * d[j];
}

inline bool all_finite(const SplitVector& v) {
    for (const auto& z : v)
        if (!z.finite()) return false;
    return true;
}

class Integrator {
public:
    Integrator(const NetworkSpec& net, const ControllerGains* gains, const SimConfig& cfg)
        : net_(net), gains_(gains), cfg_(cfg),
          hx_(HistoryBuffer::constant(-static_cast<double>(window_steps()) * cfg.dt, cfg.dt, window_steps(), net.phi_init)),
          hy_(HistoryBuffer::constant(-static_cast<double>(window_steps()) * cfg.dt, cfg.dt, window_steps(), net.psi_init)),
          xd_(zeros(net.n, net.n)), yd_(zeros(net.n, net.n)) {}

    [[nodiscard]] PairState current() const { return {hx_.back(), hy_.back()}; }

    /// Advances from step index n (time n * dt) to n + 1.
    void step(std::size_t n) {
        const double t = static_cast<double>(n) * cfg_.dt;
        const double h = cfg_.dt;
        const SplitVector x = hx_.back();
        const SplitVector y = hy_.back();
        SplitVector nx, ny;
        if (cfg_.scheme == Scheme::Euler) {
            const auto [dx, dy] = derivative(t, t, x, y);
            add_scaled(nx, x, h, dx);
            add_scaled(ny, y, h, dy);
        } else {
            SplitVector xs, ys;
            const auto [k1x, k1y] = derivative(t, t, x, y);
            add_scaled(xs, x, 0.5 * h, k1x);
            add_scaled(ys, y, 0.5 * h, k1y);
            const auto [k2x, k2y] = derivative(t + 0.5 * h, t, xs, ys);
            add_scaled(xs, x, 0.5 * h, k2x);
            add_scaled(ys, y, 0.5 * h, k2y);
            const auto [k3x, k3y] = derivative(t + 0.5 * h, t, xs, ys);
            add_scaled(xs, x, h, k3x);
            add_scaled(ys, y, h, k3y);
            const auto [k4x, k4y] = derivative(t + h, t, xs, ys);
            nx.resize(net_.n);
            ny.resize(net_.n);
            for (std::size_t j = 0; j < net_.n; ++j) {
                nx[j] = x[j] + (h / 6.0) * (k1x[j] + 2.0 * k2x[j] + 2.0 * k3x[j] + k4x[j]);
                ny[j] = y[j] + (h / 6.0) * (k1y[j] + 2.0 * k2y[j] + 2.0 * k3y[j] + k4y[j]);
            }
        }
        if (!all_finite(nx) || !all_finite(ny)) throw DivergenceError(t + h, t);
        hx_.push(std::move(nx));
        hy_.push(std::move(ny));
        const double keep_from = t + h - net_.tau - h;
        hx_.trim_before(keep_from);
        hy_.trim_before(keep_from);
    }

private:
    [[nodiscard]] std::size_t window_steps() const {
        return static_cast<std::size_t>(std::ceil(net_.tau / cfg_.dt)) + 1;
    }

    // Delayed lookups use tau evaluated at the stage time; arguments later than
    // the step start t_n fall back to the state at t_n.
    void fill_delayed(double t_stage, double t_n) {
        for (std::size_t j = 0; j < net_.n; ++j) {
            for (std::size_t k = 0; k < net_.n; ++k) {
                const double s = t_stage - eval_delay(net_.delays[j][k], t_stage);
                if (s >= t_n) {
                    xd_[j][k] = hx_.back()[k];
                    yd_[j][k] = hy_.back()[k];
                } else {
                    xd_[j][k] = hx_.interpolate(s, k);
                    yd_[j][k] = hy_.interpolate(s, k);
                }
            }
        }
    }

    std::pair<SplitVector, SplitVector> derivative(double t_stage, double t_n, const SplitVector& x,
                                                   const SplitVector& y) {
        fill_delayed(t_stage, t_n);
        SplitVector u(net_.n);
        if (gains_ != nullptr) {
            SplitVector e(net_.n);
            for (std::size_t j = 0; j < net_.n; ++j) e[j] = x[j] + y[j];
            u = control(*gains_, e);
        }
        return {master_rhs(net_, x, xd_), slave_rhs(net_, y, yd_, u)};
    }

    const NetworkSpec& net_;
    const ControllerGains* gains_;
    SimConfig cfg_;
    HistoryBuffer hx_;
    HistoryBuffer hy_;
    SplitMatrix xd_;
    SplitMatrix yd_;
};

}  // namespace detail

/**
 * Integrates master and slave on a shared grid t_n = n * dt up to t_end.
 *
 * Without gains the slave runs uncontrolled. Norms use the monitor weights
 * (unit weights when none are given). M is filled when an epsilon is given;
 * the E2 norm and V start once every error component is <= 1, V only when a
 * rho is given.
 * Throws DivergenceError on non-finite states and OutOfWindowError if a
 * delayed lookup leaves the retained history.
 */
[[nodiscard]] inline Trajectory simulate(const NetworkSpec& net, const std::optional<ControllerGains>& gains,
                                         const SimConfig& cfg,
                                         const std::optional<MonitorSettings>& monitors = std::nullopt) {
    validate(net);
    validate(cfg, net.tau);
    if (gains) validate(*gains, net.n);

    const auto steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
    detail::Integrator integ(net, gains ? &*gains : nullptr, cfg);

    const MonitorSettings mon = monitors ? *monitors : unit_monitors(net.n, gains ? gains->beta : 0.5);
    validate(mon.weights, net.n);
    std::optional<MonitorM> mon_m;
    std::optional<MonitorV> mon_v;
    if (mon.epsilon) {
        mon_m.emplace(mon.weights, *mon.epsilon, net.tau);
        // Constant history on [-tau, 0).
        const SplitVector e0 = initial_error(net);
        const auto hist = static_cast<std::size_t>(std::ceil(net.tau / cfg.dt));
        for (std::size_t i = hist; i >= 1; --i) mon_m->push(-static_cast<double>(i) * cfg.dt, e0);
    }

    Trajectory tr;
    std::optional<std::size_t> last_violation;
    std::vector<double> max_abs(steps + 1);

    for (std::size_t n = 0;; ++n) {
        const double t = static_cast<double>(n) * cfg.dt;
        auto [x, y] = integ.current();
        SplitVector e(net.n);
        for (std::size_t j = 0; j < net.n; ++j) e[j] = x[j] + y[j];
        const double amax = max_abs_component(e);
        max_abs[n] = amax;
        if (amax >= cfg.settle_tolerance) last_violation = n;

        std::optional<double> m_val, e2_val, v_val;
        if (mon_m) m_val = mon_m->push(t, e);
        if (!tr.phase_two_start && amax <= 1.0) {
            tr.phase_two_start = t;
            if (mon.rho) mon_v.emplace(mon.weights, mon.beta, *mon.rho, net.tau);
        }
        if (tr.phase_two_start) {
            e2_val = weighted_power_norm(e, mon.weights, mon.beta);
            if (mon_v) v_val = mon_v->push(t, e);
        }

        if (n % cfg.record_stride == 0 || n == steps) {
            tr.times.push_back(t);
            tr.norm_e1.push_back(weighted_inf_norm(e, mon.weights));
            tr.monitor_m.push_back(m_val);
            tr.norm_e2.push_back(e2_val);
            tr.monitor_v.push_back(v_val);
            tr.x.push_back(std::move(x));
            tr.y.push_back(std::move(y));
            tr.e.push_back(std::move(e));
        }
        if (n == steps) break;
        integ.step(n);
    }

    const std::size_t settle_step = last_violation ? *last_violation + 1 : 0;
    if (settle_step <= steps) {
        tr.settling_time = static_cast<double>(settle_step) * cfg.dt;
        double chatter = 0.0;
        for (std::size_t n = settle_step; n <= steps; ++n) chatter = std::max(chatter, max_abs[n]);
        tr.chattering_amplitude = chatter;
    }
    return tr;
}

}  // namespace cvnn
