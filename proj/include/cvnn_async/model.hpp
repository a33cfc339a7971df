/**
 * @file model.hpp
 * @brief Master/slave complex-valued network description and its
 *        real/imaginary decomposed right-hand sides.
 *
 * Each neuron obeys
 *
 *     x_j' = -d_j x_j + sum_k a_jk f_k(x_k(t)) + sum_k b_jk g_k(x_k(t - tau_jk(t))) + H_j
 *
 * and is integrated as the pair (x_j^R, x_j^I). Activations come from a closed
 * catalog so every entry ships with analytic Lipschitz bound matrices.
 */
#pragma once

#include "split_complex.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cvnn {

// ---------------------------------------------------------------------------
// Activations
// ---------------------------------------------------------------------------

enum class ActivationKind { SigmoidPair, SaturatingLinear };

/// Inner arguments u_R = p_R x^R + q_R x^I and u_I = p_I x^R + q_I x^I.
struct ActivationMix {
    double p_re = 1.0;
    double q_re = 0.0;
    double p_im = 0.0;
    double q_im = 1.0;

    friend constexpr bool operator==(const ActivationMix&, const ActivationMix&) = default;
};

/// Bound matrix for an activation plus its row-swapped companion.
struct BoundPair {
    Mat2 bar{};
    Mat2 tilde{};

    friend constexpr bool operator==(const BoundPair&, const BoundPair&) = default;
};

struct ActivationSpec {
    ActivationKind kind = ActivationKind::SigmoidPair;
    ActivationMix mix{};
    /// Entry (l1, l2) bounds |d f^{l1} / d x^{l2}|; rows/cols ordered (R, I).
    Mat2 bound{};

    [[nodiscard]] Mat2 bound_tilde() const { return row_swap(bound); }
    [[nodiscard]] BoundPair bounds() const { return {bound, bound_tilde()}; }

    /// Every partial derivative is nonnegative (all mix coefficients >= 0).
    [[nodiscard]] bool monotone() const {
        return mix.p_re >= 0.0 && mix.q_re >= 0.0 && mix.p_im >= 0.0 && mix.q_im >= 0.0;
    }

    friend bool operator==(const ActivationSpec&, const ActivationSpec&) = default;
};

[[nodiscard]] inline std::string_view to_string(ActivationKind k) {
    switch (k) {
        case ActivationKind::SigmoidPair: return "sigmoid-pair";
        case ActivationKind::SaturatingLinear: return "saturating-linear";
    }
    return "unknown";
}

[[nodiscard]] inline ActivationKind activation_kind_from(std::string_view name) {
    if (name == "sigmoid-pair") return ActivationKind::SigmoidPair;
    if (name == "saturating-linear") return ActivationKind::SaturatingLinear;
    throw std::invalid_argument("unknown activation kind '" + std::string(name) + "'");
}

namespace detail {

// (1 - e^{-u}) / (1 + e^{-u}) == tanh(u / 2); tanh is odd to the last bit.
inline double sigmoid_pair_scalar(double u) { return std::tanh(0.5 * u); }

inline double saturating_scalar(double u) { return 0.5 * (std::fabs(u + 1.0) - std::fabs(u - 1.0)); }

inline double scalar_activation(ActivationKind kind, double u) {
    return kind == ActivationKind::SigmoidPair ? sigmoid_pair_scalar(u) : saturating_scalar(u);
}

// Largest slope of the scalar activation.
inline double max_slope(ActivationKind kind) { return kind == ActivationKind::SigmoidPair ? 0.5 : 1.0; }

}  // namespace detail

[[nodiscard]] inline SplitComplex eval_activation(const ActivationSpec& spec, const SplitComplex& x) {
    const double u_re = spec.mix.p_re * x.re + spec.mix.q_re * x.im;
    const double u_im = spec.mix.p_im * x.re + spec.mix.q_im * x.im;
    return {detail::scalar_activation(spec.kind, u_re), detail::scalar_activation(spec.kind, u_im)};
}

/// Tight analytic bound matrices for a catalog activation.
[[nodiscard]] inline BoundPair analytic_bounds(ActivationKind kind, const ActivationMix& mix) {
    const double s = detail::max_slope(kind);
    const Mat2 bar{{{s * std::fabs(mix.p_re), s * std::fabs(mix.q_re)},
                    {s * std::fabs(mix.p_im), s * std::fabs(mix.q_im)}}};
    return {bar, row_swap(bar)};
}

[[nodiscard]] inline BoundPair analytic_bounds(const ActivationSpec& spec) {
    return analytic_bounds(spec.kind, spec.mix);
}

/// Catalog activation with its analytic bounds filled in.
[[nodiscard]] inline ActivationSpec make_activation(ActivationKind kind, ActivationMix mix) {
    return {kind, mix, analytic_bounds(kind, mix).bar};
}

struct PartialEstimate {
    Mat2 max_abs{};  ///< max |d f^{l1} / d x^{l2}| over the grid
    Mat2 min{};      ///< signed minimum over the grid
};

/// Central finite differences of both output parts on a uniform grid over [-w, w]^2.
[[nodiscard]] inline PartialEstimate estimate_partials(const ActivationSpec& spec, double half_width,
                                                       int grid_points, double h = 1e-6) {
    if (grid_points < 3) throw std::invalid_argument("estimate_partials: need at least 3 grid points");
    PartialEstimate out;
    for (auto& row : out.min) row = {0.0, 0.0};
    bool first = true;
    const double step = 2.0 * half_width / static_cast<double>(grid_points - 1);
    for (int i = 0; i < grid_points; ++i) {
        const double xr = -half_width + step * i;
        for (int k = 0; k < grid_points; ++k) {
            const double xi = -half_width + step * k;
            const SplitComplex dr = eval_activation(spec, {xr + h, xi}) - eval_activation(spec, {xr - h, xi});
            const SplitComplex di = eval_activation(spec, {xr, xi + h}) - eval_activation(spec, {xr, xi - h});
            const Mat2 partial{{{dr.re / (2 * h), di.re / (2 * h)}, {dr.im / (2 * h), di.im / (2 * h)}}};
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    out.max_abs[a][b] = std::max(out.max_abs[a][b], std::fabs(partial[a][b]));
                    out.min[a][b] = first ? partial[a][b] : std::min(out.min[a][b], partial[a][b]);
                }
            }
            first = false;
        }
    }
    return out;
}

[[nodiscard]] inline BoundPair estimate_bounds(const ActivationSpec& spec, double half_width, int grid_points) {
    const Mat2 m = estimate_partials(spec, half_width, grid_points).max_abs;
    return {m, row_swap(m)};
}

// ---------------------------------------------------------------------------
// Delays
// ---------------------------------------------------------------------------

enum class DelayKind { Constant, LogisticShifted, ReciprocalAbsCos, ReciprocalAbsSin };

[[nodiscard]] inline std::string_view to_string(DelayKind k) {
    switch (k) {
        case DelayKind::Constant: return "constant";
        case DelayKind::LogisticShifted: return "logistic-shifted";
        case DelayKind::ReciprocalAbsCos: return "reciprocal-abs-cos";
        case DelayKind::ReciprocalAbsSin: return "reciprocal-abs-sin";
    }
    return "unknown";
}

[[nodiscard]] inline DelayKind delay_kind_from(std::string_view name) {
    if (name == "constant") return DelayKind::Constant;
    if (name == "logistic-shifted") return DelayKind::LogisticShifted;
    if (name == "reciprocal-abs-cos") return DelayKind::ReciprocalAbsCos;
    if (name == "reciprocal-abs-sin") return DelayKind::ReciprocalAbsSin;
    throw std::invalid_argument("unknown delay kind '" + std::string(name) + "'");
}

/**
 * Catalog of bounded delays:
 *   constant            tau(t) = param
 *   logistic-shifted    tau(t) = (e^t - param) / (1 + e^t)
 *   reciprocal-abs-cos  tau(t) = 1 / (1 + |cos(param t)|)
 *   reciprocal-abs-sin  tau(t) = 1 / (1 + |sin(param t)|)
 */
struct DelaySpec {
    DelayKind kind = DelayKind::Constant;
    double param = 0.0;
    double bound = 0.0;

    friend constexpr bool operator==(const DelaySpec&, const DelaySpec&) = default;
};

[[nodiscard]] inline double eval_delay(const DelaySpec& spec, double t) {
    switch (spec.kind) {
        case DelayKind::Constant: return spec.param;
        case DelayKind::LogisticShifted: {
            // (e^t - c)/(1 + e^t) rewritten with e^{-t} so large t cannot overflow.
            const double em = std::exp(-t);
            return (1.0 - spec.param * em) / (1.0 + em);
        }
        case DelayKind::ReciprocalAbsCos: return 1.0 / (1.0 + std::fabs(std::cos(spec.param * t)));
        case DelayKind::ReciprocalAbsSin: return 1.0 / (1.0 + std::fabs(std::sin(spec.param * t)));
    }
    return 0.0;
}

/// Largest violation of 0 <= tau(t) <= bound on a uniform grid over [0, horizon]; 0 when none.
[[nodiscard]] inline double delay_bound_violation(const DelaySpec& spec, double horizon, int points = 10000) {
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const double t = points > 1 ? horizon * i / (points - 1) : 0.0;
        const double v = eval_delay(spec, t);
        if (!std::isfinite(v)) return INFINITY;
        worst = std::max({worst, -v, v - spec.bound});
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Network
// ---------------------------------------------------------------------------

struct NetworkSpec {
    std::size_t n = 0;
    std::vector<double> d;
    SplitMatrix a;
    SplitMatrix b;
    SplitVector h;
    std::vector<ActivationSpec> f;
    std::vector<ActivationSpec> g;
    std::vector<std::vector<DelaySpec>> delays;
    double tau = 0.0;
    /// Constant initial histories on [-tau, 0].
    SplitVector phi_init;
    SplitVector psi_init;

    /// Largest declared delay bound.
    [[nodiscard]] double max_delay_bound() const {
        double m = 0.0;
        for (const auto& row : delays)
            for (const auto& s : row) m = std::max(m, s.bound);
        return m;
    }

    friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

class ModelError : public std::invalid_argument {
public:
    ModelError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Structural checks on a network; throws ModelError naming the offending field.
inline void validate(const NetworkSpec& net) {
    const std::size_t n = net.n;
    if (n == 0) throw ModelError("n", "must be positive");
    auto check_len = [n](const char* name, std::size_t len) {
        if (len != n) throw ModelError(name, "expected " + std::to_string(n) + " entries, got " + std::to_string(len));
    };
    check_len("d", net.d.size());
    check_len("A", net.a.size());
    check_len("B", net.b.size());
    check_len("H", net.h.size());
    check_len("f", net.f.size());
    check_len("g", net.g.size());
    check_len("delays", net.delays.size());
    check_len("phi_init", net.phi_init.size());
    check_len("psi_init", net.psi_init.size());
    for (std::size_t j = 0; j < n; ++j) {
        check_len("A row", net.a[j].size());
        check_len("B row", net.b[j].size());
        check_len("delays row", net.delays[j].size());
        if (!(net.d[j] > 0.0)) throw ModelError("d[" + std::to_string(j) + "]", "self-feedback must be > 0");
    }
    auto check_bound = [](const std::string& name, const ActivationSpec& s) {
        for (const auto& row : s.bound)
            for (double v : row)
                if (!(v >= 0.0)) throw ModelError(name, "bound matrix entries must be nonnegative");
        const Mat2 tight = analytic_bounds(s).bar;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                if (s.bound[r][c] < tight[r][c] - 1e-12)
                    throw ModelError(name, "declared bound is below the analytic Lipschitz bound");
    };
    for (std::size_t k = 0; k < n; ++k) {
        check_bound("f[" + std::to_string(k) + "]", net.f[k]);
        check_bound("g[" + std::to_string(k) + "]", net.g[k]);
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            const auto& s = net.delays[j][k];
            if (!(s.bound >= 0.0)) throw ModelError("delays", "delay bound must be >= 0");
            if (s.bound > net.tau)
                throw ModelError("tau", "tau must be at least every delay bound");
        }
    }
}

/// Checks 0 <= tau_jk(t) <= bound on a grid over [0, horizon].
inline void validate_delays(const NetworkSpec& net, double horizon, int points = 10000) {
    for (std::size_t j = 0; j < net.n; ++j)
        for (std::size_t k = 0; k < net.n; ++k)
            if (delay_bound_violation(net.delays[j][k], horizon, points) > 1e-12)
                throw ModelError("delays[" + std::to_string(j) + "][" + std::to_string(k) + "]",
                                 "delay leaves [0, bound] on the simulation horizon");
}

namespace detail {

inline SplitVector eval_all(const std::vector<ActivationSpec>& specs, const SplitVector& x) {
    SplitVector out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = eval_activation(specs[k], x[k]);
    return out;
}

// sum_k (a_jk^T M^R v_k, a_jk^T M^I v_k)
inline SplitComplex coupling(const SplitVector& row, const SplitVector& v) {
    SplitComplex acc;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const Vec2 ah = hat(row[k]);
        const Vec2 vh = hat(v[k]);
        acc.re += bilinear(ah, MMatrices::real, vh);
        acc.im += bilinear(ah, MMatrices::imag, vh);
    }
    return acc;
}

}  // namespace detail

/**
 * Decomposed right-hand side of one network.
 *
 * @param delayed delayed[j][k] holds x_k(t - tau_jk(t)).
 */
[[nodiscard]] inline SplitVector master_rhs(const NetworkSpec& net, const SplitVector& state,
                                            const SplitMatrix& delayed) {
    const std::size_t n = net.n;
    const SplitVector fx = detail::eval_all(net.f, state);
    SplitVector out(n);
    SplitVector gx(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) gx[k] = eval_activation(net.g[k], delayed[j][k]);
        out[j] = -net.d[j] * state[j] + detail::coupling(net.a[j], fx) + detail::coupling(net.b[j], gx) + net.h[j];
    }
    return out;
}

/// Slave network: master dynamics plus the control input.
[[nodiscard]] inline SplitVector slave_rhs(const NetworkSpec& net, const SplitVector& state,
                                           const SplitMatrix& delayed, const SplitVector& u) {
    SplitVector out = master_rhs(net, state, delayed);
    for (std::size_t j = 0; j < net.n; ++j) out[j] += u[j];
    return out;
}

/// Right-hand side of the anti-synchronization error e = x + y.
[[nodiscard]] inline SplitVector error_rhs(const NetworkSpec& net, const SplitVector& x, const SplitVector& y,
                                           const SplitMatrix& x_delayed, const SplitMatrix& y_delayed,
                                           const SplitVector& u) {
    const std::size_t n = net.n;
    const SplitVector fx = detail::eval_all(net.f, x);
    const SplitVector fy = detail::eval_all(net.f, y);
    SplitVector fsum(n);
    for (std::size_t k = 0; k < n; ++k) fsum[k] = fx[k] + fy[k];
    SplitVector out(n);
    SplitVector gsum(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k)
            gsum[k] = eval_activation(net.g[k], x_delayed[j][k]) + eval_activation(net.g[k], y_delayed[j][k]);
        const SplitComplex e = x[j] + y[j];
        out[j] = -net.d[j] * e + detail::coupling(net.a[j], fsum) + detail::coupling(net.b[j], gsum) +
                 2.0 * net.h[j] + u[j];
    }
    return out;
}

}  // namespace cvnn
