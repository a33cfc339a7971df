/**
 * @file criteria.hpp
 * @brief Gain thresholds for finite-time anti-synchronization, admissibility
 *        checks, search of the decay constants (epsilon, rho) and the
 *        resulting convergence-time certificate.
 *
 * All quantities are expressed per neuron j and per family: the "bar" family
 * acts on real parts and is weighted by xi_j, the "tilde" family acts on
 * imaginary parts and is weighted by phi_j. With p = 1/(1 - beta):
 *
 *     mu_min      = -d_j + diag_sign + r * diag_cross + (offdiag(w) + delay(w)) / w_j
 *     rho_offset  = -d_j + diag_sign + r^p * diag_cross + w_j^{-p} offdiag(w^p)
 *     rho_min     = (rho_offset - mu)^+
 *     eta_min     = sum_k |b_jk| G_k (1, 1)^T + 2 |H_j|
 *
 * where r = phi_j / xi_j for the bar family and xi_j / phi_j for the tilde
 * family. In Lipschitz mode diag_sign uses |a_jj| instead of the positive
 * parts, which reproduces the sign-free thresholds.
 */
#pragma once

#include "controller.hpp"
#include "model.hpp"
#include "split_complex.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cvnn {

struct NormWeights {
    std::vector<double> xi;
    std::vector<double> phi;

    [[nodiscard]] std::size_t size() const { return xi.size(); }
    /// min over both xi and phi
    [[nodiscard]] double min_all() const {
        return std::min(*std::min_element(xi.begin(), xi.end()), *std::min_element(phi.begin(), phi.end()));
    }

    friend bool operator==(const NormWeights&, const NormWeights&) = default;
};

inline void validate(const NormWeights& w, std::size_t n) {
    if (w.xi.size() != n || w.phi.size() != n)
        throw std::invalid_argument("weights: xi and phi need " + std::to_string(n) + " entries");
    for (double v : w.xi)
        if (!(v > 0.0)) throw std::invalid_argument("weights: xi entries must be > 0");
    for (double v : w.phi)
        if (!(v > 0.0)) throw std::invalid_argument("weights: phi entries must be > 0");
}

/// max_j max(|v_j^R| / xi_j, |v_j^I| / phi_j)
[[nodiscard]] inline double weighted_inf_norm(const SplitVector& v, const NormWeights& w) {
    double m = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j)
        m = std::max({m, std::fabs(v[j].re) / w.xi[j], std::fabs(v[j].im) / w.phi[j]});
    return m;
}

/// Weighted norm of the fractional-power error, components |e|^{1-beta} / (1 - beta).
[[nodiscard]] inline double weighted_power_norm(const SplitVector& v, const NormWeights& w, double beta) {
    const double q = 1.0 - beta;
    double m = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j)
        m = std::max({m, std::pow(std::fabs(v[j].re), q) / (q * w.xi[j]),
                      std::pow(std::fabs(v[j].im), q) / (q * w.phi[j])});
    return m;
}

[[nodiscard]] inline double max_abs_component(const SplitVector& v) {
    double m = 0.0;
    for (const auto& z : v) m = std::max({m, std::fabs(z.re), std::fabs(z.im)});
    return m;
}

enum class CriteriaMode { Theorem1, Lipschitz };

[[nodiscard]] inline std::string_view to_string(CriteriaMode m) {
    return m == CriteriaMode::Theorem1 ? "theorem1" : "lipschitz";
}

[[nodiscard]] inline CriteriaMode criteria_mode_from(std::string_view s) {
    if (s == "theorem1") return CriteriaMode::Theorem1;
    if (s == "lipschitz") return CriteriaMode::Lipschitz;
    throw std::invalid_argument("unknown criteria mode '" + std::string(s) + "'");
}

class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Building blocks of one family's inequalities for one neuron.
struct FamilyTerms {
    double leak = 0.0;        ///< -d_j
    double diag_sign = 0.0;   ///< own-part self-coupling (positive parts in theorem1 mode)
    double diag_cross = 0.0;  ///< other-part self-coupling, unweighted
    double ratio = 1.0;       ///< phi_j/xi_j (bar) or xi_j/phi_j (tilde)
    double own_weight = 1.0;  ///< xi_j (bar) or phi_j (tilde)
    double offdiag = 0.0;     ///< sum_{k != j} |a_jk| L_k w_k
    double delay = 0.0;       ///< sum_k |b_jk| G_k w_k
    double offdiag_pow = 0.0; ///< sum_{k != j} |a_jk| L_k w_k^p
    double eta_min = 0.0;

    [[nodiscard]] double mu_min() const { return leak + diag_sign + ratio * diag_cross + (offdiag + delay) / own_weight; }

    [[nodiscard]] double rho_offset(double beta) const {
        const double p = 1.0 / (1.0 - beta);
        return leak + diag_sign + std::pow(ratio, p) * diag_cross + std::pow(own_weight, -p) * offdiag_pow;
    }

    /// Left side of the decay inequality; feasible while negative.
    [[nodiscard]] double epsilon_lhs(double epsilon, double tau, double mu) const {
        return epsilon + leak - mu + diag_sign + ratio * diag_cross + offdiag / own_weight +
               std::exp(epsilon * tau) * delay / own_weight;
    }
};

struct NeuronTerms {
    FamilyTerms bar;
    FamilyTerms tilde;
};

[[nodiscard]] inline NeuronTerms neuron_terms(const NetworkSpec& net, const NormWeights& w, double beta,
                                              CriteriaMode mode, std::size_t j) {
    const double p = 1.0 / (1.0 - beta);
    const SplitComplex ajj = net.a[j][j];
    const Mat2& lam = net.f[j].bound;
    const double l_rr = lam[0][0], l_ri = lam[0][1], l_ir = lam[1][0], l_ii = lam[1][1];

    NeuronTerms t;
    FamilyTerms& bar = t.bar;
    FamilyTerms& tilde = t.tilde;
    bar.leak = tilde.leak = -net.d[j];
    if (mode == CriteriaMode::Theorem1) {
        bar.diag_sign = dot({pos_part(ajj.re), pos_part(-ajj.im)}, {l_rr, l_ir});
        tilde.diag_sign = dot({pos_part(ajj.im), pos_part(ajj.re)}, {l_ri, l_ii});
    } else {
        bar.diag_sign = dot({std::fabs(ajj.re), std::fabs(ajj.im)}, {l_rr, l_ir});
        tilde.diag_sign = dot({std::fabs(ajj.im), std::fabs(ajj.re)}, {l_ri, l_ii});
    }
    bar.diag_cross = dot({std::fabs(ajj.re), std::fabs(ajj.im)}, {l_ri, l_ii});
    tilde.diag_cross = dot({std::fabs(ajj.im), std::fabs(ajj.re)}, {l_rr, l_ir});
    bar.own_weight = w.xi[j];
    tilde.own_weight = w.phi[j];
    bar.ratio = w.phi[j] / w.xi[j];
    tilde.ratio = w.xi[j] / w.phi[j];

    for (std::size_t k = 0; k < net.n; ++k) {
        const Vec2 wk{w.xi[k], w.phi[k]};
        const Vec2 wk_pow{std::pow(w.xi[k], p), std::pow(w.phi[k], p)};
        const Vec2 ones{1.0, 1.0};
        const Vec2 b_abs = abs_pair(net.b[j][k]);
        const Mat2& g_bar = net.g[k].bound;
        const Mat2 g_tilde = net.g[k].bound_tilde();
        bar.delay += dot(b_abs, mat_vec(g_bar, wk));
        tilde.delay += dot(b_abs, mat_vec(g_tilde, wk));
        bar.eta_min += dot(b_abs, mat_vec(g_bar, ones));
        tilde.eta_min += dot(b_abs, mat_vec(g_tilde, ones));
        if (k == j) continue;
        const Vec2 a_abs = abs_pair(net.a[j][k]);
        const Mat2& l_bar = net.f[k].bound;
        const Mat2 l_tilde = net.f[k].bound_tilde();
        bar.offdiag += dot(a_abs, mat_vec(l_bar, wk));
        tilde.offdiag += dot(a_abs, mat_vec(l_tilde, wk));
        bar.offdiag_pow += dot(a_abs, mat_vec(l_bar, wk_pow));
        tilde.offdiag_pow += dot(a_abs, mat_vec(l_tilde, wk_pow));
    }
    bar.eta_min += 2.0 * std::fabs(net.h[j].re);
    tilde.eta_min += 2.0 * std::fabs(net.h[j].im);
    return t;
}

// ---------------------------------------------------------------------------
// Thresholds and admissibility
// ---------------------------------------------------------------------------

struct ThresholdReport {
    CriteriaMode mode = CriteriaMode::Theorem1;
    double beta = 0.5;
    std::vector<double> mu_bar_min, mu_tilde_min;
    /// rho minima are (offset - mu)^+ and therefore depend on the chosen mu.
    std::vector<double> rho_bar_offset, rho_tilde_offset;
    std::vector<double> eta_bar_min, eta_tilde_min;

    [[nodiscard]] std::size_t size() const { return mu_bar_min.size(); }
    [[nodiscard]] double rho_bar_min(std::size_t j, double mu_bar) const { return pos_part(rho_bar_offset[j] - mu_bar); }
    [[nodiscard]] double rho_tilde_min(std::size_t j, double mu_tilde) const {
        return pos_part(rho_tilde_offset[j] - mu_tilde);
    }
};

inline void check_criteria_inputs(const NetworkSpec& net, const NormWeights& w, double beta, CriteriaMode mode) {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
    validate(w, net.n);
    if (mode == CriteriaMode::Theorem1) {
        for (std::size_t k = 0; k < net.n; ++k)
            if (!net.f[k].monotone())
                throw std::invalid_argument("theorem1 mode needs nonnegative partials of f[" + std::to_string(k) +
                                            "]; use lipschitz mode");
    }
}

[[nodiscard]] inline ThresholdReport thresholds(const NetworkSpec& net, const NormWeights& w, double beta,
                                                CriteriaMode mode = CriteriaMode::Theorem1) {
    check_criteria_inputs(net, w, beta, mode);
    ThresholdReport r;
    r.mode = mode;
    r.beta = beta;
    for (std::size_t j = 0; j < net.n; ++j) {
        const NeuronTerms t = neuron_terms(net, w, beta, mode, j);
        r.mu_bar_min.push_back(t.bar.mu_min());
        r.mu_tilde_min.push_back(t.tilde.mu_min());
        r.rho_bar_offset.push_back(t.bar.rho_offset(beta));
        r.rho_tilde_offset.push_back(t.tilde.rho_offset(beta));
        r.eta_bar_min.push_back(t.bar.eta_min);
        r.eta_tilde_min.push_back(t.tilde.eta_min);
    }
    return r;
}

struct Margin {
    std::string name;  ///< e.g. "mu_bar"
    std::size_t neuron = 0;
    double threshold = 0.0;
    double value = 0.0;
    bool strict = true;
    bool ok = false;

    [[nodiscard]] double margin() const { return value - threshold; }
};

struct GainVerdict {
    bool admissible = false;
    std::vector<Margin> margins;
};

/// Strict inequalities must clear this margin so float equality never counts.
inline constexpr double kStrictMargin = 1e-9;
/// Relative round-off allowance for the non-strict eta comparison.
inline constexpr double kEtaRelTol = 1e-12;

[[nodiscard]] inline GainVerdict verify_gains(const ThresholdReport& report, const ControllerGains& g) {
    const std::size_t n = report.size();
    if (g.size() != n) throw std::invalid_argument("verify_gains: gain/network size mismatch");
    if (std::fabs(g.beta - report.beta) > 0.0) throw std::invalid_argument("verify_gains: beta mismatch");
    GainVerdict v;
    v.admissible = true;
    auto add = [&v](std::string name, std::size_t j, double thr, double val, bool strict) {
        Margin m{std::move(name), j, thr, val, strict, false};
        m.ok = strict ? (val - thr > kStrictMargin) : (val - thr >= -kEtaRelTol * std::max(1.0, std::fabs(thr)));
        v.admissible = v.admissible && m.ok;
        v.margins.push_back(std::move(m));
    };
    for (std::size_t j = 0; j < n; ++j) {
        add("mu_bar", j, report.mu_bar_min[j], g.mu_bar[j], true);
        add("mu_tilde", j, report.mu_tilde_min[j], g.mu_tilde[j], true);
        add("rho_bar", j, report.rho_bar_min(j, g.mu_bar[j]), g.rho_bar[j], true);
        add("rho_tilde", j, report.rho_tilde_min(j, g.mu_tilde[j]), g.rho_tilde[j], true);
        add("eta_bar", j, report.eta_bar_min[j], g.eta_bar[j], false);
        add("eta_tilde", j, report.eta_tilde_min[j], g.eta_tilde[j], false);
    }
    return v;
}

// ---------------------------------------------------------------------------
// Decay constants
// ---------------------------------------------------------------------------

/// Largest left side of the decay inequalities over all neurons and both families.
[[nodiscard]] inline double epsilon_worst_lhs(const NetworkSpec& net, const NormWeights& w, const ControllerGains& g,
                                              double epsilon, CriteriaMode mode = CriteriaMode::Theorem1) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < net.n; ++j) {
        const NeuronTerms t = neuron_terms(net, w, g.beta, mode, j);
        worst = std::max({worst, t.bar.epsilon_lhs(epsilon, net.tau, g.mu_bar[j]),
                          t.tilde.epsilon_lhs(epsilon, net.tau, g.mu_tilde[j])});
    }
    return worst;
}

[[nodiscard]] inline bool epsilon_feasible(const NetworkSpec& net, const NormWeights& w, const ControllerGains& g,
                                           double epsilon, CriteriaMode mode = CriteriaMode::Theorem1) {
    return epsilon > 0.0 && epsilon_worst_lhs(net, w, g, epsilon, mode) < 0.0;
}

inline constexpr double kSafetyFactor = 0.999;

/**
 * Supremum of feasible epsilon by bisection (relative precision 1e-10),
 * scaled by kSafetyFactor. Throws InfeasibleError when no epsilon > 1e-12 works.
 */
[[nodiscard]] inline double find_epsilon(const NetworkSpec& net, const NormWeights& w, const ControllerGains& g,
                                         CriteriaMode mode = CriteriaMode::Theorem1) {
    check_criteria_inputs(net, w, g.beta, mode);
    auto ok = [&](double eps) { return epsilon_feasible(net, w, g, eps, mode); };
    constexpr double kTiny = 1e-12;
    if (!ok(kTiny)) throw InfeasibleError("no epsilon > 1e-12 satisfies the decay inequalities");
    double lo = kTiny;
    double hi = 1.0;
    while (ok(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) throw InfeasibleError("epsilon search did not terminate (unbounded feasible set)");
    }
    while (hi - lo > 1e-10 * hi) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return kSafetyFactor * lo;
}

struct RhoBounds {
    std::vector<double> per_neuron_bar;    ///< xi_j^{-1} (rho_bar_j - rho_bar_min_j)
    std::vector<double> per_neuron_tilde;  ///< phi_j^{-1} (rho_tilde_j - rho_tilde_min_j)
    double ast_bound = 0.0;                ///< min over per_neuron_bar (strict upper bound)
    double star_bound = 0.0;               ///< min over per_neuron_tilde
};

[[nodiscard]] inline RhoBounds rho_bounds(const NetworkSpec& net, const NormWeights& w, const ControllerGains& g,
                                          CriteriaMode mode = CriteriaMode::Theorem1) {
    check_criteria_inputs(net, w, g.beta, mode);
    const ThresholdReport r = thresholds(net, w, g.beta, mode);
    RhoBounds out;
    out.ast_bound = out.star_bound = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < net.n; ++j) {
        const double bar = (g.rho_bar[j] - r.rho_bar_min(j, g.mu_bar[j])) / w.xi[j];
        const double tilde = (g.rho_tilde[j] - r.rho_tilde_min(j, g.mu_tilde[j])) / w.phi[j];
        out.per_neuron_bar.push_back(bar);
        out.per_neuron_tilde.push_back(tilde);
        out.ast_bound = std::min(out.ast_bound, bar);
        out.star_bound = std::min(out.star_bound, tilde);
    }
    return out;
}

/// True when 0 < rho strictly below both families' bounds (with kStrictMargin).
[[nodiscard]] inline bool rho_feasible(const RhoBounds& b, double rho) {
    return rho > 0.0 && b.ast_bound - rho > kStrictMargin && b.star_bound - rho > kStrictMargin;
}

struct RhoChoice {
    double rho_ast = 0.0;
    double rho_star = 0.0;
    double rho = 0.0;
};

[[nodiscard]] inline RhoChoice find_rho(const NetworkSpec& net, const NormWeights& w, const ControllerGains& g,
                                        CriteriaMode mode = CriteriaMode::Theorem1) {
    const RhoBounds b = rho_bounds(net, w, g, mode);
    for (std::size_t j = 0; j < net.n; ++j) {
        if (!(b.per_neuron_bar[j] > 0.0))
            throw InfeasibleError("rho_bar[" + std::to_string(j) + "] does not exceed its threshold");
        if (!(b.per_neuron_tilde[j] > 0.0))
            throw InfeasibleError("rho_tilde[" + std::to_string(j) + "] does not exceed its threshold");
    }
    RhoChoice c;
    c.rho_ast = kSafetyFactor * b.ast_bound;
    c.rho_star = kSafetyFactor * b.star_bound;
    c.rho = std::min(c.rho_ast, c.rho_star);
    return c;
}

// ---------------------------------------------------------------------------
// Certificate
// ---------------------------------------------------------------------------

struct ConvergenceCertificate {
    NormWeights weights;
    double epsilon = 0.0;
    double rho_ast = 0.0;
    double rho_star = 0.0;
    double rho = 0.0;
    double m_e1_0 = 0.0;
    double t1_r = 0.0;
    double t1_i = 0.0;
    double t1 = 0.0;
    double t2 = 0.0;
};

/// Initial error of the constant histories, e = Phi + Psi.
[[nodiscard]] inline SplitVector initial_error(const NetworkSpec& net) {
    SplitVector e(net.n);
    for (std::size_t j = 0; j < net.n; ++j) e[j] = net.phi_init[j] + net.psi_init[j];
    return e;
}

/// sup_{-tau <= s <= 0} e^{eps s} ||E1(s)|| for constant histories, by sampling.
[[nodiscard]] inline double initial_monitor_sampled(const NetworkSpec& net, const NormWeights& w, double epsilon,
                                                    int samples = 1000) {
    const double norm0 = weighted_inf_norm(initial_error(net), w);
    double m = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double s = samples > 1 ? -net.tau + net.tau * i / (samples - 1) : 0.0;
        m = std::max(m, std::exp(epsilon * s) * norm0);
    }
    return m;
}

/**
 * Guaranteed convergence times for the given decay constants. The supplied
 * rho is used as both rho_ast and rho_star when only one value is known.
 */
[[nodiscard]] inline ConvergenceCertificate certificate(const NetworkSpec& net, const NormWeights& w, double beta,
                                                        double epsilon, const RhoChoice& rho) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("certificate: epsilon must be > 0");
    if (!(rho.rho > 0.0)) throw std::invalid_argument("certificate: rho must be > 0");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("certificate: beta must lie in (0, 1)");
    validate(w, net.n);

    ConvergenceCertificate c;
    c.weights = w;
    c.epsilon = epsilon;
    c.rho_ast = rho.rho_ast;
    c.rho_star = rho.rho_star;
    c.rho = rho.rho;

    const SplitVector e0 = initial_error(net);
    // e^{eps s} peaks at s = 0 for a constant history.
    c.m_e1_0 = weighted_inf_norm(e0, w);
    const double sampled = initial_monitor_sampled(net, w, epsilon);
    if (std::fabs(sampled - c.m_e1_0) > 1e-12 * std::max(1.0, c.m_e1_0))
        throw std::logic_error("certificate: closed-form and sampled initial monitor disagree");

    if (max_abs_component(e0) > 1.0) {
        const double xi_max = *std::max_element(w.xi.begin(), w.xi.end());
        const double phi_max = *std::max_element(w.phi.begin(), w.phi.end());
        c.t1_r = std::max(0.0, std::log(xi_max * c.m_e1_0) / epsilon + net.tau);
        c.t1_i = std::max(0.0, std::log(phi_max * c.m_e1_0) / epsilon + net.tau);
    }
    c.t1 = std::max(c.t1_r, c.t1_i);
    c.t2 = 1.0 / (w.min_all() * c.rho * (1.0 - beta)) + c.t1;
    return c;
}

[[nodiscard]] inline ConvergenceCertificate certificate(const NetworkSpec& net, const NormWeights& w, double beta,
                                                        double epsilon, double rho) {
    return certificate(net, w, beta, epsilon, RhoChoice{rho, rho, rho});
}

/// Searches epsilon and rho, then builds the certificate. Gains must be admissible.
[[nodiscard]] inline ConvergenceCertificate certify(const NetworkSpec& net, const NormWeights& w,
                                                    const ControllerGains& g,
                                                    CriteriaMode mode = CriteriaMode::Theorem1) {
    const double eps = find_epsilon(net, w, g, mode);
    const RhoChoice rho = find_rho(net, w, g, mode);
    return certificate(net, w, g.beta, eps, rho);
}

// ---------------------------------------------------------------------------
// Weight search (convenience only; carries no guarantee)
// ---------------------------------------------------------------------------

/// Smallest strict-inequality slack of the mu conditions, normalized by the gain.
[[nodiscard]] inline double mu_slack(const NetworkSpec& net, const NormWeights& w, const ControllerGains& g,
                                     CriteriaMode mode) {
    const ThresholdReport r = thresholds(net, w, g.beta, mode);
    double s = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < net.n; ++j) {
        s = std::min(s, g.mu_bar[j] - r.mu_bar_min[j]);
        s = std::min(s, g.mu_tilde[j] - r.mu_tilde_min[j]);
    }
    return s;
}

/**
 * Multiplicative coordinate descent on (xi, phi) that maximizes the smallest
 * mu slack. Starts from `start` and returns the best weights visited.
 */
[[nodiscard]] inline NormWeights search_weights(const NetworkSpec& net, const ControllerGains& g, NormWeights start,
                                                CriteriaMode mode = CriteriaMode::Theorem1, int sweeps = 50) {
    validate(start, net.n);
    double best = mu_slack(net, start, g, mode);
    double factor = 1.5;
    for (int sweep = 0; sweep < sweeps && factor > 1.0 + 1e-6; ++sweep) {
        bool improved = false;
        for (std::size_t c = 0; c < 2 * net.n; ++c) {
            double& slot = c < net.n ? start.xi[c] : start.phi[c - net.n];
            for (double f : {factor, 1.0 / factor}) {
                const double old = slot;
                slot = old * f;
                const double s = mu_slack(net, start, g, mode);
                if (s > best) {
                    best = s;
                    improved = true;
                } else {
                    slot = old;
                }
            }
        }
        if (!improved) factor = std::sqrt(factor);
    }
    return start;
}

}  // namespace cvnn
