// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
// Exit status is non-zero when any criterion fails.

#include "fixtures.hpp"
#include "threshold_oracle.hpp"

#include <chrono>
#include <complex>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

namespace {

// Pinned tolerances.
constexpr double kEtaTol = 1e-12;
constexpr double kCertTol = 1e-3;
constexpr double kOracleTol = 1e-10;
constexpr double kSettleTol = 1e-2;
constexpr double kPhaseOneSlack = 1e-3;
constexpr double kMonotoneRelSlack = 1e-4;
constexpr double kUncontrolledFloor = 0.1;
constexpr double kProductTol = 1e-12;
constexpr double kOddTol = 1e-12;
constexpr double kLipschitzSlack = 1e-6;
constexpr double kRhsTol = 1e-12;
constexpr double kAntiSymTol = 1e-8;
constexpr double kSettleChange = 0.05;
constexpr int kRandomCases = 1000;

// Published values of the worked example.
constexpr double kT1 = 9.318;
constexpr double kT2 = 21.818;

class Report {
public:
    void check(const std::string& id, bool ok, const std::string& what) {
        std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", id.c_str(), what.c_str());
        std::fflush(stdout);
        if (!ok) ++failures_;
    }
    [[nodiscard]] int failures() const { return failures_; }

private:
    int failures_ = 0;
};

std::string fmt(const char* f, double a) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}
std::string fmt(const char* f, double a, double b) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}
std::string fmt(const char* f, double a, double b, double c) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

cvnn::Scenario load(const char* name) { return cvnn::parse_config(fixtures::scenario_path(name)); }

// ---------------------------------------------------------------------------

void criterion_1(Report& r) {
    const auto s = load("paper_s4_controlled");
    const auto t = cvnn::thresholds(s.network, s.weights, s.beta);
    const std::vector<double> want{5.0, 6.6};
    double worst = 0.0;
    for (std::size_t j = 0; j < 2; ++j)
        worst = std::max({worst, std::fabs(t.eta_bar_min[j] - want[j]), std::fabs(t.eta_tilde_min[j] - want[j])});
    r.check("criterion 1", worst <= kEtaTol,
            fmt("eta_bar = (%.15g, %.15g)", t.eta_bar_min[0], t.eta_bar_min[1]) +
                fmt(", eta_tilde = (%.15g, %.15g)", t.eta_tilde_min[0], t.eta_tilde_min[1]) +
                fmt(", max deviation %.3g", worst));
}

void criterion_2(Report& r) {
    const auto res = cvnn::run_bounds(load("paper_s4_controlled"), 0.25, 0.4);
    const auto& c = *res.certificate;
    const bool ok = std::fabs(c.m_e1_0 - 10.0) <= 1e-12 && std::fabs(c.t1 - kT1) <= kCertTol &&
                    std::fabs(c.t2 - kT2) <= kCertTol;
    r.check("criterion 2", ok, fmt("M(E1(0)) = %.12g, T1 = %.6f, T2 = %.6f", c.m_e1_0, c.t1, c.t2));
}

void criterion_3(Report& r) {
    const auto s = load("paper_s4_controlled");
    const auto& g = *s.gains;
    const oracle::Oracle o{s.network, s.weights, s.beta};
    double worst = -INFINITY;
    for (std::size_t j = 0; j < 2; ++j)
        worst = std::max({worst, o.eps_bar(j, 0.25, g.mu_bar[j]), o.eps_tilde(j, 0.25, g.mu_tilde[j])});
    const bool eps_ok = cvnn::epsilon_feasible(s.network, s.weights, g, 0.25) && worst < 0.0;
    r.check("criterion 3a", eps_ok, fmt("epsilon = 0.25 decay inequalities, largest left side %.6f (< 0)", worst));

    const auto b = cvnn::rho_bounds(s.network, s.weights, g);
    const bool rho_ok = cvnn::rho_feasible(b, 0.4);
    r.check("criterion 3b", rho_ok,
            fmt("rho = 0.4 strictly below both bounds: rho_ast bound %.15g, rho_star bound %.15g", b.ast_bound,
                b.star_bound) +
                (rho_ok ? std::string{} : " (0.4 equals the rho_star bound at neuron 1; the inequality is strict)"));

    const double sup = cvnn::find_epsilon(s.network, s.weights, g) / cvnn::kSafetyFactor;
    r.check("criterion 3c", sup >= 0.25, fmt("bisection supremum of epsilon = %.10f (>= 0.25)", sup));
    r.check("criterion 3", eps_ok && rho_ok && sup >= 0.25, "all feasibility sub-checks");
}

void criterion_4(Report& r) {
    const auto s = load("paper_s4_controlled");
    const auto res = cvnn::run_verify(s);
    const bool admissible = res.verdict && res.verdict->admissible;

    const oracle::Oracle o{s.network, s.weights, s.beta};
    const auto& t = res.thresholds;
    double dev = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
        dev = std::max({dev, std::fabs(t.mu_bar_min[j] - o.mu_bar(j)), std::fabs(t.mu_tilde_min[j] - o.mu_tilde(j)),
                        std::fabs(t.rho_bar_offset[j] - o.rho_bar_offset(j)),
                        std::fabs(t.rho_tilde_offset[j] - o.rho_tilde_offset(j)),
                        std::fabs(t.eta_bar_min[j] - o.eta_bar(j)), std::fabs(t.eta_tilde_min[j] - o.eta_tilde(j))});
    }

    // The report must carry computed and published mu values with markers.
    int rows = 0, consistent = 0;
    for (const auto& row : res.report["reference_comparison"]) {
        const auto q = row["quantity"].get<std::string>();
        if (q != "mu_bar_min" && q != "mu_tilde_min") continue;
        ++rows;
        const bool match = std::fabs(row["computed"].get<double>() - row["reference"].get<double>()) <=
                           cvnn::kReferenceTolerance;
        if (row["marker"] == (match ? "match" : "MISMATCH")) ++consistent;
    }
    r.check("criterion 4", admissible && dev <= kOracleTol && rows == 4 && consistent == 4,
            std::string("gain set admissible: ") + (admissible ? "yes" : "no") +
                fmt(", oracle deviation %.3g", dev) +
                fmt(", mu_bar_min = (%.6f, %.6f)", t.mu_bar_min[0], t.mu_bar_min[1]) +
                fmt(", mu_tilde_min = (%.6f, %.6f)", t.mu_tilde_min[0], t.mu_tilde_min[1]) +
                ", published 14.675/7.531 and 11.9/10.008 recorded with " + std::to_string(rows) + " markers");
}

struct ControlledRun {
    cvnn::SimulateResult res;
    double seconds = 0.0;
};

ControlledRun controlled_run() {
    auto s = load("paper_s4_controlled");
    s.sim.dt = 1e-4;
    s.sim.t_end = 30.0;
    const auto t0 = std::chrono::steady_clock::now();
    ControlledRun run{cvnn::run_simulate(s), 0.0};
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

void criterion_5(Report& r, const ControlledRun& run) {
    const auto& tr = run.res.trajectory;
    double after = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i)
        if (tr.times[i] >= kT2) after = std::max(after, cvnn::max_abs_component(tr.e[i]));
    const bool settled = tr.settling_time && *tr.settling_time <= kT2;
    r.check("criterion 5", settled && after < kSettleTol,
            fmt("settling_time = %.4f, max |e| for t >= 21.818 is %.3g", tr.settling_time.value_or(NAN), after) +
                fmt(", runtime %.2f s", run.seconds));
}

void criterion_6(Report& r, const ControlledRun& run) {
    const auto& tr = run.res.trajectory;
    double after_t1 = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i)
        if (tr.times[i] >= kT1) after_t1 = std::max(after_t1, cvnn::max_abs_component(tr.e[i]));
    const bool bound_ok = after_t1 <= 1.0 + kPhaseOneSlack;

    std::size_t first_below = tr.size();
    for (std::size_t i = 0; i < tr.size(); ++i)
        if (tr.norm_e1[i] < 1.0) {
            first_below = i;
            break;
        }
    bool m_ok = tr.monitor_m.front().has_value() && first_below < tr.size();
    for (std::size_t i = 1; m_ok && i <= first_below; ++i)
        if (*tr.monitor_m[i] > *tr.monitor_m[i - 1] * (1.0 + kMonotoneRelSlack)) m_ok = false;

    bool v_ok = tr.settling_time.has_value();
    std::size_t v_checked = 0;
    for (std::size_t i = first_below + 1; v_ok && i < tr.size() && tr.times[i] <= *tr.settling_time; ++i) {
        if (!tr.monitor_v[i] || !tr.monitor_v[i - 1]) {
            v_ok = false;
            break;
        }
        ++v_checked;
        if (*tr.monitor_v[i] > *tr.monitor_v[i - 1] * (1.0 + kMonotoneRelSlack)) v_ok = false;
    }
    r.check("criterion 6", bound_ok && m_ok && v_ok,
            fmt("max |e| for t >= 9.318 is %.3g", after_t1) + ", monitor_m non-increasing until t = " +
                fmt("%.4f", first_below < tr.size() ? tr.times[first_below] : NAN) + ": " + (m_ok ? "yes" : "no") +
                ", monitor_v non-increasing until settling (" + std::to_string(v_checked) +
                " samples): " + (v_ok ? "yes" : "no"));
}

void criterion_7(Report& r) {
    const auto s = load("paper_s4_uncontrolled");
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = cvnn::run_simulate(s);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double final_norm = res.trajectory.norm_e1.back();
    r.check("criterion 7", s.sim.t_end == 50.0 && final_norm > kUncontrolledFloor,
            fmt("t_end = %.0f, final norm_e1 = %.6f (> 0.1), runtime %.2f s", s.sim.t_end, final_norm, secs));
}

void criterion_8(Report& r) {
    const auto s = load("paper_s4_weak_gains");
    const auto verdict = cvnn::run_verify(s);
    const bool rejected = verdict.verdict && !verdict.verdict->admissible;
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = cvnn::run_simulate(s);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto& tr = res.trajectory;
    const double final_err = cvnn::max_abs_component(tr.e.back());
    const bool settled = tr.settling_time.has_value() && final_err < kSettleTol && s.sim.t_end == 60.0;
    r.check("criterion 8", rejected && settled,
            std::string("verify_gains rejects: ") + (rejected ? "yes" : "no") +
                fmt(", settling_time = %.4f, final max |e| = %.3g, runtime %.2f s", tr.settling_time.value_or(NAN),
                    final_err, secs));
}

// ---------------------------------------------------------------------------
// Property suites
// ---------------------------------------------------------------------------

using cd = std::complex<double>;
cd to_std(const cvnn::SplitComplex& z) { return {z.re, z.im}; }

bool property_product(std::string& detail) {
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    double worst = 0.0;
    for (int i = 0; i < kRandomCases; ++i) {
        const cvnn::SplitComplex a{u(rng), u(rng)}, b{u(rng), u(rng)};
        const auto p = cvnn::product_split(a, b);
        const cd ref = to_std(a) * to_std(b);
        worst = std::max({worst, std::fabs(p.re - ref.real()), std::fabs(p.im - ref.imag())});
    }
    detail = fmt("split product vs complex: max error %.3g", worst);
    return worst <= kProductTol;
}

bool property_oddness(std::string& detail) {
    std::mt19937_64 rng(1002);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    std::uniform_real_distribution<double> mix(0.0, 3.0);
    double worst = 0.0;
    for (int i = 0; i < kRandomCases; ++i) {
        const cvnn::ActivationMix m{mix(rng), mix(rng), mix(rng), mix(rng)};
        for (auto kind : {cvnn::ActivationKind::SigmoidPair, cvnn::ActivationKind::SaturatingLinear}) {
            const auto spec = cvnn::make_activation(kind, m);
            const cvnn::SplitComplex z{u(rng), u(rng)};
            const auto p = cvnn::eval_activation(spec, z);
            const auto q = cvnn::eval_activation(spec, -z);
            worst = std::max({worst, std::fabs(p.re + q.re), std::fabs(p.im + q.im)});
        }
    }
    detail = fmt("activation oddness: max |f(x) + f(-x)| %.3g", worst);
    return worst <= kOddTol;
}

bool property_lipschitz(std::string& detail) {
    const std::vector<cvnn::ActivationSpec> specs{
        cvnn::make_activation(cvnn::ActivationKind::SigmoidPair, {1.0, 2.0, 2.0, 1.0}),
        cvnn::make_activation(cvnn::ActivationKind::SaturatingLinear, {1.0, 1.0, 1.0, 1.0}),
    };
    double worst = -INFINITY;
    for (const auto& s : specs) {
        const auto est = cvnn::estimate_bounds(s, 6.0, 241).bar;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) worst = std::max(worst, est[a][b] - s.bound[a][b]);
    }
    detail = fmt("finite-difference partials minus analytic bound (241x241 grid): max %.3g", worst);
    return worst <= kLipschitzSlack;
}

bool property_rhs(std::string& detail) {
    std::mt19937_64 rng(1004);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    double worst = 0.0;
    auto act = [](const cvnn::ActivationSpec& s, cd z) {
        const double ur = s.mix.p_re * z.real() + s.mix.q_re * z.imag();
        const double ui = s.mix.p_im * z.real() + s.mix.q_im * z.imag();
        if (s.kind == cvnn::ActivationKind::SigmoidPair)
            return cd{(1.0 - std::exp(-ur)) / (1.0 + std::exp(-ur)), (1.0 - std::exp(-ui)) / (1.0 + std::exp(-ui))};
        return cd{(std::fabs(ur + 1.0) - std::fabs(ur - 1.0)) / 2.0, (std::fabs(ui + 1.0) - std::fabs(ui - 1.0)) / 2.0};
    };
    for (int c = 0; c < kRandomCases; ++c) {
        const std::size_t n = 1 + c % 4;
        const auto net = fixtures::random_network(rng, n);
        cvnn::SplitVector x(n);
        cvnn::SplitMatrix xd = cvnn::zeros(n, n);
        for (auto& z : x) z = {u(rng), u(rng)};
        for (auto& row : xd)
            for (auto& z : row) z = {u(rng), u(rng)};
        const auto got = cvnn::master_rhs(net, x, xd);
        for (std::size_t j = 0; j < n; ++j) {
            cd ref = -net.d[j] * to_std(x[j]) + to_std(net.h[j]);
            for (std::size_t k = 0; k < n; ++k)
                ref += to_std(net.a[j][k]) * act(net.f[k], to_std(x[k])) +
                       to_std(net.b[j][k]) * act(net.g[k], to_std(xd[j][k]));
            worst = std::max({worst, std::fabs(got[j].re - ref.real()), std::fabs(got[j].im - ref.imag())});
        }
    }
    detail = fmt("decomposed vs complex right-hand side: max error %.3g", worst);
    return worst <= kRhsTol;
}

bool property_antisymmetry(std::string& detail) {
    auto net = fixtures::example_network();
    net.h = {{0.0, 0.0}, {0.0, 0.0}};
    for (std::size_t j = 0; j < 2; ++j) net.psi_init[j] = -net.phi_init[j];
    cvnn::SimConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_end = 10.0;
    double worst = 0.0;
    for (auto scheme : {cvnn::Scheme::Euler, cvnn::Scheme::Rk4Lagged}) {
        cfg.scheme = scheme;
        const auto tr = cvnn::simulate(net, std::nullopt, cfg);
        for (const auto& e : tr.e) worst = std::max(worst, cvnn::max_abs_component(e));
    }
    detail = fmt("anti-symmetric start, no input, [0, 10], both schemes: max |e| %.3g", worst);
    return worst < kAntiSymTol;
}

bool property_unit_weights(std::string& detail) {
    std::mt19937_64 rng(1006);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    int mismatches = 0;
    for (int c = 0; c < kRandomCases; ++c) {
        const std::size_t n = 1 + c % 6;
        cvnn::SplitVector v(n);
        double ref = 0.0;
        for (auto& z : v) {
            z = {u(rng), u(rng)};
            ref = std::max({ref, std::fabs(z.re), std::fabs(z.im)});
        }
        const cvnn::NormWeights ones{std::vector<double>(n, 1.0), std::vector<double>(n, 1.0)};
        if (cvnn::weighted_inf_norm(v, ones) != ref) ++mismatches;
    }
    detail = "unit weights give the plain infinity norm exactly: " + std::to_string(mismatches) + " mismatches";
    return mismatches == 0;
}

bool property_dt_halving(std::string& detail) {
    auto s = load("paper_s4_controlled");
    s.sim.dt = 1e-4;
    s.sim.t_end = 30.0;
    const auto coarse = cvnn::simulate(s.network, s.gains, s.sim);
    s.sim.dt = 5e-5;
    const auto fine = cvnn::simulate(s.network, s.gains, s.sim);
    if (!coarse.settling_time || !fine.settling_time) {
        detail = "dt halving: a run did not settle";
        return false;
    }
    const double rel = std::fabs(*fine.settling_time - *coarse.settling_time) / *coarse.settling_time;
    detail = fmt("dt halving: settling %.5f (dt 1e-4) vs %.5f (dt 5e-5), relative change %.3g",
                 *coarse.settling_time, *fine.settling_time, rel);
    return rel < kSettleChange;
}

void criterion_9(Report& r) {
    bool all = true;
    int idx = 0;
    auto sub = [&](bool ok, const std::string& detail) {
        r.check("criterion 9" + std::string(1, static_cast<char>('a' + idx++)), ok, detail);
        all = all && ok;
    };
    std::string d;
    bool ok = property_product(d);
    sub(ok, d);
    ok = property_oddness(d);
    sub(ok, d);
    ok = property_lipschitz(d);
    sub(ok, d);
    ok = property_rhs(d);
    sub(ok, d);
    ok = property_antisymmetry(d);
    sub(ok, d);
    ok = property_unit_weights(d);
    sub(ok, d);
    ok = property_dt_halving(d);
    sub(ok, d);
    r.check("criterion 9", all, "all property suites");
}

}  // namespace

int main() {
    Report r;
    try {
        criterion_1(r);
        criterion_2(r);
        criterion_3(r);
        criterion_4(r);
        const ControlledRun run = controlled_run();
        criterion_5(r, run);
        criterion_6(r, run);
        criterion_7(r);
        criterion_8(r);
        criterion_9(r);
    } catch (const std::exception& e) {
        std::printf("FAIL acceptance aborted: %s\n", e.what());
        return 2;
    }
    std::printf("%d criterion line(s) failed\n", r.failures());
    return r.failures() == 0 ? 0 : 1;
}
