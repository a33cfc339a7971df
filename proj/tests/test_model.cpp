#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <complex>
#include <random>

namespace {

using cvnn::ActivationKind;
using cvnn::SplitComplex;
using cvnn::SplitMatrix;
using cvnn::SplitVector;
using cd = std::complex<double>;

// Textbook forms, written independently of the library.
double logistic_pair(double u) { return (1.0 - std::exp(-u)) / (1.0 + std::exp(-u)); }
double saturating(double u) { return (std::fabs(u + 1.0) - std::fabs(u - 1.0)) / 2.0; }

cd reference_activation(const cvnn::ActivationSpec& s, cd z) {
    const double ur = s.mix.p_re * z.real() + s.mix.q_re * z.imag();
    const double ui = s.mix.p_im * z.real() + s.mix.q_im * z.imag();
    if (s.kind == ActivationKind::SigmoidPair) return {logistic_pair(ur), logistic_pair(ui)};
    return {saturating(ur), saturating(ui)};
}

cd to_std(const SplitComplex& z) { return {z.re, z.im}; }

TEST(Activation, SigmoidPairMatchesTextbookForm) {
    const auto f = cvnn::make_activation(ActivationKind::SigmoidPair, {1.0, 2.0, 2.0, 1.0});
    for (double xr = -5.0; xr <= 5.0; xr += 0.37) {
        for (double xi = -5.0; xi <= 5.0; xi += 0.41) {
            const SplitComplex v = cvnn::eval_activation(f, {xr, xi});
            const cd r = reference_activation(f, {xr, xi});
            EXPECT_NEAR(v.re, r.real(), 1e-14);
            EXPECT_NEAR(v.im, r.imag(), 1e-14);
        }
    }
}

TEST(Activation, OddnessOnRandomPoints) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    const auto f = cvnn::make_activation(ActivationKind::SigmoidPair, {1.0, 2.0, 2.0, 1.0});
    const auto g = cvnn::make_activation(ActivationKind::SaturatingLinear, {1.0, 1.0, 1.0, 1.0});
    for (int i = 0; i < 1000; ++i) {
        const SplitComplex z{u(rng), u(rng)};
        for (const auto& spec : {f, g}) {
            const SplitComplex p = cvnn::eval_activation(spec, z);
            const SplitComplex m = cvnn::eval_activation(spec, -z);
            EXPECT_NEAR(p.re + m.re, 0.0, 1e-12);
            EXPECT_NEAR(p.im + m.im, 0.0, 1e-12);
        }
    }
}

TEST(Activation, AnalyticBoundsOfTheExample) {
    const auto f = cvnn::make_activation(ActivationKind::SigmoidPair, {1.0, 2.0, 2.0, 1.0});
    const auto g = cvnn::make_activation(ActivationKind::SaturatingLinear, {1.0, 1.0, 1.0, 1.0});
    const cvnn::Mat2 lam_bar{{{0.5, 1.0}, {1.0, 0.5}}};
    const cvnn::Mat2 lam_tilde{{{1.0, 0.5}, {0.5, 1.0}}};
    const cvnn::Mat2 ones{{{1.0, 1.0}, {1.0, 1.0}}};
    EXPECT_EQ(f.bound, lam_bar);
    EXPECT_EQ(f.bound_tilde(), lam_tilde);
    EXPECT_EQ(g.bound, ones);
    EXPECT_EQ(g.bound_tilde(), ones);
}

TEST(Activation, FiniteDifferenceBoundsStayBelowAnalytic) {
    const std::vector<cvnn::ActivationSpec> specs{
        cvnn::make_activation(ActivationKind::SigmoidPair, {1.0, 2.0, 2.0, 1.0}),
        cvnn::make_activation(ActivationKind::SigmoidPair, {0.3, 1.7, 0.9, 0.2}),
        cvnn::make_activation(ActivationKind::SaturatingLinear, {1.0, 1.0, 1.0, 1.0}),
        cvnn::make_activation(ActivationKind::SaturatingLinear, {-0.5, 2.0, 1.5, -1.0}),
    };
    for (const auto& s : specs) {
        const cvnn::Mat2 est = cvnn::estimate_bounds(s, 5.0, 201).bar;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) EXPECT_LE(est[r][c], s.bound[r][c] + 1e-6) << r << "," << c;
    }
    // The sigmoid bound is attained at the origin.
    const cvnn::Mat2 est = cvnn::estimate_bounds(specs[0], 5.0, 201).bar;
    EXPECT_NEAR(est[0][1], 1.0, 1e-6);
}

TEST(Activation, SigmoidPartialsAreNonnegative) {
    const auto f = cvnn::make_activation(ActivationKind::SigmoidPair, {1.0, 2.0, 2.0, 1.0});
    EXPECT_TRUE(f.monotone());
    const cvnn::Mat2 mins = cvnn::estimate_partials(f, 5.0, 101).min;
    for (const auto& row : mins)
        for (double v : row) EXPECT_GE(v, 0.0);
    const auto g = cvnn::make_activation(ActivationKind::SaturatingLinear, {-1.0, 1.0, 1.0, 1.0});
    EXPECT_FALSE(g.monotone());
}

TEST(Delay, CatalogValues) {
    using cvnn::DelayKind;
    const cvnn::DelaySpec c{DelayKind::Constant, 0.3, 0.3};
    const cvnn::DelaySpec l0{DelayKind::LogisticShifted, 0.0, 1.0};
    const cvnn::DelaySpec l5{DelayKind::LogisticShifted, 0.5, 1.0};
    const cvnn::DelaySpec cs{DelayKind::ReciprocalAbsCos, 10.0, 1.0};
    const cvnn::DelaySpec sn{DelayKind::ReciprocalAbsSin, 10.0, 1.0};
    EXPECT_EQ(cvnn::eval_delay(c, 12.0), 0.3);
    for (double t : {0.0, 0.1, 1.0, 3.7, 25.0}) {
        EXPECT_NEAR(cvnn::eval_delay(l0, t), std::exp(t) / (1.0 + std::exp(t)), 1e-14);
        EXPECT_NEAR(cvnn::eval_delay(l5, t), (std::exp(t) - 0.5) / (1.0 + std::exp(t)), 1e-14);
        EXPECT_NEAR(cvnn::eval_delay(cs, t), 1.0 / (1.0 + std::fabs(std::cos(10.0 * t))), 1e-14);
        EXPECT_NEAR(cvnn::eval_delay(sn, t), 1.0 / (1.0 + std::fabs(std::sin(10.0 * t))), 1e-14);
    }
    // Large t cannot overflow.
    EXPECT_DOUBLE_EQ(cvnn::eval_delay(l5, 1e4), 1.0);
}

TEST(Delay, ExampleDelaysStayWithinTheirBound) {
    const auto net = fixtures::example_network();
    EXPECT_NO_THROW(cvnn::validate_delays(net, 60.0, 100000));
    const cvnn::DelaySpec bad{cvnn::DelayKind::ReciprocalAbsCos, 10.0, 0.9};
    EXPECT_GT(cvnn::delay_bound_violation(bad, 10.0), 0.0);
}

TEST(Network, ValidateNamesTheField) {
    auto net = fixtures::example_network();
    EXPECT_NO_THROW(cvnn::validate(net));
    net.d[1] = 0.0;
    try {
        cvnn::validate(net);
        FAIL() << "expected ModelError";
    } catch (const cvnn::ModelError& e) {
        EXPECT_EQ(e.field(), "d[1]");
    }
    net = fixtures::example_network();
    net.f[0].bound[0][1] = 0.5;  // below the analytic bound 1
    EXPECT_THROW(cvnn::validate(net), cvnn::ModelError);
    net = fixtures::example_network();
    net.tau = 0.5;
    EXPECT_THROW(cvnn::validate(net), cvnn::ModelError);
}

// Direct complex-arithmetic right-hand side.
std::vector<cd> reference_rhs(const cvnn::NetworkSpec& net, const SplitVector& x, const SplitMatrix& delayed) {
    std::vector<cd> out(net.n);
    for (std::size_t j = 0; j < net.n; ++j) {
        cd acc = -net.d[j] * to_std(x[j]) + to_std(net.h[j]);
        for (std::size_t k = 0; k < net.n; ++k) {
            acc += to_std(net.a[j][k]) * reference_activation(net.f[k], to_std(x[k]));
            acc += to_std(net.b[j][k]) * reference_activation(net.g[k], to_std(delayed[j][k]));
        }
        out[j] = acc;
    }
    return out;
}

TEST(Network, DecomposedRightHandSideMatchesComplexForm) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int c = 0; c < 1000; ++c) {
        const std::size_t n = 1 + c % 4;
        const auto net = fixtures::random_network(rng, n);
        SplitVector x(n);
        SplitMatrix xd = cvnn::zeros(n, n);
        for (auto& z : x) z = {u(rng), u(rng)};
        for (auto& row : xd)
            for (auto& z : row) z = {u(rng), u(rng)};
        const SplitVector got = cvnn::master_rhs(net, x, xd);
        const auto ref = reference_rhs(net, x, xd);
        for (std::size_t j = 0; j < n; ++j) {
            EXPECT_NEAR(got[j].re, ref[j].real(), 1e-12 * std::max(1.0, std::abs(ref[j])));
            EXPECT_NEAR(got[j].im, ref[j].imag(), 1e-12 * std::max(1.0, std::abs(ref[j])));
        }
    }
}

TEST(Network, ErrorRightHandSideIsSumOfMasterAndSlave) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const auto net = fixtures::example_network();
    for (int c = 0; c < 200; ++c) {
        SplitVector x(2), y(2), uu(2);
        SplitMatrix xd = cvnn::zeros(2, 2), yd = cvnn::zeros(2, 2);
        for (std::size_t j = 0; j < 2; ++j) {
            x[j] = {u(rng), u(rng)};
            y[j] = {u(rng), u(rng)};
            uu[j] = {u(rng), u(rng)};
            for (std::size_t k = 0; k < 2; ++k) {
                xd[j][k] = {u(rng), u(rng)};
                yd[j][k] = {u(rng), u(rng)};
            }
        }
        const auto m = cvnn::master_rhs(net, x, xd);
        const auto s = cvnn::slave_rhs(net, y, yd, uu);
        const auto e = cvnn::error_rhs(net, x, y, xd, yd, uu);
        for (std::size_t j = 0; j < 2; ++j) {
            EXPECT_NEAR(e[j].re, m[j].re + s[j].re, 1e-12);
            EXPECT_NEAR(e[j].im, m[j].im + s[j].im, 1e-12);
        }
    }
}

TEST(Network, LinearSingleNeuronWithoutCoupling) {
    cvnn::NetworkSpec net;
    net.n = 1;
    net.d = {2.0};
    net.a = {{{0.0, 0.0}}};
    net.b = {{{0.0, 0.0}}};
    net.h = {{0.5, -0.25}};
    net.f = {cvnn::make_activation(ActivationKind::SigmoidPair, {1.0, 0.0, 0.0, 1.0})};
    net.g = {cvnn::make_activation(ActivationKind::SaturatingLinear, {1.0, 0.0, 0.0, 1.0})};
    net.delays = {{{cvnn::DelayKind::Constant, 0.5, 0.5}}};
    net.tau = 0.5;
    net.phi_init = {{1.0, 1.0}};
    net.psi_init = {{0.0, 0.0}};
    const auto r = cvnn::master_rhs(net, {{1.0, -3.0}}, {{{7.0, 7.0}}});
    EXPECT_DOUBLE_EQ(r[0].re, -2.0 + 0.5);
    EXPECT_DOUBLE_EQ(r[0].im, 6.0 - 0.25);
}

}  // namespace
