/**
 * @file controller.hpp
 * @brief Finite-time anti-synchronization control law acting on the error.
 *
 *     u_j^R = -sign(e_j^R) [mu_bar_j |e_j^R| + rho_bar_j |e_j^R|^beta + eta_bar_j]
 *     u_j^I = -sign(e_j^I) [mu_tilde_j |e_j^I| + rho_tilde_j |e_j^I|^beta + eta_tilde_j]
 *
 * sign(0) is 0, so the anti-synchronized manifold e = 0 is an equilibrium.
 */
#pragma once

#include "split_complex.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvnn {

struct ControllerGains {
    std::vector<double> mu_bar, rho_bar, eta_bar;
    std::vector<double> mu_tilde, rho_tilde, eta_tilde;
    double beta = 0.5;
    /// Half-width of an optional dead zone around e = 0 (0 disables it).
    double dead_zone = 0.0;

    [[nodiscard]] std::size_t size() const { return mu_bar.size(); }

    friend bool operator==(const ControllerGains&, const ControllerGains&) = default;
};

inline void validate(const ControllerGains& g, std::size_t n) {
    if (!(g.beta > 0.0 && g.beta < 1.0)) throw std::invalid_argument("controller: beta must lie in (0, 1)");
    if (!(g.dead_zone >= 0.0)) throw std::invalid_argument("controller: dead_zone must be >= 0");
    const std::vector<const std::vector<double>*> all{&g.mu_bar,   &g.rho_bar,   &g.eta_bar,
                                                      &g.mu_tilde, &g.rho_tilde, &g.eta_tilde};
    for (const auto* v : all) {
        if (v->size() != n)
            throw std::invalid_argument("controller: gain vectors must have " + std::to_string(n) + " entries");
        for (double x : *v)
            if (!(x >= 0.0)) throw std::invalid_argument("controller: gains must be nonnegative");
    }
}

[[nodiscard]] constexpr double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

namespace detail {

inline double control_component(double e, double mu, double rho, double eta, double beta, double dead_zone) {
    if (e == 0.0 || std::fabs(e) < dead_zone) return 0.0;
    const double mag = std::fabs(e);
    return -sign0(e) * (mu * mag + rho * std::pow(mag, beta) + eta);
}

}  // namespace detail

[[nodiscard]] inline SplitVector control(const ControllerGains& g, const SplitVector& e) {
    SplitVector u(e.size());
    for (std::size_t j = 0; j < e.size(); ++j) {
        u[j].re = detail::control_component(e[j].re, g.mu_bar[j], g.rho_bar[j], g.eta_bar[j], g.beta, g.dead_zone);
        u[j].im = detail::control_component(e[j].im, g.mu_tilde[j], g.rho_tilde[j], g.eta_tilde[j], g.beta,
                                            g.dead_zone);
    }
    return u;
}

}  // namespace cvnn
