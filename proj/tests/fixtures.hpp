// Shared test fixtures: the two-neuron example network built directly in C++,
// independent of the scenario parser.
#pragma once

#include <cvnn_async/cvnn_async.hpp>

#include <random>
#include <string>

namespace fixtures {

inline std::string scenario_path(const std::string& name) {
    return std::string(CVNN_SCENARIO_DIR) + "/" + name + ".json";
}

inline cvnn::NetworkSpec example_network() {
    using cvnn::ActivationKind;
    using cvnn::DelayKind;
    cvnn::NetworkSpec net;
    net.n = 2;
    net.d = {0.5, 1.0};
    net.a = {{{1.2, 0.2}, {0.8, 1.2}}, {{1.0, 1.5}, {0.4, 0.2}}};
    net.b = {{{0.2, 1.2}, {0.2, 0.8}}, {{1.5, 1.0}, {0.2, 0.4}}};
    net.h = {{0.1, 0.1}, {0.2, 0.2}};
    const auto f = cvnn::make_activation(ActivationKind::SigmoidPair, {1.0, 2.0, 2.0, 1.0});
    const auto g = cvnn::make_activation(ActivationKind::SaturatingLinear, {1.0, 1.0, 1.0, 1.0});
    net.f = {f, f};
    net.g = {g, g};
    net.delays = {{{DelayKind::LogisticShifted, 0.0, 1.0}, {DelayKind::LogisticShifted, 0.5, 1.0}},
                  {{DelayKind::ReciprocalAbsCos, 10.0, 1.0}, {DelayKind::ReciprocalAbsSin, 10.0, 1.0}}};
    net.tau = 1.0;
    net.phi_init = {{-1.0, -2.0}, {1.5, -1.5}};
    net.psi_init = {{5.0, 5.4}, {-5.4, -3.5}};
    return net;
}

inline cvnn::NormWeights example_weights() { return {{0.4, 0.8}, {0.5, 0.6}}; }

inline cvnn::ControllerGains example_gains() {
    cvnn::ControllerGains g;
    g.mu_bar = {18.0, 10.0};
    g.mu_tilde = {15.0, 12.0};
    g.rho_bar = {0.2, 0.4};
    g.rho_tilde = {0.2, 0.4};
    g.eta_bar = {5.0, 6.6};
    g.eta_tilde = {5.0, 6.6};
    g.beta = 0.5;
    return g;
}

inline cvnn::ControllerGains weak_gains() {
    cvnn::ControllerGains g = example_gains();
    g.mu_bar = {0.18, 0.1};
    g.mu_tilde = {0.15, 0.12};
    g.rho_bar = {0.02, 0.04};
    g.rho_tilde = {0.02, 0.04};
    return g;
}

/// Random network with monotone sigmoid activations, saturating delayed
/// activations and constant delays.
inline cvnn::NetworkSpec random_network(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_real_distribution<double> pos(0.1, 2.0);
    std::uniform_real_distribution<double> delay(0.0, 1.0);
    cvnn::NetworkSpec net;
    net.n = n;
    net.tau = 1.0;
    net.a = cvnn::zeros(n, n);
    net.b = cvnn::zeros(n, n);
    net.delays.assign(n, std::vector<cvnn::DelaySpec>(n));
    for (std::size_t j = 0; j < n; ++j) {
        net.d.push_back(pos(rng));
        net.h.push_back({coef(rng), coef(rng)});
        net.f.push_back(cvnn::make_activation(cvnn::ActivationKind::SigmoidPair, {pos(rng), pos(rng), pos(rng), pos(rng)}));
        net.g.push_back(
            cvnn::make_activation(cvnn::ActivationKind::SaturatingLinear, {coef(rng), coef(rng), coef(rng), coef(rng)}));
        net.phi_init.push_back({coef(rng), coef(rng)});
        net.psi_init.push_back({coef(rng), coef(rng)});
        for (std::size_t k = 0; k < n; ++k) {
            net.a[j][k] = {coef(rng), coef(rng)};
            net.b[j][k] = {coef(rng), coef(rng)};
            net.delays[j][k] = {cvnn::DelayKind::Constant, delay(rng), 1.0};
        }
    }
    return net;
}

}  // namespace fixtures
