// Command-line front end: verify / bounds / simulate / sweep.

#include <cvnn_async/cvnn_async.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

bool write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write '" << path << "'\n";
        return false;
    }
    out << text;
    return static_cast<bool>(out);
}

std::vector<double> parse_scales(const std::string& list) {
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size())
            throw cvnn::ConfigError(cvnn::ConfigErrorCode::InvalidValue, "--scales", "bad number '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw cvnn::ConfigError(cvnn::ConfigErrorCode::InvalidValue, "--scales", "empty list");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-time anti-synchronization of delayed complex-valued networks"};
    app.require_subcommand(1);

    std::string config;
    std::string out_path;
    std::string mode;

    auto* verify = app.add_subcommand("verify", "Check controller gains against the threshold criteria");
    verify->add_option("config", config, "Scenario file")->required();
    verify->add_option("--mode", mode, "theorem1 or lipschitz (overrides the scenario)")
        ->check(CLI::IsMember({"theorem1", "lipschitz"}));
    verify->add_option("--out", out_path, "Report file (default: stdout)");

    std::optional<double> epsilon, rho;
    auto* bounds = app.add_subcommand("bounds", "Convergence-time certificate for given or searched constants");
    bounds->add_option("config", config, "Scenario file")->required();
    bounds->add_option("--epsilon", epsilon, "Decay rate of the first phase (searched when omitted)");
    bounds->add_option("--rho", rho, "Decay rate of the second phase (searched when omitted)");
    bounds->add_option("--out", out_path, "Report file (default: stdout)");

    std::optional<double> dt, t_end;
    std::string scheme;
    auto* sim = app.add_subcommand("simulate", "Integrate master and slave networks, write a trajectory CSV");
    sim->add_option("config", config, "Scenario file")->required();
    sim->add_option("--out", out_path, "Trajectory CSV")->required();
    sim->add_option("--dt", dt, "Step size");
    sim->add_option("--t-end", t_end, "Final time");
    sim->add_option("--scheme", scheme, "euler or rk4")->check(CLI::IsMember({"euler", "rk4"}));

    std::string scales;
    auto* sweep = app.add_subcommand("sweep", "Scale mu/rho gains (eta at its minima) and simulate each point");
    sweep->add_option("config", config, "Scenario file")->required();
    sweep->add_option("--scales", scales, "Comma-separated scale factors")->required();
    sweep->add_option("--out", out_path, "Summary CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cvnn::kExitInputError;
    }

    try {
        cvnn::Scenario s = cvnn::parse_config(config);
        if (!mode.empty()) {
            s.mode = cvnn::criteria_mode_from(mode);
            cvnn::validate_scenario(s);
        }

        if (*verify) {
            const auto res = cvnn::run_verify(s);
            const std::string text = res.report.dump(2) + "\n";
            if (out_path.empty()) std::cout << text;
            else if (!write_text(out_path, text)) return cvnn::kExitInputError;
            std::cerr << "admissible: " << (res.report["admissible"].get<bool>() ? "yes" : "no") << '\n';
            return res.exit_code;
        }
        if (*bounds) {
            const auto res = cvnn::run_bounds(s, epsilon, rho);
            const std::string text = res.report.dump(2) + "\n";
            if (out_path.empty()) std::cout << text;
            else if (!write_text(out_path, text)) return cvnn::kExitInputError;
            return res.exit_code;
        }
        if (*sim) {
            if (dt) s.sim.dt = *dt;
            if (t_end) s.sim.t_end = *t_end;
            if (!scheme.empty()) s.sim.scheme = cvnn::scheme_from(scheme);
            cvnn::validate(s.sim, s.network.tau);
            cvnn::validate_scenario(s);
            cvnn::SimulateResult res;
            try {
                res = cvnn::run_simulate(s);
            } catch (const cvnn::DivergenceError& e) {
                std::cerr << "diverged: " << e.what() << " (last finite t = "
                          << cvnn::format_double(e.last_finite_time()) << ")\n";
                return cvnn::kExitDivergence;
            }
            std::ostringstream csv;
            cvnn::write_trajectory_csv(csv, res.trajectory);
            if (!write_text(out_path, csv.str())) return cvnn::kExitInputError;
            cvnn::print_simulation_summary(std::cout, res);
            return cvnn::kExitOk;
        }
        if (*sweep) {
            const auto rows = cvnn::run_sweep(s, parse_scales(scales));
            std::ostringstream csv;
            cvnn::write_sweep_csv(csv, rows);
            if (!write_text(out_path, csv.str())) return cvnn::kExitInputError;
            std::cout << csv.str();
            for (const auto& r : rows)
                if (r.diverged) return cvnn::kExitDivergence;
            return cvnn::kExitOk;
        }
    } catch (const cvnn::ConfigError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return cvnn::kExitInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return cvnn::kExitInputError;
    }
    return cvnn::kExitInputError;
}
