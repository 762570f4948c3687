#pragma once

// Command-line front end: figure presets and parameter runs written as CSV.
//
//   cloner fidelity|photons|avg-fidelity [flags]
//   cloner preset <fig2|fig3a|fig3b|fig4|fig5a|fig5b|fig6a|fig6b> [flags]
//   cloner verify
//
// Exit codes: 0 success, 1 invalid configuration, 2 verification failure.

#include <complex>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cloning/cloner.hpp"
#include "cloning/csv.hpp"
#include "cloning/model.hpp"
#include "cloning/verify.hpp"

namespace cloning::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitVerifyFailed = 2;

struct BiasMode {
    enum class Kind { None, Matched, Lab };
    Kind kind = Kind::None;
    double strength = 0.0;  // Matched
    LabCoupling lab{};      // Lab
};

/// Parses none | matched:<s> | lab:<g1>,<g2>.
inline BiasMode parse_bias(const std::string& text) {
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) throw std::invalid_argument("bad number '" + s + "' in --bias " + text);
        return v;
    };
    if (text == "none") return {};
    if (text.rfind("matched:", 0) == 0) {
        const double s = number(text.substr(8));
        if (s < 0.0) throw std::invalid_argument("--bias matched strength must be >= 0");
        return {BiasMode::Kind::Matched, s, {}};
    }
    if (text.rfind("lab:", 0) == 0) {
        const std::string rest = text.substr(4);
        const auto comma = rest.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("--bias lab needs two values: lab:<g1>,<g2>");
        return {BiasMode::Kind::Lab, 0.0, {number(rest.substr(0, comma)), number(rest.substr(comma + 1))}};
    }
    throw std::invalid_argument("unknown --bias '" + text + "' (none | matched:<s> | lab:<g1>,<g2>)");
}

inline std::string to_string(const BiasMode& b) {
    switch (b.kind) {
        case BiasMode::Kind::None: return "none";
        case BiasMode::Kind::Matched: return "matched:" + format_number(b.strength);
        case BiasMode::Kind::Lab:
            return "lab:" + format_number(b.lab.g1.real()) + "," + format_number(b.lab.g2.real());
    }
    return "none";
}

struct RunConfig {
    int n_atoms = 1;
    BiasMode bias{};
    complex alpha{1.0, 0.0};
    complex beta{0.0, 0.0};
    bool average_qubits = false;
    double tau_max = 12.0;
    int tau_points = 1000;
    int phase_grid = 4;
    int bloch_chi = 16;
    int bloch_phi = 16;
    FixedBiasReading reading = FixedBiasReading::Lab;
    Method method = Method::Spectral;
    std::string output_path;  // empty: standard output

    void validate() const {
        if (n_atoms < 1 || n_atoms > 3) throw std::invalid_argument("--atoms must be 1, 2 or 3");
        if (tau_points < 2) throw std::invalid_argument("--tau-points must be >= 2");
        if (!(tau_max > 0.0)) throw std::invalid_argument("--tau-max must be > 0");
        if (phase_grid < 2) throw std::invalid_argument("--phase-grid must be >= 2");
        if (bloch_chi < 4 || bloch_phi < 4) throw std::invalid_argument("--bloch-grid orders must be >= 4");
        if (!average_qubits) (void)qubit();
    }

    QubitState qubit() const {
        try {
            return {alpha, beta};
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(std::string("explicit qubit: ") + e.what());
        }
    }

    SimulationOptions options() const { return {method, IntegratorConfig{}, phase_grid}; }
};

enum class Command { Fidelity, Photons, AvgFidelity };

/// Pinned parameters of each figure reproduction.
struct Preset {
    Command command;
    RunConfig config;
};

inline std::map<std::string, Preset> presets() {
    auto base = [](int atoms, BiasMode bias, double tau_max, bool average) {
        RunConfig c;
        c.n_atoms = atoms;
        c.bias = bias;
        c.tau_max = tau_max;
        c.tau_points = 1000;
        c.average_qubits = average;
        return c;
    };
    const BiasMode none{};
    const BiasMode matched3{BiasMode::Kind::Matched, 3.0, {}};
    const BiasMode lab8{BiasMode::Kind::Lab, 0.0, {0.0, 8.0}};
    return {
        {"fig2", {Command::Fidelity, base(1, matched3, 12.0, false)}},
        {"fig3a", {Command::Photons, base(1, none, 12.0, false)}},
        {"fig3b", {Command::Photons, base(1, matched3, 12.0, false)}},
        {"fig4", {Command::Fidelity, base(2, matched3, 12.0, false)}},
        {"fig5a", {Command::Photons, base(2, none, 12.0, false)}},
        {"fig5b", {Command::Photons, base(2, matched3, 12.0, false)}},
        {"fig6a", {Command::AvgFidelity, base(1, lab8, 6.0, true)}},
        {"fig6b", {Command::Photons, base(1, lab8, 6.0, true)}},
    };
}

/// Couplings seen in the working frame by qubit q.
inline PrimedCoupling working_couplings(const BiasMode& bias, const QubitState& q) {
    switch (bias.kind) {
        case BiasMode::Kind::None: return {};
        case BiasMode::Kind::Matched: return {0.0, bias.strength};
        case BiasMode::Kind::Lab: return primed_bias(q, bias.lab);
    }
    return {};
}

/// Phase-averaged tables; Bloch-averaged too when the config asks for it.
inline std::vector<ProbabilityTable> tables_for(const RunConfig& cfg, const BiasMode& bias,
                                                std::span<const double> taus) {
    const SimulationOptions opts = cfg.options();
    if (!cfg.average_qubits) return averaged_tables(cfg.n_atoms, working_couplings(bias, cfg.qubit()), taus, opts);

    switch (bias.kind) {
        case BiasMode::Kind::None: return bloch_averaged_tables(cfg.n_atoms, {}, taus, opts, cfg.bloch_chi, cfg.bloch_phi);
        case BiasMode::Kind::Matched:
            return bloch_averaged_tables(cfg.n_atoms, {0.0, bias.strength}, taus, opts, cfg.bloch_chi, cfg.bloch_phi,
                                         FixedBiasReading::Primed);
        case BiasMode::Kind::Lab:
            return bloch_averaged_tables(cfg.n_atoms, bias.lab, taus, opts, cfg.bloch_chi, cfg.bloch_phi, cfg.reading);
    }
    return {};
}

inline std::vector<CsvColumn> run_command(Command cmd, const RunConfig& cfg) {
    cfg.validate();
    const std::vector<double> taus = tau_grid(cfg.tau_max, cfg.tau_points);
    std::vector<CsvColumn> cols{{"tau", taus}};

    switch (cmd) {
        case Command::Fidelity: {
            cols.push_back({"fidelity", fidelity_series(tables_for(cfg, cfg.bias, taus))});
            if (cfg.bias.kind != BiasMode::Kind::None)
                cols.push_back({"fidelity_nobias", fidelity_series(tables_for(cfg, BiasMode{}, taus))});
            break;
        }
        case Command::Photons: {
            CsvColumn right{"n_right", {}};
            CsvColumn all{"n_all", {}};
            for (const auto& m : moment_series(tables_for(cfg, cfg.bias, taus))) {
                right.values.push_back(m.n_right);
                all.values.push_back(m.n_all);
            }
            cols.push_back(std::move(right));
            cols.push_back(std::move(all));
            break;
        }
        case Command::AvgFidelity: {
            RunConfig avg = cfg;
            avg.average_qubits = true;
            cols.push_back({"F_avg_bias", fidelity_series(tables_for(avg, cfg.bias, taus))});
            cols.push_back({"F_avg_nobias", fidelity_series(tables_for(avg, BiasMode{}, taus))});
            break;
        }
    }
    return cols;
}

/// Parses argv and runs. All output goes to out/err; returns the exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Atom-cavity quantum cloner simulator", "cloner"};
    app.set_config("--config", "", "key=value file with option defaults; flags win");
    app.require_subcommand(1);

    int atoms = 1;
    std::string bias = "none";
    double alpha_re = 1.0, alpha_im = 0.0, beta_re = 0.0, beta_im = 0.0;
    double tau_max = 12.0;
    int tau_points = 1000;
    int phase_grid = 4;
    std::string bloch_grid = "16x16";
    std::string method = "spectral";
    std::string reading = "lab";
    std::string out_path;
    bool average = false;
    std::string preset_name;

    std::vector<CLI::Option*> tunables;
    tunables.push_back(app.add_option("--atoms", atoms, "number of atoms (1-3)"));
    tunables.push_back(app.add_option("--bias", bias, "none | matched:<s> | lab:<g1>,<g2>"));
    tunables.push_back(app.add_option("--alpha-re", alpha_re, "input qubit alpha, real part"));
    tunables.push_back(app.add_option("--alpha-im", alpha_im, "input qubit alpha, imaginary part"));
    tunables.push_back(app.add_option("--beta-re", beta_re, "input qubit beta, real part"));
    tunables.push_back(app.add_option("--beta-im", beta_im, "input qubit beta, imaginary part"));
    tunables.push_back(app.add_flag("--average-qubits", average, "average over the Bloch sphere"));
    tunables.push_back(app.add_option("--tau-max", tau_max, "end of the g*t grid"));
    tunables.push_back(app.add_option("--tau-points", tau_points, "number of grid points"));
    tunables.push_back(app.add_option("--phase-grid", phase_grid, "phase-average grid per atom"));
    tunables.push_back(app.add_option("--bloch-grid", bloch_grid, "Bloch quadrature, N or NxM"));
    tunables.push_back(app.add_option("--bias-reading", reading, "fixed field held in: lab | primed"));
    tunables.push_back(app.add_option("--method", method, "spectral | rk5"));
    tunables.push_back(app.add_option("--out", out_path, "output CSV path (default stdout)"));

    auto* fid = app.add_subcommand("fidelity", "fidelity time series")->fallthrough();
    auto* pho = app.add_subcommand("photons", "mean photon numbers time series")->fallthrough();
    auto* avg = app.add_subcommand("avg-fidelity", "Bloch-averaged fidelity, biased and unbiased")->fallthrough();
    auto* ver = app.add_subcommand("verify", "run the self-check suite")->fallthrough();
    auto* pre = app.add_subcommand("preset", "reproduce a figure with pinned parameters")->fallthrough();
    pre->add_option("name", preset_name, "fig2 fig3a fig3b fig4 fig5a fig5b fig6a fig6b")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    }

    if (*ver) {
        const VerifyReport report = run_verification();
        report.print(out);
        return report.ok() ? kExitOk : kExitVerifyFailed;
    }

    try {
        Command cmd = Command::Fidelity;
        RunConfig cfg;
        if (*pre) {
            const auto all = presets();
            auto it = all.find(preset_name);
            if (it == all.end()) throw std::invalid_argument("unknown preset '" + preset_name + "'");
            cmd = it->second.command;
            cfg = it->second.config;
        } else if (*pho) {
            cmd = Command::Photons;
        } else if (*avg) {
            cmd = Command::AvgFidelity;
            cfg.average_qubits = true;
            cfg.tau_max = 6.0;
            cfg.bias = BiasMode{BiasMode::Kind::Lab, 0.0, {0.0, 8.0}};
        } else if (!*fid) {
            throw std::invalid_argument("no command given");
        }

        // Explicit flags (or config-file keys) override the defaults above.
        auto given = [&](const char* name) { return app.get_option(name)->count() > 0; };
        if (given("--atoms")) cfg.n_atoms = atoms;
        if (given("--bias")) cfg.bias = parse_bias(bias);
        if (given("--alpha-re") || given("--alpha-im") || given("--beta-re") || given("--beta-im")) {
            cfg.alpha = {alpha_re, alpha_im};
            cfg.beta = {beta_re, beta_im};
        }
        if (given("--average-qubits")) cfg.average_qubits = average;
        if (given("--tau-max")) cfg.tau_max = tau_max;
        if (given("--tau-points")) cfg.tau_points = tau_points;
        if (given("--phase-grid")) cfg.phase_grid = phase_grid;
        if (given("--bloch-grid")) {
            const auto x = bloch_grid.find('x');
            try {
                cfg.bloch_chi = std::stoi(bloch_grid.substr(0, x));
                cfg.bloch_phi = x == std::string::npos ? cfg.bloch_chi : std::stoi(bloch_grid.substr(x + 1));
            } catch (const std::exception&) {
                throw std::invalid_argument("--bloch-grid must be N or NxM");
            }
        }
        if (given("--bias-reading")) {
            if (reading == "lab") cfg.reading = FixedBiasReading::Lab;
            else if (reading == "primed") cfg.reading = FixedBiasReading::Primed;
            else throw std::invalid_argument("--bias-reading must be lab or primed");
        }
        if (given("--method")) {
            if (method == "spectral") cfg.method = Method::Spectral;
            else if (method == "rk5") cfg.method = Method::Rk5;
            else throw std::invalid_argument("--method must be spectral or rk5");
        }
        if (given("--out")) cfg.output_path = out_path;

        const std::vector<CsvColumn> cols = run_command(cmd, cfg);
        if (cfg.output_path.empty()) {
            write_csv(out, cols);
        } else {
            std::ofstream file(cfg.output_path, std::ios::binary);
            if (!file) throw std::invalid_argument("cannot open output file " + cfg.output_path);
            write_csv(file, cols);
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return kExitOk;
}

}  // namespace cloning::cli
