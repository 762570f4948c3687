#include "cloning/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cloning/analytic.hpp"
#include "gtest/gtest.h"

using namespace cloning;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "cloner");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

std::filesystem::path temp_file(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST(ParseBias, forms_and_errors) {
    EXPECT_EQ(cli::parse_bias("none").kind, cli::BiasMode::Kind::None);
    const auto m = cli::parse_bias("matched:3");
    EXPECT_EQ(m.kind, cli::BiasMode::Kind::Matched);
    EXPECT_EQ(m.strength, 3.0);
    const auto l = cli::parse_bias("lab:0,8");
    EXPECT_EQ(l.kind, cli::BiasMode::Kind::Lab);
    EXPECT_EQ(l.lab.g2, complex(8.0));
    for (const char* bad : {"matched:", "matched:-1", "matched:3x", "lab:1", "lab:a,b", "cycling"})
        EXPECT_THROW(cli::parse_bias(bad), std::invalid_argument) << bad;
}

TEST(Cli, unbiased_fidelity_csv_matches_closed_form) {
    const auto r = run_cli({"fidelity", "--tau-points", "50"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 51u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"tau", "fidelity"}));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        ASSERT_EQ(rows[i].size(), 2u);
        const double tau = std::stod(rows[i][0]);
        EXPECT_NEAR(std::stod(rows[i][1]), fidelity_unbiased(tau), 1e-10);
    }
    EXPECT_EQ(rows.back()[0], "12");
}

TEST(Cli, biased_fidelity_adds_reference_column) {
    const auto r = run_cli({"fidelity", "--atoms", "2", "--bias", "matched:3", "--tau-points", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "tau,fidelity,fidelity_nobias");
}

TEST(Cli, photons_and_avg_fidelity_headers) {
    auto r = run_cli({"photons", "--tau-points", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "tau,n_right,n_all");
    EXPECT_EQ(parse_csv(r.out)[1], (std::vector<std::string>{"0", "1", "1"}));

    r = run_cli({"avg-fidelity", "--tau-points", "3", "--bloch-grid", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"tau", "F_avg_bias", "F_avg_nobias"}));
    EXPECT_EQ(rows.back()[0], "6");
}

TEST(Cli, explicit_qubit_runs_in_lab_field) {
    const auto r = run_cli({"fidelity", "--bias", "lab:0,8", "--alpha-re", "0.6", "--beta-im", "0.8", "--tau-points",
                            "4", "--method", "rk5"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(parse_csv(r.out).size(), 5u);
}

TEST(Cli, output_is_deterministic) {
    const std::vector<std::string> args = {"avg-fidelity", "--tau-points", "20", "--bloch-grid", "6x5"};
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, writes_to_file) {
    const auto path = temp_file("cloner_cli_test_out.csv");
    std::filesystem::remove(path);
    const auto r = run_cli({"photons", "--tau-points", "4", "--out", path.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path, std::ios::binary);
    std::stringstream content;
    content << in.rdbuf();
    EXPECT_EQ(content.str(), run_cli({"photons", "--tau-points", "4"}).out);
    std::filesystem::remove(path);
}

TEST(Cli, config_file_supplies_defaults_and_flags_win) {
    const auto path = temp_file("cloner_cli_test.ini");
    {
        std::ofstream cfg(path);
        cfg << "atoms=2\nbias=matched:3\ntau-points=7\n";
    }
    auto r = run_cli({"--config", path.string(), "fidelity"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rows = parse_csv(r.out);
    EXPECT_EQ(rows.size(), 8u);
    EXPECT_EQ(rows[0].size(), 3u);

    r = run_cli({"--config", path.string(), "fidelity", "--tau-points", "3", "--bias", "none"});
    ASSERT_EQ(r.code, 0) << r.err;
    rows = parse_csv(r.out);
    EXPECT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].size(), 2u);
    std::filesystem::remove(path);
}

TEST(Cli, preset_with_override) {
    const auto r = run_cli({"preset", "fig4", "--tau-points", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"tau", "fidelity", "fidelity_nobias"}));
    EXPECT_EQ(rows.back()[0], "12");
}

TEST(Cli, presets_are_all_known) {
    const auto all = cli::presets();
    for (const char* name : {"fig2", "fig3a", "fig3b", "fig4", "fig5a", "fig5b", "fig6a", "fig6b"})
        EXPECT_TRUE(all.contains(name)) << name;
    EXPECT_EQ(all.size(), 8u);
}

TEST(Cli, invalid_input_exits_with_one) {
    const std::vector<std::vector<std::string>> bad = {
        {},
        {"fidelity", "--atoms", "0"},
        {"fidelity", "--atoms", "4"},
        {"fidelity", "--atoms", "two"},
        {"fidelity", "--bias", "sideways"},
        {"fidelity", "--alpha-re", "1", "--beta-re", "1"},
        {"fidelity", "--tau-points", "1"},
        {"fidelity", "--tau-max", "-2"},
        {"fidelity", "--method", "euler"},
        {"fidelity", "--phase-grid", "1"},
        {"avg-fidelity", "--bloch-grid", "2"},
        {"avg-fidelity", "--bloch-grid", "axb"},
        {"avg-fidelity", "--bias-reading", "diagonal"},
        {"preset", "fig9"},
        {"preset"},
        {"fidelity", "--no-such-flag"},
        {"fidelity", "--out", "/nonexistent-dir/x.csv"},
    };
    for (const auto& args : bad) {
        const auto r = run_cli(args);
        std::string joined;
        for (const auto& a : args) joined += a + " ";
        EXPECT_EQ(r.code, cli::kExitInvalid) << joined;
        EXPECT_FALSE(r.err.empty()) << joined;
    }
}

TEST(Cli, help_exits_cleanly) {
    const auto r = run_cli({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("avg-fidelity"), std::string::npos);
}
