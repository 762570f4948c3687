#include "cloning/analytic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "cloning/observables.hpp"
#include "gtest/gtest.h"

using namespace cloning;
using std::numbers::pi;
using std::numbers::sqrt2;

namespace {

QubitState random_qubit(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return QubitState::from_bloch(std::acos(1.0 - 2.0 * u(rng)), 2.0 * pi * u(rng));
}

double total_norm(const UnbiasedAmplitudes& c) {
    return std::norm(c.e1_10) + std::norm(c.g_20) + std::norm(c.e2_10) + std::norm(c.e1_01) + std::norm(c.g_11) +
           std::norm(c.g_02) + std::norm(c.e2_01);
}

double total_norm(const BiasedAmplitudes& c) {
    return std::norm(c.e1_10) + std::norm(c.g_20) + std::norm(c.e2_10) + std::norm(c.f_10) + std::norm(c.g_11) +
           std::norm(c.e1_01);
}

// Test-only oracle for the biased block: exp(-i M tau) on
// (e2;1,0  f;1,0  g;1,1  e1;0,1), independent of the closed form.
Eigen::Vector4cd biased_block_oracle(double g2p, double theta, double tau) {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 1) = m(1, 0) = g2p;
    m(0, 2) = m(2, 0) = 1.0;
    m(2, 3) = m(3, 2) = 1.0;
    Eigen::Vector4cd x0 = Eigen::Vector4cd::Zero();
    x0(0) = std::polar(1.0 / sqrt2, theta);
    const Eigen::Matrix4cd u = (complex(0.0, -tau) * m).exp();
    return u * x0;
}

// Lab amplitudes of one atom configuration rewritten in b-modes, summed into a table.
void add_b_mode_probabilities(ProbabilityTable& t, const UnbiasedAmplitudes& c, const QubitState& q, double w) {
    const FockAmplitudes ground{{{2, 0}, c.g_20}, {{1, 1}, c.g_11}, {{0, 2}, c.g_02}};
    const FockAmplitudes e1{{{1, 0}, c.e1_10}, {{0, 1}, c.e1_01}};
    const FockAmplitudes e2{{{1, 0}, c.e2_10}, {{0, 1}, c.e2_01}};
    for (const auto* amps : {&ground, &e1, &e2})
        for (const auto& [kl, a] : convert_fock_basis(*amps, q)) t.add(kl.first, kl.second, w * std::norm(a));
}

ProbabilityTable theta_averaged_from_amplitudes(const QubitState& q, double tau, int grid) {
    ProbabilityTable t(2);
    for (int j = 0; j < grid; ++j)
        add_b_mode_probabilities(t, amplitudes_unbiased(q, 2.0 * pi * j / grid, tau), q, 1.0 / grid);
    return t;
}

}  // namespace

TEST(AmplitudesUnbiased, initial_values) {
    const QubitState q(complex(0.6, 0.0), complex(0.0, 0.8));
    const double theta = 1.2;
    const auto c = amplitudes_unbiased(q, theta, 0.0);
    const complex ph = std::polar(1.0, theta);
    EXPECT_LE(std::abs(c.e1_10 - q.alpha() / sqrt2), 1e-15);
    EXPECT_LE(std::abs(c.e1_01 - q.beta() / sqrt2), 1e-15);
    EXPECT_LE(std::abs(c.e2_10 - q.alpha() / sqrt2 * ph), 1e-15);
    EXPECT_LE(std::abs(c.e2_01 - q.beta() / sqrt2 * ph), 1e-15);
    EXPECT_EQ(std::abs(c.g_20) + std::abs(c.g_11) + std::abs(c.g_02), 0.0);
}

TEST(AmplitudesUnbiased, half_rabi_node) {
    const auto c = amplitudes_unbiased({1.0, 0.0}, 0.0, pi / sqrt2);
    EXPECT_NEAR(c.e1_10.real(), -1.0 / sqrt2, 1e-15);
    EXPECT_NEAR(std::abs(c.g_20), 0.0, 1e-15);
}

TEST(AmplitudesUnbiased, antisymmetric_combination_is_frozen) {
    const QubitState q(1.0 / sqrt2, 1.0 / sqrt2);
    const double theta = 0.0;
    const complex expected = (q.alpha() * std::polar(1.0, theta) - q.beta()) / sqrt2;
    for (double tau = 0.0; tau < 10.0; tau += 0.37) {
        const auto c = amplitudes_unbiased(q, theta, tau);
        EXPECT_LE(std::abs(c.e2_10 - c.e1_01 - expected), 1e-15);
    }
}

TEST(AmplitudesUnbiased, stays_normalized) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const auto c = amplitudes_unbiased(random_qubit(rng), 2 * pi * u(rng), 20.0 * u(rng));
        EXPECT_NEAR(total_norm(c), 1.0, 1e-10);
    }
}

TEST(ThetaAvgUnbiased, examples) {
    const auto t0 = theta_avg_probs_unbiased(0.0);
    EXPECT_DOUBLE_EQ(t0(1, 0), 1.0);
    EXPECT_DOUBLE_EQ(t0(2, 0) + t0(1, 1) + t0(0, 1), 0.0);

    const auto t = theta_avg_probs_unbiased(pi / (2.0 * sqrt2));
    EXPECT_NEAR(t(2, 0), 0.5, 1e-15);
    EXPECT_NEAR(t(1, 1), 0.25, 1e-15);
    EXPECT_NEAR(t(0, 1), 0.125, 1e-15);
    EXPECT_NEAR(t(1, 0), 0.125, 1e-15);
    EXPECT_EQ(t(0, 2), 0.0);

    for (double tau = 0.0; tau <= 20.0; tau += 0.1) EXPECT_NEAR(theta_avg_probs_unbiased(tau).total(), 1.0, 1e-15);
}

TEST(ThetaAvgUnbiased, follows_from_the_amplitudes_through_the_mode_change) {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        const QubitState q = random_qubit(rng);
        for (double tau = 0.0; tau <= 20.0; tau += 0.25) {
            const auto numeric = theta_averaged_from_amplitudes(q, tau, 4);
            const auto formula = theta_avg_probs_unbiased(tau);
            for (int k = 0; k <= 2; ++k)
                for (int l = 0; l <= 2; ++l) EXPECT_NEAR(numeric(k, l), formula(k, l), 1e-9) << k << "," << l;
        }
    }
}

TEST(FidelityUnbiased, examples_and_universality) {
    EXPECT_DOUBLE_EQ(fidelity_unbiased(0.0), 1.0);
    EXPECT_NEAR(fidelity_unbiased(pi / (2 * sqrt2)), 0.75, 1e-15);
    EXPECT_NEAR(fidelity_unbiased(pi / sqrt2), 0.5, 1e-15);

    std::mt19937_64 rng(31);
    std::vector<QubitState> qubits;
    for (int i = 0; i < 10; ++i) qubits.push_back(random_qubit(rng));
    for (double tau = 0.0; tau <= 12.0; tau += 0.2) {
        for (const auto& q : qubits)
            EXPECT_NEAR(fidelity(theta_averaged_from_amplitudes(q, tau, 4)), fidelity_unbiased(tau), 1e-9);
    }
}

TEST(FidelityUnbiased, period_is_pi_sqrt2) {
    for (double tau = 0.0; tau <= 20.0; tau += 0.13)
        EXPECT_NEAR(fidelity_unbiased(tau + sqrt2 * pi), fidelity_unbiased(tau), 1e-12);
}

TEST(RabiPair, frequencies_for_bias_three) {
    const double g = 3.0;
    const auto r = rabi_pair(g, 0.0);
    // Direct evaluation of the defining expressions.
    EXPECT_NEAR(r.omega1, std::sqrt(g * g + 2 + std::sqrt(g * g * g * g + 4)), 1e-12);
    EXPECT_NEAR(r.omega2, std::sqrt(g * g + 2 - std::sqrt(g * g * g * g + 4)), 1e-12);
    EXPECT_NEAR(r.omega1, 4.49661, 1e-5);
    EXPECT_NEAR(r.omega2, 1.33434, 1e-5);
    EXPECT_NEAR(r.omega1 * r.omega2, 6.0, 1e-12);
    EXPECT_NEAR(r.bigA.real(), 0.0, 1e-15);
    EXPECT_NEAR(r.bigB.real(), 0.0, 1e-15);
}

TEST(RabiPair, identities_hold_for_random_bias) {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(0.01, 20.0);
    for (int i = 0; i < 100; ++i) {
        const double g = u(rng);
        const auto r = rabi_pair(g, 0.3);
        EXPECT_GE(r.omega1, r.omega2);
        EXPECT_GE(r.omega2, 0.0);
        EXPECT_NEAR(r.omega1 * r.omega2, 2.0 * g, 1e-10);
        EXPECT_NEAR(r.omega1 * r.omega1 + r.omega2 * r.omega2, 2 * g * g + 4, 1e-10);
    }
}

TEST(RabiPair, degenerate_bias_is_rejected) {
    EXPECT_THROW(rabi_pair(0.0, 0.0), DegenerateBias);
    EXPECT_THROW(rabi_pair(1e-9, 0.0), DegenerateBias);
    EXPECT_THROW(amplitudes_biased(1e-9, 0.0, 1.0), DegenerateBias);
    EXPECT_NO_THROW(rabi_pair(1e-7, 0.0));
}

TEST(AmplitudesBiased, initial_values_and_bias_free_rows) {
    const auto c0 = amplitudes_biased(3.0, 0.0, 0.0);
    EXPECT_NEAR(std::abs(c0.e1_10 - 1.0 / sqrt2), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c0.e2_10 - 1.0 / sqrt2), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(c0.f_10) + std::abs(c0.g_11) + std::abs(c0.g_20), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c0.e1_01), 0.0, 1e-14);

    const auto c = amplitudes_biased(3.0, 0.0, pi / sqrt2);
    EXPECT_NEAR(c.e1_10.real(), -1.0 / sqrt2, 1e-15);
    EXPECT_NEAR(std::abs(c.g_20), 0.0, 1e-15);

    for (double tau = 0.0; tau < 10.0; tau += 0.3) {
        const auto ct = amplitudes_biased(3.0, 1.7, tau);
        EXPECT_NEAR(std::norm(ct.e1_10) + std::norm(ct.g_20), 0.5, 1e-15);
    }
}

TEST(AmplitudesBiased, initial_phase_is_carried_by_the_second_arm) {
    for (double theta : {0.0, 0.8, 2.5, 4.4}) {
        const auto c = amplitudes_biased(2.0, theta, 0.0);
        EXPECT_NEAR(std::abs(c.e2_10 - std::polar(1.0 / sqrt2, theta)), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(c.e1_01), 0.0, 1e-14);
    }
}

TEST(AmplitudesBiased, matches_matrix_exponential_of_the_coupled_block) {
    for (double g2p : {0.5, 3.0, 8.0}) {
        for (double theta : {0.0, 1.1, 3.9}) {
            for (double tau = 0.0; tau <= 12.0; tau += 0.4) {
                const auto c = amplitudes_biased(g2p, theta, tau);
                const auto x = biased_block_oracle(g2p, theta, tau);
                EXPECT_LE(std::abs(c.e2_10 - x(0)), 1e-10);
                EXPECT_LE(std::abs(c.f_10 - x(1)), 1e-10);
                EXPECT_LE(std::abs(c.g_11 - x(2)), 1e-10);
                EXPECT_LE(std::abs(c.e1_01 - x(3)), 1e-10);
            }
        }
    }
}

TEST(AmplitudesBiased, stays_normalized) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const auto c = amplitudes_biased(0.05 + 15.0 * u(rng), 2 * pi * u(rng), 20.0 * u(rng));
        EXPECT_NEAR(total_norm(c), 1.0, 1e-10);
    }
}

TEST(FidelityBiased, starts_at_one_and_beats_the_unbiased_minimum) {
    EXPECT_NEAR(fidelity_biased(3.0, 0.0), 1.0, 1e-14);
    double min_biased = 1.0;
    double min_unbiased = 1.0;
    for (int i = 0; i <= 1200; ++i) {
        const double tau = 0.01 * i;
        min_biased = std::min(min_biased, fidelity_biased(3.0, tau));
        min_unbiased = std::min(min_unbiased, fidelity_unbiased(tau));
    }
    EXPECT_GT(min_biased, min_unbiased);
}

TEST(FidelityBiased, phase_average_of_the_table_is_phase_independent) {
    for (double tau = 0.0; tau <= 8.0; tau += 0.5) {
        double avg = 0.0;
        for (int j = 0; j < 8; ++j) {
            const auto c = amplitudes_biased(3.0, 2 * pi * j / 8, tau);
            avg += (std::norm(c.e1_01) + 0.5 * std::norm(c.g_11)) / 8;
        }
        EXPECT_NEAR(fidelity_biased(3.0, tau), 1.0 - avg, 1e-14);
    }
}

TEST(FidelityBiased, approaches_unbiased_as_bias_vanishes) {
    for (double tau = 0.0; tau <= 5.0; tau += 0.05) EXPECT_NEAR(fidelity_biased(1e-4, tau), fidelity_unbiased(tau), 1e-3);
    EXPECT_DOUBLE_EQ(fidelity_biased(0.0, 1.3), fidelity_unbiased(1.3));
}

TEST(FidelityBiased, has_no_short_period) {
    // Candidate periods tau* in [0.1, 20]: the curve must not repeat on [0, 20].
    std::vector<double> taus;
    for (int i = 0; i <= 400; ++i) taus.push_back(0.05 * i);
    double best = 1.0;
    for (double shift = 0.1; shift <= 20.0; shift += 0.001) {
        double worst = 0.0;
        for (double tau : taus) {
            worst = std::max(worst, std::abs(fidelity_biased(3.0, tau + shift) - fidelity_biased(3.0, tau)));
            if (worst > best) break;
        }
        best = std::min(best, worst);
    }
    EXPECT_GT(best, 1e-6);
}
