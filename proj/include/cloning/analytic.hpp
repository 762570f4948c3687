#pragma once

// Closed-form single-atom solutions. Time is tau = g t throughout.
//
// Unbiased V-system: amplitudes in the lab atomic basis with a-mode photons,
// for input qubit (alpha, beta) and atom (|e1> + e^{i theta}|e2>)/sqrt(2).
// Biased four-level atom: amplitudes in the qubit-adapted basis with b-mode
// photons, G'1 = 0 and G'2 > 0.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "cloning/hilbert.hpp"
#include "cloning/model.hpp"
#include "cloning/probability_table.hpp"

namespace cloning {

/// Raised when the biased closed form is asked for G'2 at or below
/// kDegenerateBias, where A and B are 0/0.
class DegenerateBias : public std::domain_error {
public:
    explicit DegenerateBias(double g2p)
        : std::domain_error("degenerate bias G'2 = " + std::to_string(g2p) + " (closed form needs G'2 > 1e-8)") {}
};

inline constexpr double kDegenerateBias = 1e-8;

struct UnbiasedAmplitudes {
    complex e1_10, g_20, e2_10, e1_01, g_11, g_02, e2_01;

    /// Places the amplitudes into a 1-atom, excitation-2 basis. States of
    /// the basis not listed above get 0.
    StateVector to_state(BasisPtr basis) const {
        StateVector psi{basis, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()))};
        auto put = [&](AtomLevel a, int n1, int n2, complex c) {
            psi.amplitudes(static_cast<Eigen::Index>(basis->index(BasisState{{a}, n1, n2}))) = c;
        };
        put(AtomLevel::ExcitedOne, 1, 0, e1_10);
        put(AtomLevel::Ground, 2, 0, g_20);
        put(AtomLevel::ExcitedTwo, 1, 0, e2_10);
        put(AtomLevel::ExcitedOne, 0, 1, e1_01);
        put(AtomLevel::Ground, 1, 1, g_11);
        put(AtomLevel::Ground, 0, 2, g_02);
        put(AtomLevel::ExcitedTwo, 0, 1, e2_01);
        return psi;
    }
};

inline UnbiasedAmplitudes amplitudes_unbiased(const QubitState& q, double theta, double tau) {
    using std::numbers::sqrt2;
    const complex a = q.alpha();
    const complex b = q.beta();
    const complex phase = std::polar(1.0, theta);
    const double c = std::cos(sqrt2 * tau);
    const double s = std::sin(sqrt2 * tau);
    const complex i{0.0, 1.0};

    UnbiasedAmplitudes out;
    out.e1_10 = a / sqrt2 * c;
    out.g_20 = -i * a / sqrt2 * s;
    out.e2_10 = ((a * phase - b) + (b + a * phase) * c) / (2.0 * sqrt2);
    out.e1_01 = ((b - a * phase) + (b + a * phase) * c) / (2.0 * sqrt2);
    out.g_11 = -0.5 * i * (b + a * phase) * s;
    out.g_02 = -i * b / sqrt2 * phase * s;
    out.e2_01 = b / sqrt2 * phase * c;
    return out;
}

/// Phase-averaged b-mode probabilities of the unbiased single-atom cloner.
inline ProbabilityTable theta_avg_probs_unbiased(double tau) {
    const double c = std::cos(std::numbers::sqrt2 * tau);
    const double s = std::sin(std::numbers::sqrt2 * tau);
    ProbabilityTable t(2);
    t.set(2, 0, 0.5 * s * s);
    t.set(1, 1, 0.25 * s * s);
    t.set(0, 1, 0.125 * c * c - 0.25 * c + 0.125);
    t.set(1, 0, 0.625 * c * c + 0.25 * c + 0.125);
    return t;
}

inline double fidelity_unbiased(double tau) { return 0.75 + 0.25 * std::cos(std::numbers::sqrt2 * tau); }

/// Normal-mode frequencies of the biased atom and the amplitudes of the
/// two modes in the |g; 1,1> component.
struct RabiPair {
    double omega1 = 0.0;
    double omega2 = 0.0;
    complex bigA;
    complex bigB;
};

inline RabiPair rabi_pair(double g2p, double theta) {
    if (!(g2p > kDegenerateBias)) throw DegenerateBias(g2p);
    const double g2 = g2p * g2p;
    const double root = std::sqrt(g2 * g2 + 4.0);
    const double omega1_sq = g2 + 2.0 + root;
    // g2 + 2 - root cancels for small g2p; omega1^2 omega2^2 = 4 g2 is exact.
    const double omega2_sq = 4.0 * g2 / omega1_sq;

    RabiPair r;
    r.omega1 = std::sqrt(omega1_sq);
    r.omega2 = std::sqrt(omega2_sq);
    const complex half_i_phase = 0.5 * complex(0.0, 1.0) * std::polar(1.0, theta);
    const double numer_a = omega2_sq - 2.0 * g2 - 4.0;
    const double numer_b = -omega2_sq;  // == omega1^2 - 2 g2 - 4
    r.bigA = half_i_phase * numer_a / (r.omega1 * root);
    r.bigB = -half_i_phase * numer_b / (r.omega2 * root);
    return r;
}

struct BiasedAmplitudes {
    complex e1_10, g_20, e2_10, f_10, g_11, e1_01;

    StateVector to_state(BasisPtr basis) const {
        StateVector psi{basis, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()))};
        auto put = [&](AtomLevel a, int n1, int n2, complex c) {
            psi.amplitudes(static_cast<Eigen::Index>(basis->index(BasisState{{a}, n1, n2}))) = c;
        };
        put(AtomLevel::ExcitedOne, 1, 0, e1_10);
        put(AtomLevel::Ground, 2, 0, g_20);
        put(AtomLevel::ExcitedTwo, 1, 0, e2_10);
        put(AtomLevel::Metastable, 1, 0, f_10);
        put(AtomLevel::Ground, 1, 1, g_11);
        put(AtomLevel::ExcitedOne, 0, 1, e1_01);
        return psi;
    }
};

/// Amplitudes from an explicit RabiPair (used to probe the formula chain).
inline BiasedAmplitudes amplitudes_biased(const RabiPair& r, double g2p, double tau) {
    using std::numbers::sqrt2;
    const double g2 = g2p * g2p;
    const double w1 = r.omega1 / sqrt2 * tau;
    const double w2 = r.omega2 / sqrt2 * tau;
    const double o1 = r.omega1 * r.omega1;
    const double o2 = r.omega2 * r.omega2;
    const complex i{0.0, 1.0};

    BiasedAmplitudes out;
    out.g_11 = r.bigA * std::sin(w1) + r.bigB * std::sin(w2);
    out.f_10 = ((o1 - 4.0) * r.bigA * std::sin(w1) + (o2 - 4.0) * r.bigB * std::sin(w2)) / (2.0 * g2p);
    out.e2_10 = i / (2.0 * sqrt2 * g2) *
                (r.omega1 * (o1 - 4.0) * r.bigA * std::cos(w1) + r.omega2 * (o2 - 4.0) * r.bigB * std::cos(w2));
    out.e1_01 = -i / (2.0 * sqrt2 * g2) *
                (r.omega1 * (o1 - 2.0 * g2 - 4.0) * r.bigA * std::cos(w1) +
                 r.omega2 * (o2 - 2.0 * g2 - 4.0) * r.bigB * std::cos(w2));
    out.e1_10 = std::cos(sqrt2 * tau) / sqrt2;
    out.g_20 = -i / sqrt2 * std::sin(sqrt2 * tau);
    return out;
}

inline BiasedAmplitudes amplitudes_biased(double g2p, double theta, double tau) {
    return amplitudes_biased(rabi_pair(g2p, theta), g2p, tau);
}

/// Phase-averaged b-mode probabilities of the biased atom. Every amplitude
/// row is either theta-independent or proportional to e^{i theta}, so the
/// moduli carry no theta dependence and theta = 0 is the average.
inline ProbabilityTable theta_avg_probs_biased(double g2p, double tau) {
    const BiasedAmplitudes c = amplitudes_biased(g2p, 0.0, tau);
    ProbabilityTable t(2);
    t.set(2, 0, std::norm(c.g_20));
    t.set(1, 1, std::norm(c.g_11));
    t.set(1, 0, std::norm(c.f_10) + std::norm(c.e2_10) + std::norm(c.e1_10));
    t.set(0, 1, std::norm(c.e1_01));
    return t;
}

/// F = 1 - [p(0,1) + p(1,1)/2]. Falls back to the unbiased closed form when
/// G'2 is at or below the degenerate threshold.
inline double fidelity_biased(double g2p, double tau) {
    if (std::abs(g2p) <= kDegenerateBias) return fidelity_unbiased(tau);
    const ProbabilityTable t = theta_avg_probs_biased(std::abs(g2p), tau);
    return 1.0 - (t(0, 1) + 0.5 * t(1, 1));
}

}  // namespace cloning
