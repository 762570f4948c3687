#pragma once

// Input qubit, classical cycling-field couplings and the interaction-picture
// Hamiltonian (units of the atom-cavity coupling g, hbar = 1).

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "cloning/hilbert.hpp"

namespace cloning {

inline constexpr double kQubitNormTolerance = 1e-12;

/// Single-photon input alpha a1^dag + beta a2^dag acting on vacuum.
class QubitState {
public:
    QubitState() = default;

    QubitState(complex alpha, complex beta) : alpha_(alpha), beta_(beta) {
        const double n = std::norm(alpha) + std::norm(beta);
        if (!(std::abs(n - 1.0) <= kQubitNormTolerance))
            throw std::invalid_argument("QubitState: |alpha|^2 + |beta|^2 = " + std::to_string(n) + ", expected 1");
    }

    /// alpha = cos(chi/2), beta = sin(chi/2) e^{i phi}.
    static QubitState from_bloch(double chi, double phi) {
        return {complex(std::cos(0.5 * chi), 0.0), std::polar(std::sin(0.5 * chi), phi)};
    }

    complex alpha() const noexcept { return alpha_; }
    complex beta() const noexcept { return beta_; }

private:
    complex alpha_{1.0, 0.0};
    complex beta_{0.0, 0.0};
};

/// Lab-frame multipliers (G1, G2) of the cycling fields on |e1>-|f> and |e2>-|f>.
struct LabCoupling {
    complex g1{};
    complex g2{};
};

/// The same couplings seen from the qubit-adapted atomic basis (G'1, G'2).
struct PrimedCoupling {
    complex g1p{};
    complex g2p{};
};

/// a-mode coefficients of b2^dag, the mode orthogonal to the qubit: (-beta*, alpha*).
inline std::pair<complex, complex> orthogonal_mode(const QubitState& q) {
    return {-std::conj(q.beta()), std::conj(q.alpha())};
}

/// G'1 = alpha* G1 + beta* G2,  G'2 = -beta G1 + alpha G2.
inline PrimedCoupling primed_bias(const QubitState& q, const LabCoupling& lab) {
    return {std::conj(q.alpha()) * lab.g1 + std::conj(q.beta()) * lab.g2, -q.beta() * lab.g1 + q.alpha() * lab.g2};
}

/// Lab couplings that act only on |e'2> with the given strength, i.e.
/// G1/G2 = -beta*/alpha*, so that primed_bias returns (0, strength).
inline LabCoupling universal_bias(const QubitState& q, double strength) {
    if (strength < 0.0) throw std::invalid_argument("universal_bias: strength must be >= 0");
    // Inverse of the unitary in primed_bias applied to (0, strength).
    return {-std::conj(q.beta()) * strength, std::conj(q.alpha()) * strength};
}

struct BiasField {
    LabCoupling lab;
    PrimedCoupling primed;

    static BiasField from_lab(const QubitState& q, const LabCoupling& lab) { return {lab, primed_bias(q, lab)}; }
    static BiasField matched(const QubitState& q, double strength) {
        return from_lab(q, universal_bias(q, strength));
    }
};

struct Hamiltonian {
    BasisPtr basis;
    Eigen::MatrixXcd matrix;
};

/// Builds H over the basis. Each atom contributes
///   |e1><g| b1 + |e2><g| b2 + G'1 |e1><f| + G'2 |e2><f| + h.c.
/// Level labels are read in whichever frame the basis represents: with
/// primed couplings and b-mode photons this is the working frame, with lab
/// couplings and a-mode photons it is the lab frame.
inline Hamiltonian build_hamiltonian(BasisPtr basis, const PrimedCoupling& bias) {
    const bool biased = bias.g1p != complex{} || bias.g2p != complex{};
    if (biased && !basis->has_metastable())
        throw std::invalid_argument("build_hamiltonian: nonzero bias needs a basis with the metastable level");

    const auto dim = static_cast<Eigen::Index>(basis->size());
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);

    auto couple = [&](Eigen::Index from, const BasisState& to, complex value) {
        const auto row = static_cast<Eigen::Index>(basis->index(to));
        h(row, from) += value;
        h(from, row) += std::conj(value);
    };

    for (std::size_t j = 0; j < basis->size(); ++j) {
        const BasisState& s = (*basis)[j];
        const auto col = static_cast<Eigen::Index>(j);
        for (std::size_t mu = 0; mu < s.atoms.size(); ++mu) {
            BasisState t = s;
            switch (s.atoms[mu]) {
                case AtomLevel::Ground:
                    if (s.n1 > 0) {
                        t.atoms[mu] = AtomLevel::ExcitedOne;
                        t.n1 = s.n1 - 1;
                        couple(col, t, std::sqrt(static_cast<double>(s.n1)));
                        t = s;
                    }
                    if (s.n2 > 0) {
                        t.atoms[mu] = AtomLevel::ExcitedTwo;
                        t.n2 = s.n2 - 1;
                        couple(col, t, std::sqrt(static_cast<double>(s.n2)));
                    }
                    break;
                case AtomLevel::Metastable:
                    if (bias.g1p != complex{}) {
                        t.atoms[mu] = AtomLevel::ExcitedOne;
                        couple(col, t, bias.g1p);
                    }
                    if (bias.g2p != complex{}) {
                        t.atoms[mu] = AtomLevel::ExcitedTwo;
                        couple(col, t, bias.g2p);
                    }
                    break;
                default:
                    break;  // raising terms are added as conjugates
            }
        }
    }
    return {std::move(basis), std::move(h)};
}

}  // namespace cloning
