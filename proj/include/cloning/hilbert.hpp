#pragma once

// Composite atom + two-mode photon Hilbert space, restricted to one
// excitation-number sector, and the product initial states of the cloner.

#include <cmath>
#include <compare>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cloning {

using complex = std::complex<double>;

/// Atomic levels of the working basis. Ground carries no excitation; the
/// two excited levels and the metastable level carry one each.
enum class AtomLevel : int { Ground = 0, ExcitedOne = 1, ExcitedTwo = 2, Metastable = 3 };

constexpr int excitation_of(AtomLevel level) noexcept { return level == AtomLevel::Ground ? 0 : 1; }

inline const char* to_string(AtomLevel level) noexcept {
    switch (level) {
        case AtomLevel::Ground: return "g";
        case AtomLevel::ExcitedOne: return "e1";
        case AtomLevel::ExcitedTwo: return "e2";
        case AtomLevel::Metastable: return "f";
    }
    return "?";
}

struct BasisState {
    std::vector<AtomLevel> atoms;
    int n1 = 0;  // photons in the clone mode
    int n2 = 0;  // photons in the orthogonal mode

    int excitation() const noexcept {
        int total = n1 + n2;
        for (AtomLevel a : atoms) total += excitation_of(a);
        return total;
    }

    auto operator<=>(const BasisState&) const = default;
    bool operator==(const BasisState&) const = default;
};

inline std::string to_string(const BasisState& s) {
    std::string out = "|";
    for (std::size_t i = 0; i < s.atoms.size(); ++i) {
        if (i) out += ',';
        out += to_string(s.atoms[i]);
    }
    out += "; " + std::to_string(s.n1) + "," + std::to_string(s.n2) + ">";
    return out;
}

/// Ordered list of every composite state with a fixed excitation number.
///
/// Order: atom configurations lexicographically (first atom most
/// significant, levels in enum order), then n1 descending.
class HilbertBasis {
public:
    HilbertBasis(int n_atoms, int excitation, bool include_metastable, std::vector<BasisState> states)
        : n_atoms_(n_atoms),
          excitation_(excitation),
          include_metastable_(include_metastable),
          states_(std::move(states)) {
        for (std::size_t i = 0; i < states_.size(); ++i) {
            auto [it, inserted] = index_.emplace(states_[i], i);
            if (!inserted) throw std::logic_error("duplicate basis state " + to_string(states_[i]));
        }
    }

    int n_atoms() const noexcept { return n_atoms_; }
    int excitation() const noexcept { return excitation_; }
    bool has_metastable() const noexcept { return include_metastable_; }
    std::size_t size() const noexcept { return states_.size(); }
    const std::vector<BasisState>& states() const noexcept { return states_; }
    const BasisState& operator[](std::size_t i) const { return states_.at(i); }

    bool contains(const BasisState& s) const { return index_.contains(s); }

    std::size_t index(const BasisState& s) const {
        auto it = index_.find(s);
        if (it == index_.end()) throw std::out_of_range("state not in basis: " + to_string(s));
        return it->second;
    }

    /// Largest photon number of any single mode in the sector.
    int max_photons() const noexcept { return excitation_; }

private:
    int n_atoms_;
    int excitation_;
    bool include_metastable_;
    std::vector<BasisState> states_;
    std::map<BasisState, std::size_t> index_;
};

using BasisPtr = std::shared_ptr<const HilbertBasis>;

/// Amplitudes over a shared basis.
struct StateVector {
    BasisPtr basis;
    Eigen::VectorXcd amplitudes;

    double norm() const { return amplitudes.norm(); }

    complex amplitude(const BasisState& s) const { return amplitudes(static_cast<Eigen::Index>(basis->index(s))); }
};

inline BasisPtr enumerate_basis(int n_atoms, int excitation, bool include_metastable) {
    if (n_atoms < 1) throw std::invalid_argument("enumerate_basis: n_atoms must be >= 1");
    if (excitation < 0) throw std::invalid_argument("enumerate_basis: excitation must be >= 0");

    const int n_levels = include_metastable ? 4 : 3;
    std::vector<int> digits(static_cast<std::size_t>(n_atoms), 0);
    std::vector<BasisState> states;

    // Odometer over atom configurations, last atom fastest.
    for (;;) {
        BasisState s;
        s.atoms.reserve(digits.size());
        int excited = 0;
        for (int d : digits) {
            s.atoms.push_back(static_cast<AtomLevel>(d));
            excited += d == 0 ? 0 : 1;
        }
        const int photons = excitation - excited;
        for (int n1 = photons; n1 >= 0; --n1) {
            s.n1 = n1;
            s.n2 = photons - n1;
            states.push_back(s);
        }

        int pos = n_atoms - 1;
        while (pos >= 0 && ++digits[static_cast<std::size_t>(pos)] == n_levels) {
            digits[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return std::make_shared<const HilbertBasis>(n_atoms, excitation, include_metastable, std::move(states));
}

/// Photon part of a product initial state: c10 |1,0> + c01 |0,1>.
struct SinglePhoton {
    complex c10{1.0, 0.0};
    complex c01{0.0, 0.0};
};

/// Each atom in (|e1> + e^{i theta_mu} |e2>)/sqrt(2), times a single photon.
///
/// With the default photon this is the cloner's input in the working basis.
/// Passing the qubit's (alpha, beta) as the photon gives the same input
/// expressed in lab modes.
inline StateVector initial_state(BasisPtr basis, std::span<const double> phases, SinglePhoton photon = {}) {
    const int n = basis->n_atoms();
    if (static_cast<int>(phases.size()) != n)
        throw std::invalid_argument("initial_state: need one phase per atom");
    if (basis->excitation() != n + 1)
        throw std::invalid_argument("initial_state: basis excitation must be n_atoms + 1, got " +
                                    std::to_string(basis->excitation()));
    if (std::abs(std::norm(photon.c10) + std::norm(photon.c01) - 1.0) > 1e-12)
        throw std::invalid_argument("initial_state: photon amplitudes are not normalized");

    StateVector psi{basis, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()))};
    const double atom_norm = std::pow(std::numbers::sqrt2, -n);

    BasisState s;
    s.atoms.assign(static_cast<std::size_t>(n), AtomLevel::ExcitedOne);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        complex atom_amp = atom_norm;
        for (int mu = 0; mu < n; ++mu) {
            const bool second = (mask >> (n - 1 - mu)) & 1u;
            s.atoms[static_cast<std::size_t>(mu)] = second ? AtomLevel::ExcitedTwo : AtomLevel::ExcitedOne;
            if (second) atom_amp *= std::polar(1.0, phases[static_cast<std::size_t>(mu)]);
        }
        s.n1 = 1;
        s.n2 = 0;
        psi.amplitudes(static_cast<Eigen::Index>(basis->index(s))) += atom_amp * photon.c10;
        s.n1 = 0;
        s.n2 = 1;
        psi.amplitudes(static_cast<Eigen::Index>(basis->index(s))) += atom_amp * photon.c01;
    }
    return psi;
}

}  // namespace cloning
