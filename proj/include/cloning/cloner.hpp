#pragma once

// End-to-end cloner runs: build the sector, evolve every phase-grid initial
// state over a tau grid, and average the photon tables.

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cloning/dynamics.hpp"
#include "cloning/hilbert.hpp"
#include "cloning/model.hpp"
#include "cloning/observables.hpp"
#include "cloning/probability_table.hpp"

namespace cloning {

struct SimulationOptions {
    Method method = Method::Spectral;
    IntegratorConfig integrator{};
    int phase_grid = 4;
};

/// How a fixed cycling field is held while the input qubit varies.
enum class FixedBiasReading {
    Lab,     // (G1, G2) fixed in the lab; (G'1, G'2) follow each qubit
    Primed,  // (G'1, G'2) fixed for every qubit
};

namespace detail {

inline bool is_biased(const PrimedCoupling& c) { return c.g1p != complex{} || c.g2p != complex{}; }

template <class Readout>
std::vector<ProbabilityTable> phase_averaged_series(int n_atoms, const PrimedCoupling& couplings,
                                                    SinglePhoton photon, std::span<const double> taus,
                                                    const SimulationOptions& opts, Readout&& readout) {
    const BasisPtr basis = enumerate_basis(n_atoms, n_atoms + 1, is_biased(couplings));
    const Hamiltonian h = build_hamiltonian(basis, couplings);
    std::optional<Propagator> prop;
    if (opts.method == Method::Spectral) prop.emplace(h);

    return phase_average(
        [&](std::span<const double> phases) {
            const StateVector psi0 = initial_state(basis, phases, photon);
            const std::vector<StateVector> states =
                prop ? evolve_series(*prop, psi0, taus) : evolve_series(h, psi0, taus, opts.method, opts.integrator);
            std::vector<ProbabilityTable> tables;
            tables.reserve(states.size());
            for (const auto& s : states) tables.push_back(readout(s));
            return tables;
        },
        n_atoms, opts.phase_grid);
}

}  // namespace detail

/// Phase-averaged b-mode photon tables in the qubit-adapted frame, where
/// the input photon is |1,0> and the couplings are (G'1, G'2).
inline std::vector<ProbabilityTable> averaged_tables(int n_atoms, const PrimedCoupling& bias,
                                                     std::span<const double> taus, const SimulationOptions& opts = {}) {
    return detail::phase_averaged_series(n_atoms, bias, SinglePhoton{}, taus, opts,
                                         [](const StateVector& s) { return photon_probabilities(s); });
}

/// The same tables computed entirely in the lab frame: lab couplings, the
/// input photon alpha|1,0> + beta|0,1> in a-modes, and a b-mode readout
/// through the mode transformation. Independent of the frame change.
inline std::vector<ProbabilityTable> lab_frame_tables(int n_atoms, const QubitState& q, const LabCoupling& lab,
                                                      std::span<const double> taus,
                                                      const SimulationOptions& opts = {}) {
    return detail::phase_averaged_series(n_atoms, PrimedCoupling{lab.g1, lab.g2}, SinglePhoton{q.alpha(), q.beta()},
                                         taus, opts, [&](const StateVector& s) { return photon_probabilities(s, q); });
}

/// Tables averaged over input qubits on the Bloch sphere for a fixed field.
inline std::vector<ProbabilityTable> bloch_averaged_tables(int n_atoms, const LabCoupling& fixed,
                                                           std::span<const double> taus,
                                                           const SimulationOptions& opts = {}, int quad_chi = 16,
                                                           int quad_phi = 16,
                                                           FixedBiasReading reading = FixedBiasReading::Lab) {
    return bloch_average(
        [&](const QubitState& q) {
            const PrimedCoupling primed =
                reading == FixedBiasReading::Lab ? primed_bias(q, fixed) : PrimedCoupling{fixed.g1, fixed.g2};
            return averaged_tables(n_atoms, primed, taus, opts);
        },
        quad_chi, quad_phi);
}

inline std::vector<double> fidelity_series(std::span<const ProbabilityTable> tables) {
    std::vector<double> out;
    out.reserve(tables.size());
    for (const auto& t : tables) out.push_back(fidelity(t));
    return out;
}

inline std::vector<PhotonMoments> moment_series(std::span<const ProbabilityTable> tables) {
    std::vector<PhotonMoments> out;
    out.reserve(tables.size());
    for (const auto& t : tables) out.push_back(mean_photons(t));
    return out;
}

/// n points evenly spaced on [0, tau_max], endpoints included.
inline std::vector<double> tau_grid(double tau_max, int n) {
    if (n < 2) throw std::invalid_argument("tau_grid: need at least 2 points");
    if (!(tau_max > 0.0)) throw std::invalid_argument("tau_grid: tau_max must be > 0");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = tau_max * i / static_cast<double>(n - 1);
    return g;
}

}  // namespace cloning
