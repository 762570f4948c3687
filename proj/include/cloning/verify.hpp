#pragma once

// Self-check suite behind `cloner verify`: closed forms against the
// numerical engines, conservation laws, and structural zeros.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "cloning/analytic.hpp"
#include "cloning/cloner.hpp"
#include "cloning/csv.hpp"
#include "cloning/dynamics.hpp"
#include "cloning/hilbert.hpp"
#include "cloning/model.hpp"
#include "cloning/observables.hpp"

namespace cloning {

struct CheckResult {
    std::string name;
    double value = 0.0;  // observed worst case
    double limit = 0.0;  // pass iff value <= limit
    bool passed = false;
};

struct VerifyReport {
    std::vector<CheckResult> checks;

    bool ok() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
    }

    void print(std::ostream& out) const {
        for (const auto& c : checks)
            out << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << format_number(c.value)
                << " (limit " << format_number(c.limit) << ")\n";
        out << (ok() ? "all checks passed" : "verification FAILED") << '\n';
    }
};

/// Replaceable pieces of the formula chain, so that a deliberately broken
/// closed form can be shown to be caught.
struct VerifyHooks {
    std::function<RabiPair(double, double)> rabi = [](double g2p, double theta) { return rabi_pair(g2p, theta); };
};

namespace detail {

inline QubitState random_qubit(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return QubitState::from_bloch(std::acos(1.0 - 2.0 * u(rng)), 2.0 * std::numbers::pi * u(rng));
}

inline double max_abs_diff(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

inline void record(VerifyReport& r, std::string name, double value, double limit) {
    r.checks.push_back({std::move(name), value, limit, value <= limit});
}

}  // namespace detail

inline VerifyReport run_verification(const VerifyHooks& hooks = {}) {
    VerifyReport report;
    std::mt19937_64 rng(20010417);
    const std::vector<double> taus = tau_grid(12.0, 241);
    const std::vector<double> thetas = {0.0, 0.9, 2.3, 4.1};

    // Unbiased closed form against the spectral propagator, lab frame.
    {
        const BasisPtr basis = enumerate_basis(1, 2, false);
        const Propagator prop(build_hamiltonian(basis, {}));
        double worst = 0.0;
        for (int trial = 0; trial < 3; ++trial) {
            const QubitState q = detail::random_qubit(rng);
            for (double theta : thetas) {
                const double ph[] = {theta};
                const StateVector psi0 = initial_state(basis, ph, {q.alpha(), q.beta()});
                for (double tau : taus) {
                    const auto exact = amplitudes_unbiased(q, theta, tau).to_state(basis);
                    worst = std::max(worst, detail::max_abs_diff(prop.evolve(psi0, tau).amplitudes, exact.amplitudes));
                }
            }
        }
        detail::record(report, "unbiased closed-form amplitudes vs spectral", worst, 1e-10);
    }

    // Biased closed form against the spectral propagator, working frame.
    {
        const double g2p = 3.0;
        const BasisPtr basis = enumerate_basis(1, 2, true);
        const Propagator prop(build_hamiltonian(basis, {0.0, g2p}));
        double worst = 0.0;
        for (double theta : thetas) {
            const double ph[] = {theta};
            const StateVector psi0 = initial_state(basis, ph);
            const RabiPair rp = hooks.rabi(g2p, theta);
            for (double tau : taus) {
                const auto exact = amplitudes_biased(rp, g2p, tau).to_state(basis);
                worst = std::max(worst, detail::max_abs_diff(prop.evolve(psi0, tau).amplitudes, exact.amplitudes));
            }
        }
        detail::record(report, "biased closed-form amplitudes vs spectral (G'2=3)", worst, 1e-8);
    }

    // Phase-averaged table and fidelity, universality across qubits.
    {
        double table_err = 0.0;
        double fid_err = 0.0;
        for (int trial = 0; trial < 3; ++trial) {
            const QubitState q = detail::random_qubit(rng);
            const auto tables = lab_frame_tables(1, q, {}, taus);
            for (std::size_t i = 0; i < taus.size(); ++i) {
                const ProbabilityTable ref = theta_avg_probs_unbiased(taus[i]);
                for (int k = 0; k <= 2; ++k)
                    for (int l = 0; l <= 2; ++l) table_err = std::max(table_err, std::abs(tables[i](k, l) - ref(k, l)));
                fid_err = std::max(fid_err, std::abs(fidelity(tables[i]) - fidelity_unbiased(taus[i])));
            }
        }
        detail::record(report, "unbiased phase-averaged table vs closed form", table_err, 1e-9);
        detail::record(report, "unbiased fidelity universality vs closed form", fid_err, 1e-9);
    }

    // Matched bias keeps the fidelity curve qubit independent (lab frame).
    {
        const std::vector<double> reference = fidelity_series(averaged_tables(1, {0.0, 3.0}, taus));
        double worst = 0.0;
        for (int trial = 0; trial < 3; ++trial) {
            const QubitState q = detail::random_qubit(rng);
            const auto f = fidelity_series(lab_frame_tables(1, q, universal_bias(q, 3.0), taus));
            for (std::size_t i = 0; i < taus.size(); ++i) worst = std::max(worst, std::abs(f[i] - reference[i]));
        }
        detail::record(report, "matched-bias fidelity universality", worst, 1e-9);
    }

    // Structural zeros, probability conservation, two-atom fidelity form.
    {
        double zero_one = 0.0;
        double zero_two = 0.0;
        double total_err = 0.0;
        double two_atom = 0.0;
        for (const auto& t : averaged_tables(1, {0.0, 3.0}, taus)) {
            zero_one = std::max(zero_one, t(0, 2));
            total_err = std::max(total_err, std::abs(t.total() - 1.0));
        }
        for (const auto& t : averaged_tables(2, {0.0, 3.0}, taus)) {
            zero_two = std::max(zero_two, t(0, 3));
            total_err = std::max(total_err, std::abs(t.total() - 1.0));
            two_atom = std::max(two_atom, std::abs(fidelity(t) - fidelity_two_atom(t)));
        }
        detail::record(report, "p(0,2) with G'1=0, one atom", zero_one, 1e-10);
        detail::record(report, "p(0,3) with G'1=0, two atoms", zero_two, 1e-10);
        detail::record(report, "probability conservation", total_err, 1e-9);
        detail::record(report, "two-atom fidelity form vs general fidelity", two_atom, 1e-10);
    }

    // RK5 against spectral, and its norm drift, over tau in [0, 20].
    {
        const std::vector<double> long_taus = tau_grid(20.0, 81);
        double drift = 0.0;
        double discrepancy = 0.0;
        for (int n_atoms : {1, 2}) {
            for (double g2p : {0.0, 3.0, 8.0}) {
                const BasisPtr basis = enumerate_basis(n_atoms, n_atoms + 1, true);
                const Hamiltonian h = build_hamiltonian(basis, {0.0, g2p});
                std::vector<double> phases(static_cast<std::size_t>(n_atoms), 0.7);
                const StateVector psi0 = initial_state(basis, phases);
                const auto rk = evolve_series(h, psi0, long_taus, Method::Rk5);
                const auto sp = evolve_series(h, psi0, long_taus, Method::Spectral);
                for (std::size_t i = 0; i < long_taus.size(); ++i) {
                    drift = std::max(drift, std::abs(rk[i].norm() - 1.0));
                    discrepancy = std::max(discrepancy, detail::max_abs_diff(rk[i].amplitudes, sp[i].amplitudes));
                }
            }
        }
        detail::record(report, "rk5 norm drift", drift, 1e-9);
        detail::record(report, "rk5 vs spectral amplitude discrepancy", discrepancy, 1e-6);
    }

    return report;
}

}  // namespace cloning
