#pragma once

// Photon statistics read out of evolved states, the cloning fidelity, and
// the averages over atomic phases and over input qubits.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "cloning/hilbert.hpp"
#include "cloning/model.hpp"
#include "cloning/probability_table.hpp"

namespace cloning {

// ---------------------------------------------------------------------------
// Mode conversion

/// Two-mode Fock amplitudes keyed by (n1, n2).
using FockAmplitudes = std::map<std::pair<int, int>, complex>;

inline constexpr int kMaxFockPhotons = 12;

namespace detail {

inline double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

inline double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

/// a-mode coefficients <m, n|_a |k, l>_b, with |k,l>_b = (b1^dag)^k (b2^dag)^l |0> / sqrt(k! l!).
inline FockAmplitudes b_state_in_a_modes(int k, int l, const QubitState& q) {
    const complex a = q.alpha();
    const complex b = q.beta();
    const auto [o1, o2] = std::pair{-std::conj(b), std::conj(a)};  // b2^dag = o1 a1^dag + o2 a2^dag

    FockAmplitudes out;
    for (int i = 0; i <= k; ++i) {
        const complex first = binomial(k, i) * std::pow(a, k - i) * std::pow(b, i);
        for (int j = 0; j <= l; ++j) {
            const complex second = binomial(l, j) * std::pow(o1, l - j) * std::pow(o2, j);
            const int m = (k - i) + (l - j);
            const int n = i + j;
            out[{m, n}] += first * second;
        }
    }
    const double norm_kl = std::sqrt(factorial(k) * factorial(l));
    for (auto& [mn, c] : out) c *= std::sqrt(factorial(mn.first) * factorial(mn.second)) / norm_kl;
    return out;
}

}  // namespace detail

/// Re-expresses lab (a-mode) amplitudes in the qubit-adapted b-modes.
/// Each photon-number sector maps unitarily onto itself.
inline FockAmplitudes convert_fock_basis(const FockAmplitudes& a_amps, const QubitState& q) {
    std::map<int, bool> sectors;
    for (const auto& [mn, c] : a_amps) {
        if (mn.first < 0 || mn.second < 0) throw std::invalid_argument("convert_fock_basis: negative photon number");
        if (mn.first + mn.second > kMaxFockPhotons)
            throw std::invalid_argument("convert_fock_basis: photon number above cap");
        sectors[mn.first + mn.second] = true;
    }

    FockAmplitudes b_amps;
    for (const auto& [total, unused] : sectors) {
        for (int k = total; k >= 0; --k) {
            const int l = total - k;
            complex acc{};
            for (const auto& [mn, e] : detail::b_state_in_a_modes(k, l, q)) {
                auto it = a_amps.find(mn);
                if (it != a_amps.end()) acc += std::conj(e) * it->second;
            }
            b_amps[{k, l}] = acc;
        }
    }
    return b_amps;
}

// ---------------------------------------------------------------------------
// Photon statistics

/// Diagonal of the reduced field density matrix in the basis's own modes.
inline ProbabilityTable photon_probabilities(const StateVector& psi) {
    ProbabilityTable t(psi.basis->max_photons());
    const auto& states = psi.basis->states();
    for (std::size_t i = 0; i < states.size(); ++i)
        t.add(states[i].n1, states[i].n2, std::norm(psi.amplitudes(static_cast<Eigen::Index>(i))));
    return t;
}

/// Same, for a state whose photon labels are lab a-modes, read out in the
/// b-modes of qubit q.
inline ProbabilityTable photon_probabilities(const StateVector& psi, const QubitState& q) {
    std::map<std::vector<AtomLevel>, FockAmplitudes> by_atoms;
    const auto& states = psi.basis->states();
    for (std::size_t i = 0; i < states.size(); ++i)
        by_atoms[states[i].atoms][{states[i].n1, states[i].n2}] += psi.amplitudes(static_cast<Eigen::Index>(i));

    ProbabilityTable t(psi.basis->max_photons());
    for (const auto& [atoms, amps] : by_atoms)
        for (const auto& [kl, c] : convert_fock_basis(amps, q)) t.add(kl.first, kl.second, std::norm(c));
    return t;
}

inline constexpr double kVacuumTolerance = 1e-10;

/// Sum over k + l >= 1 of p(k, l) k / (k + l).
inline double fidelity(const ProbabilityTable& t) {
    if (t(0, 0) > kVacuumTolerance)
        throw std::domain_error("fidelity: p(0,0) > 0, excitation accounting is broken");
    double f = 0.0;
    t.for_each([&](int k, int l, double p) {
        if (k + l > 0) f += p * static_cast<double>(k) / static_cast<double>(k + l);
    });
    return f;
}

/// Two-atom fidelity in the form that lists only the photon-loss channels:
/// 1 - [p(2,1)/3 + 2 p(1,2)/3 + p(1,1)/2 + p(0,1) + p(0,2)].
/// Equals fidelity() whenever p(0,3) = 0.
inline double fidelity_two_atom(const ProbabilityTable& t) {
    return 1.0 - (t(2, 1) / 3.0 + 2.0 * t(1, 2) / 3.0 + 0.5 * t(1, 1) + t(0, 1) + t(0, 2));
}

struct PhotonMoments {
    double n_right = 0.0;  // mean photons in the clone mode
    double n_all = 0.0;    // mean photons in both modes
};

inline PhotonMoments mean_photons(const ProbabilityTable& t) {
    PhotonMoments m;
    t.for_each([&](int k, int l, double p) {
        m.n_right += k * p;
        m.n_all += (k + l) * p;
    });
    return m;
}

struct PhotonStats {
    ProbabilityTable table;
    double n_right = 0.0;
    double n_all = 0.0;

    static PhotonStats from(ProbabilityTable t) {
        const PhotonMoments m = mean_photons(t);
        return {std::move(t), m.n_right, m.n_all};
    }
};

// ---------------------------------------------------------------------------
// Averaging

namespace detail {

inline void scale(double& v, double w) { v *= w; }
inline void scale(ProbabilityTable& v, double w) { v *= w; }
inline void accumulate(double& acc, const double& v) { acc += v; }
inline void accumulate(ProbabilityTable& acc, const ProbabilityTable& v) { acc += v; }

template <class T>
void scale(std::vector<T>& v, double w) {
    for (auto& x : v) scale(x, w);
}

template <class T>
void accumulate(std::vector<T>& acc, const std::vector<T>& v) {
    if (acc.size() != v.size()) throw std::invalid_argument("accumulate: series length mismatch");
    for (std::size_t i = 0; i < v.size(); ++i) accumulate(acc[i], v[i]);
}

/// Runs fn(i) for i in [0, count), spread over worker threads.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Weighted sum of node values, reduced in node order regardless of how
/// the nodes were evaluated.
template <class T, class Eval>
T weighted_reduce(std::size_t count, Eval&& eval, std::span<const double> weights) {
    std::vector<T> values(count);
    parallel_for(count, [&](std::size_t i) { values[i] = eval(i); });
    T acc = std::move(values[0]);
    scale(acc, weights[0]);
    for (std::size_t i = 1; i < count; ++i) {
        scale(values[i], weights[i]);
        accumulate(acc, values[i]);
    }
    return acc;
}

}  // namespace detail

/// Uniform average over each of n_angles phases on the grid 2 pi j / grid_m.
/// Exact for trigonometric polynomials of degree < grid_m in each angle.
template <class F>
auto phase_average(F&& f, int n_angles, int grid_m) {
    using T = std::decay_t<decltype(f(std::span<const double>{}))>;
    if (grid_m < 2) throw std::invalid_argument("phase_average: grid_m must be >= 2");
    if (n_angles < 1) throw std::invalid_argument("phase_average: n_angles must be >= 1");

    std::size_t count = 1;
    for (int i = 0; i < n_angles; ++i) count *= static_cast<std::size_t>(grid_m);
    const std::vector<double> weights(count, 1.0 / static_cast<double>(count));

    return detail::weighted_reduce<T>(
        count,
        [&](std::size_t node) {
            std::vector<double> phases(static_cast<std::size_t>(n_angles));
            std::size_t rest = node;
            for (int a = n_angles - 1; a >= 0; --a) {
                const auto j = rest % static_cast<std::size_t>(grid_m);
                rest /= static_cast<std::size_t>(grid_m);
                phases[static_cast<std::size_t>(a)] =
                    2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(grid_m);
            }
            return f(std::span<const double>(phases));
        },
        weights);
}

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1], nodes descending.
inline QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    // (P_n(x), P_n'(x)) by the three-term recurrence.
    auto legendre = [n](double x) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
    };

    QuadratureRule r{std::vector<double>(static_cast<std::size_t>(n)), std::vector<double>(static_cast<std::size_t>(n))};
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = legendre(x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = legendre(x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        r.nodes[lo] = x;
        r.nodes[hi] = -x;
        r.weights[lo] = w;
        r.weights[hi] = w;
    }
    if (n % 2 == 1) r.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return r;
}

/// Point on the Bloch sphere of the input qubit.
struct BlochPoint {
    double chi = 0.0;  // [0, pi]
    double phi = 0.0;  // [0, 2 pi)

    QubitState qubit() const { return QubitState::from_bloch(chi, phi); }
};

/// Uniform average over the Bloch sphere: Gauss-Legendre in cos(chi) and an
/// equispaced grid in phi.
template <class F>
auto bloch_average(F&& f, int quad_chi, int quad_phi) {
    using T = std::decay_t<decltype(f(std::declval<const QubitState&>()))>;
    if (quad_chi < 4 || quad_phi < 4) throw std::invalid_argument("bloch_average: quadrature orders must be >= 4");

    const QuadratureRule rule = gauss_legendre(quad_chi);
    std::vector<BlochPoint> points;
    std::vector<double> weights;
    for (int i = 0; i < quad_chi; ++i) {
        for (int j = 0; j < quad_phi; ++j) {
            points.push_back({std::acos(rule.nodes[static_cast<std::size_t>(i)]),
                              2.0 * std::numbers::pi * j / static_cast<double>(quad_phi)});
            weights.push_back(0.5 * rule.weights[static_cast<std::size_t>(i)] / static_cast<double>(quad_phi));
        }
    }
    return detail::weighted_reduce<T>(
        points.size(), [&](std::size_t node) { return f(points[node].qubit()); }, weights);
}

}  // namespace cloning
