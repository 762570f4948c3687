#pragma once

// Time evolution of state vectors under a constant Hermitian Hamiltonian,
// by exact spectral propagation and by adaptive Dormand-Prince 5(4).

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cloning/hilbert.hpp"
#include "cloning/model.hpp"

namespace cloning {

class EigenFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StepSizeUnderflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct HermitianEigen {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXcd vectors; // columns
};

/// Cyclic Jacobi diagonalization of a Hermitian matrix. Each rotation first
/// rephases column q so the pivot is real, then applies a real Givens
/// rotation. Sweep order (p < q, row major) is fixed, so results are
/// bit-reproducible for identical input.
inline HermitianEigen jacobi_eigen(const Eigen::MatrixXcd& h, int max_sweeps = 100) {
    const Eigen::Index n = h.rows();
    if (h.cols() != n) throw std::invalid_argument("jacobi_eigen: matrix must be square");

    Eigen::MatrixXcd a = h;
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(n, n);
    const double scale = std::max(a.norm(), std::numeric_limits<double>::min());
    const double eps = std::numeric_limits<double>::epsilon();

    auto off_norm = [&] {
        double s = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) s += std::norm(a(p, q));
        return std::sqrt(2.0 * s);
    };

    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        if (off_norm() <= eps * scale) break;
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double mag = std::abs(a(p, q));
                if (mag <= eps * eps * scale) continue;

                // Rephase: A <- P^dag A P, P = diag(.., e^{-i phi} at q, ..).
                const complex ph = std::conj(a(p, q)) / mag;
                a.col(q) *= ph;
                a.row(q) *= std::conj(ph);
                v.col(q) *= ph;
                a(p, q) = mag;
                a(q, p) = mag;

                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * mag);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (Eigen::Index k = 0; k < n; ++k) {
                    const complex akp = a(k, p);
                    const complex akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const complex apk = a(p, k);
                    const complex aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const complex vkp = v(k, p);
                    const complex vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
            }
        }
    }
    if (sweep == max_sweeps && off_norm() > eps * scale)
        throw EigenFailure("jacobi_eigen: no convergence after " + std::to_string(max_sweeps) + " sweeps");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index x, Eigen::Index y) { return a(x, x).real() < a(y, y).real(); });

    HermitianEigen out{Eigen::VectorXd(n), Eigen::MatrixXcd(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        out.values(k) = a(src, src).real();
        out.vectors.col(k) = v.col(src);
    }
    return out;
}

/// Factorized e^{-i H tau}. Immutable once built.
class Propagator {
public:
    explicit Propagator(const Hamiltonian& h) : basis_(h.basis), eig_(jacobi_eigen(h.matrix)) {}

    const BasisPtr& basis() const noexcept { return basis_; }
    const Eigen::VectorXd& eigenvalues() const noexcept { return eig_.values; }
    const Eigen::MatrixXcd& eigenvectors() const noexcept { return eig_.vectors; }

    /// Components of psi0 along the eigenvectors; reuse across many tau.
    Eigen::VectorXcd project(const StateVector& psi0) const {
        check_basis(psi0);
        return eig_.vectors.adjoint() * psi0.amplitudes;
    }

    StateVector evolve_projected(const Eigen::VectorXcd& coeffs, double tau) const {
        Eigen::VectorXcd phased(coeffs.size());
        for (Eigen::Index k = 0; k < coeffs.size(); ++k) phased(k) = std::polar(1.0, -eig_.values(k) * tau) * coeffs(k);
        return {basis_, eig_.vectors * phased};
    }

    StateVector evolve(const StateVector& psi0, double tau) const {
        if (tau == 0.0) return psi0;
        return evolve_projected(project(psi0), tau);
    }

private:
    void check_basis(const StateVector& psi) const {
        if (psi.basis.get() != basis_.get() && psi.basis->states() != basis_->states())
            throw std::invalid_argument("Propagator: state lives on a different basis");
        if (psi.amplitudes.size() != static_cast<Eigen::Index>(basis_->size()))
            throw std::invalid_argument("Propagator: state dimension mismatch");
    }

    BasisPtr basis_;
    HermitianEigen eig_;
};

inline StateVector spectral_propagate(const Hamiltonian& h, const StateVector& psi0, double tau) {
    return Propagator(h).evolve(psi0, tau);
}

struct IntegratorConfig {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    double initial_step = 1e-3;
    double max_step = 0.1;
    double min_step = 1e-12;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw std::invalid_argument("IntegratorConfig: tolerances must be > 0");
        if (!(initial_step > 0.0) || !(max_step > 0.0)) throw std::invalid_argument("IntegratorConfig: steps must be > 0");
    }
};

namespace detail {

// Dormand-Prince 5(4) tableau; the 5th-order solution is propagated and the
// last stage is reused as the first of the next step.
struct DormandPrince {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // b - b*, the embedded 4th-order difference
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
};

}  // namespace detail

/// Integration statistics from the most recent rk5 call.
struct IntegratorStats {
    long accepted = 0;
    long rejected = 0;
};

/// Integrates dc/dtau = -i H c from 0 to tau. The norm is never corrected.
inline StateVector rk5_propagate(const Hamiltonian& h, const StateVector& psi0, double tau,
                                 const IntegratorConfig& cfg = {}, IntegratorStats* stats = nullptr) {
    using T = detail::DormandPrince;
    cfg.validate();
    if (tau < 0.0) throw std::invalid_argument("rk5_propagate: tau must be >= 0");
    if (psi0.amplitudes.size() != h.matrix.rows()) throw std::invalid_argument("rk5_propagate: dimension mismatch");

    const complex minus_i{0.0, -1.0};
    const Eigen::MatrixXcd m = minus_i * h.matrix;
    Eigen::VectorXcd y = psi0.amplitudes;
    if (tau == 0.0) return psi0;

    const Eigen::Index n = y.size();
    Eigen::VectorXcd k1 = m * y, k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ynew(n), err(n);

    double t = 0.0;
    double step = std::min(cfg.initial_step, cfg.max_step);
    long accepted = 0;
    long rejected = 0;

    while (t < tau) {
        bool last = false;
        if (t + step >= tau) {
            step = tau - t;
            last = true;
        }
        if (step < cfg.min_step && !last)
            throw StepSizeUnderflow("rk5_propagate: step " + std::to_string(step) + " below minimum at tau " +
                                    std::to_string(t));

        k2 = m * (y + step * (T::a21 * k1));
        k3 = m * (y + step * (T::a31 * k1 + T::a32 * k2));
        k4 = m * (y + step * (T::a41 * k1 + T::a42 * k2 + T::a43 * k3));
        k5 = m * (y + step * (T::a51 * k1 + T::a52 * k2 + T::a53 * k3 + T::a54 * k4));
        k6 = m * (y + step * (T::a61 * k1 + T::a62 * k2 + T::a63 * k3 + T::a64 * k4 + T::a65 * k5));
        ynew = y + step * (T::b1 * k1 + T::b3 * k3 + T::b4 * k4 + T::b5 * k5 + T::b6 * k6);
        k7 = m * ynew;
        err = step * (T::e1 * k1 + T::e3 * k3 + T::e4 * k4 + T::e5 * k5 + T::e6 * k6 + T::e7 * k7);

        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y(i)), std::abs(ynew(i)));
            const double r = std::abs(err(i)) / sc;
            acc += r * r;
        }
        const double err_norm = std::sqrt(acc / static_cast<double>(n));

        if (err_norm <= 1.0) {
            t = last ? tau : t + step;
            y = ynew;
            k1 = k7;
            ++accepted;
            const double grow = err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
            step = std::min(step * grow, cfg.max_step);
        } else {
            ++rejected;
            step *= std::max(0.9 * std::pow(err_norm, -0.2), 0.2);
            if (step < cfg.min_step)
                throw StepSizeUnderflow("rk5_propagate: step " + std::to_string(step) + " below minimum at tau " +
                                        std::to_string(t));
        }
    }
    if (stats) *stats = {accepted, rejected};
    return {psi0.basis, y};
}

enum class Method { Spectral, Rk5 };

inline const char* to_string(Method m) noexcept { return m == Method::Spectral ? "spectral" : "rk5"; }

namespace detail {
inline void require_sorted(std::span<const double> grid) {
    if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("evolve_series: tau grid must be ascending");
    if (!grid.empty() && grid.front() < 0.0) throw std::invalid_argument("evolve_series: tau grid must be >= 0");
}
}  // namespace detail

/// One state per grid point, each evaluated independently from psi0.
inline std::vector<StateVector> evolve_series(const Propagator& prop, const StateVector& psi0,
                                              std::span<const double> grid) {
    detail::require_sorted(grid);
    std::vector<StateVector> out;
    out.reserve(grid.size());
    const Eigen::VectorXcd coeffs = prop.project(psi0);
    for (double tau : grid) out.push_back(tau == 0.0 ? psi0 : prop.evolve_projected(coeffs, tau));
    return out;
}

/// One state per grid point. rk5 carries the running state from point to point.
inline std::vector<StateVector> evolve_series(const Hamiltonian& h, const StateVector& psi0,
                                              std::span<const double> grid, Method method,
                                              const IntegratorConfig& cfg = {}) {
    detail::require_sorted(grid);
    if (method == Method::Spectral) return evolve_series(Propagator(h), psi0, grid);

    std::vector<StateVector> out;
    out.reserve(grid.size());
    StateVector cur = psi0;
    double t = 0.0;
    for (double tau : grid) {
        cur = rk5_propagate(h, cur, tau - t, cfg);
        t = tau;
        out.push_back(cur);
    }
    return out;
}

}  // namespace cloning
