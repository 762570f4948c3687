#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace cloning {

/// p(k, l): probability of k photons in the clone mode and l in the
/// orthogonal mode. Dense over 0 <= k, l <= max_photons; reads outside that
/// range return 0.
class ProbabilityTable {
public:
    ProbabilityTable() = default;
    explicit ProbabilityTable(int max_photons)
        : max_(max_photons), p_(static_cast<std::size_t>((max_photons + 1) * (max_photons + 1)), 0.0) {
        if (max_photons < 0) throw std::invalid_argument("ProbabilityTable: negative photon cap");
    }

    int max_photons() const noexcept { return max_; }

    double operator()(int k, int l) const noexcept {
        if (k < 0 || l < 0 || k > max_ || l > max_) return 0.0;
        return p_[slot(k, l)];
    }

    void add(int k, int l, double p) {
        if (k < 0 || l < 0 || k > max_ || l > max_) throw std::out_of_range("ProbabilityTable: photon count out of range");
        p_[slot(k, l)] += p;
    }

    void set(int k, int l, double p) {
        if (k < 0 || l < 0 || k > max_ || l > max_) throw std::out_of_range("ProbabilityTable: photon count out of range");
        p_[slot(k, l)] = p;
    }

    /// Sum in fixed (k major, l minor) order.
    double total() const noexcept {
        double s = 0.0;
        for (double v : p_) s += v;
        return s;
    }

    ProbabilityTable& operator+=(const ProbabilityTable& other) {
        if (max_ < other.max_) grow(other.max_);
        for (int k = 0; k <= other.max_; ++k)
            for (int l = 0; l <= other.max_; ++l) p_[slot(k, l)] += other(k, l);
        return *this;
    }

    ProbabilityTable& operator*=(double w) noexcept {
        for (double& v : p_) v *= w;
        return *this;
    }

    /// Visits every (k, l, p) in fixed order.
    template <class F>
    void for_each(F&& f) const {
        for (int k = 0; k <= max_; ++k)
            for (int l = 0; l <= max_; ++l) f(k, l, p_[slot(k, l)]);
    }

private:
    std::size_t slot(int k, int l) const noexcept { return static_cast<std::size_t>(k * (max_ + 1) + l); }

    void grow(int new_max) {
        ProbabilityTable bigger(new_max);
        for_each([&](int k, int l, double p) { bigger.p_[bigger.slot(k, l)] = p; });
        *this = std::move(bigger);
    }

    int max_ = 0;
    std::vector<double> p_ = std::vector<double>(1, 0.0);
};

}  // namespace cloning
