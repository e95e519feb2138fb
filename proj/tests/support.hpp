#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "selfs/grid.hpp"

namespace selfs::testing {

// Hand-rolled generators for the property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : eng_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) {
        return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(eng_);
    }
    std::size_t index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(eng_);
    }
    bool coin(double p = 0.5) { return uniform() < p; }

    GridField real(std::size_t rows, std::size_t cols, double spacing = 0.0125) {
        std::vector<double> v(rows * cols);
        for (auto& x : v) x = uniform(-1.0, 1.0);
        return {rows, cols, spacing, FieldKind::real, std::move(v)};
    }
    GridField prob(std::size_t rows, std::size_t cols, double lo = 0.0, double hi = 1.0, double spacing = 0.0125) {
        std::vector<double> v(rows * cols);
        for (auto& x : v) x = uniform(lo, hi);
        return {rows, cols, spacing, FieldKind::prob, std::move(v)};
    }
    GridField mask(std::size_t rows, std::size_t cols, double rate = 0.3, double spacing = 0.0125) {
        std::vector<double> v(rows * cols);
        for (auto& x : v) x = coin(rate) ? 1.0 : 0.0;
        return {rows, cols, spacing, FieldKind::mask, std::move(v)};
    }
    std::vector<std::uint8_t> eval_mask(std::size_t n, double keep = 0.8) {
        std::vector<std::uint8_t> m(n);
        for (auto& b : m) b = coin(keep) ? 1 : 0;
        return m;
    }
    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace selfs::testing
