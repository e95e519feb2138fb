#pragma once

#include <cstddef>
#include <span>

#include "selfs/grid.hpp"

namespace selfs {

/// Square neighbourhood of half-width r; the window is (2r+1) x (2r+1), always odd.
struct NbhdSpec {
    int half_width = 0;

    constexpr int window_side() const noexcept { return 2 * half_width + 1; }
    friend bool operator==(const NbhdSpec&, const NbhdSpec&) = default;
};

// Both filters treat pixels beyond the edge as 0. The mean filter always divides
// by (2r+1)^2, which makes it a symmetric (self-adjoint) linear operator.

/// Window maximum. Requires a mask or prob field; kind is preserved.
GridField max_filter(const GridField& field, NbhdSpec spec);

/// Window mean. Accepts any kind; mask input yields a prob field.
GridField mean_filter(const GridField& field, NbhdSpec spec);

namespace detail {
void mean_filter(std::span<const double> in, std::size_t rows, std::size_t cols, int r, std::span<double> out);
void max_filter(std::span<const double> in, std::size_t rows, std::size_t cols, int r, std::span<double> out);
}  // namespace detail

}  // namespace selfs
