#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "selfs/grid.hpp"

namespace selfs {

/**
 * One level of the orthonormal 2-D Haar transform.
 *
 * For each 2x2 block (a b / c d), with a top-left and rows running downward:
 *   LL = (a+b+c+d)/2   mean along both axes
 *   LH = (a+b-c-d)/2   mean horizontally, detail vertically
 *   HL = (a-b+c-d)/2   detail horizontally, mean vertically
 *   HH = (a-b-c+d)/2   detail along both axes
 */
struct HaarSubbands {
    GridField ll;
    GridField lh;
    GridField hl;
    GridField hh;
};

/// levels[0] is level 1 (finest). Every level keeps its LL.
struct WaveletPyramid {
    double base_spacing_deg = 0.0;
    std::vector<HaarSubbands> levels;

    int depth() const noexcept { return static_cast<int>(levels.size()); }
    HaarSubbands& level(int k) { return levels.at(static_cast<std::size_t>(k - 1)); }
    const HaarSubbands& level(int k) const { return levels.at(static_cast<std::size_t>(k - 1)); }
};

HaarSubbands haar_forward(const GridField& field);
GridField haar_inverse(const HaarSubbands& bands);

/// Number of levels a power-of-two grid supports: log2(min(rows, cols)).
int max_levels(std::size_t rows, std::size_t cols);

/// Both dims must be powers of two with log2(min dim) >= n_levels.
WaveletPyramid haar_pyramid(const GridField& field, int n_levels);

/// Composed inverse from the deepest level up, using the stored deepest LL.
GridField reconstruct(const WaveletPyramid& pyramid);

/// (delta * 2^k, delta * 2^(k+1)): detail and LL wavelengths represented at level k.
std::pair<double, double> level_wavelengths(int level, double spacing_deg);

/**
 * Coefficient filtering on a full pyramid. Afterwards level 1 holds the
 * filtered coefficients, and haar_inverse(level(1)) is the band-passed field.
 *
 *  a. LL is zeroed at every level whose LL wavelength exceeds the band top.
 *  b. From the deepest level upward, every level whose LL survived step a is
 *     rebuilt from all coefficients of the level below it.
 *  c. Detail coefficients at levels whose detail wavelength is <= the band
 *     bottom are zeroed (after that level's LL is rebuilt).
 */
WaveletPyramid filter_pyramid(WaveletPyramid pyramid, const WavelengthBand& band);

/// Pads to the next power of two, filters a full pyramid, inverts and crops. Output kind is real.
GridField wavelet_band_pass(const GridField& field, const WavelengthBand& band);

/// Several bands sharing one forward decomposition.
std::vector<GridField> wavelet_band_pass(const GridField& field, std::span<const WavelengthBand> bands);

}  // namespace selfs
