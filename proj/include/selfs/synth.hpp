#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "selfs/grid.hpp"

namespace selfs {

/// Random convective cells: discs, or rotated ellipses when elongation > 1.
struct SynthSpec {
    std::size_t rows = 205;
    std::size_t cols = 205;
    double spacing_deg = 0.0125;
    int n_cells = 6;
    double radius_min_px = 3.0;
    double radius_max_px = 10.0;
    double elongation_min = 1.0;  ///< major/minor axis ratio
    double elongation_max = 1.0;
    std::uint64_t seed = 0;
};

struct Cell {
    double row;       ///< centre, pixel coordinates
    double col;
    double radius;    ///< minor semi-axis in pixels
    double elongation;
    double angle;     ///< major-axis orientation in radians
};

std::vector<Cell> synth_cells(const SynthSpec& spec);

/// Pixel (i, j) is inside a cell when its rotated, scaled offset from the centre has norm <= radius.
GridField rasterize_cells(std::span<const Cell> cells, std::size_t rows, std::size_t cols, double spacing_deg);

GridField synth_mask(const SynthSpec& spec);

double event_fraction(const GridField& mask);

/// Shift by (dy, dx) pixels; vacated pixels become 0.
GridField translate(const GridField& field, int dy, int dx);

struct ProbSpec {
    int blur_r = 0;
    int offset_rows = 0;
    int offset_cols = 0;
    double noise_sd = 0.0;
    std::uint64_t seed = 0;
};

/// Forecast stand-in: translate the mask, mean-filter, add Gaussian noise, clamp to [0,1].
GridField synth_prob(const GridField& mask, const ProbSpec& spec);

}  // namespace selfs
