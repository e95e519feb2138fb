#include "selfs/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "selfs/errors.hpp"
#include "selfs/nbhd.hpp"
#include "selfs/rng.hpp"

namespace selfs {

namespace {

void validate(const SynthSpec& s) {
    if (s.rows == 0 || s.cols == 0) throw ArgumentError("synthetic grid needs positive dimensions");
    if (s.n_cells < 0) throw ArgumentError("cell count must be >= 0");
    if (!(s.radius_min_px > 0.0) || s.radius_max_px < s.radius_min_px)
        throw ArgumentError("cell radius range must satisfy 0 < min <= max");
    if (s.elongation_min < 1.0 || s.elongation_max < s.elongation_min)
        throw ArgumentError("elongation range must satisfy 1 <= min <= max");
}

}  // namespace

std::vector<Cell> synth_cells(const SynthSpec& spec) {
    validate(spec);
    auto eng = stream_engine(spec.seed, 0);
    std::vector<Cell> cells;
    cells.reserve(static_cast<std::size_t>(spec.n_cells));
    for (int k = 0; k < spec.n_cells; ++k) {
        Cell c{};
        c.row = uniform(eng, 0.0, static_cast<double>(spec.rows - 1));
        c.col = uniform(eng, 0.0, static_cast<double>(spec.cols - 1));
        c.radius = uniform(eng, spec.radius_min_px, spec.radius_max_px);
        c.elongation = uniform(eng, spec.elongation_min, spec.elongation_max);
        c.angle = uniform(eng, 0.0, std::numbers::pi);
        cells.push_back(c);
    }
    return cells;
}

GridField rasterize_cells(std::span<const Cell> cells, std::size_t rows, std::size_t cols, double spacing_deg) {
    std::vector<double> v(rows * cols, 0.0);
    for (const auto& c : cells) {
        const double reach = c.radius * c.elongation;
        const auto r0 = static_cast<long>(std::floor(std::max(0.0, c.row - reach)));
        const auto r1 = static_cast<long>(std::ceil(std::min(double(rows - 1), c.row + reach)));
        const auto c0 = static_cast<long>(std::floor(std::max(0.0, c.col - reach)));
        const auto c1 = static_cast<long>(std::ceil(std::min(double(cols - 1), c.col + reach)));
        const double ca = std::cos(c.angle), sa = std::sin(c.angle);
        for (long i = r0; i <= r1; ++i) {
            for (long j = c0; j <= c1; ++j) {
                const double di = static_cast<double>(i) - c.row;
                const double dj = static_cast<double>(j) - c.col;
                const double along = (dj * ca + di * sa) / c.elongation;
                const double across = -dj * sa + di * ca;
                if (along * along + across * across <= c.radius * c.radius)
                    v[static_cast<std::size_t>(i) * cols + static_cast<std::size_t>(j)] = 1.0;
            }
        }
    }
    return GridField(rows, cols, spacing_deg, FieldKind::mask, std::move(v));
}

GridField synth_mask(const SynthSpec& spec) {
    const auto cells = synth_cells(spec);
    return rasterize_cells(cells, spec.rows, spec.cols, spec.spacing_deg);
}

double event_fraction(const GridField& mask) {
    double events = 0.0, scored = 0.0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask.scored(i)) continue;
        events += mask[i];
        scored += 1.0;
    }
    return scored == 0.0 ? 0.0 : events / scored;
}

GridField translate(const GridField& field, int dy, int dx) {
    const auto rows = static_cast<long>(field.rows());
    const auto cols = static_cast<long>(field.cols());
    std::vector<double> v(field.size(), 0.0);
    for (long i = 0; i < rows; ++i) {
        const long si = i - dy;
        if (si < 0 || si >= rows) continue;
        for (long j = 0; j < cols; ++j) {
            const long sj = j - dx;
            if (sj < 0 || sj >= cols) continue;
            v[static_cast<std::size_t>(i * cols + j)] = field(static_cast<std::size_t>(si), static_cast<std::size_t>(sj));
        }
    }
    return field.with_values(std::move(v), field.kind());
}

GridField synth_prob(const GridField& mask, const ProbSpec& spec) {
    if (mask.kind() == FieldKind::real) throw ArgumentError("synth_prob needs a mask or probability field");
    if (spec.blur_r < 0) throw ArgumentError("blur half-width must be >= 0");
    if (!(spec.noise_sd >= 0.0)) throw ArgumentError("noise standard deviation must be >= 0");
    const auto shifted = translate(mask, spec.offset_rows, spec.offset_cols);
    const auto blurred = spec.blur_r > 0 ? mean_filter(shifted, NbhdSpec{spec.blur_r}) : shifted;
    std::vector<double> v(blurred.values().begin(), blurred.values().end());
    if (spec.noise_sd > 0.0) {
        auto eng = stream_engine(spec.seed, 1);
        for (auto& x : v) x += spec.noise_sd * standard_normal(eng);
    }
    for (auto& x : v) x = std::clamp(x, 0.0, 1.0);
    return blurred.with_values(std::move(v), FieldKind::prob);
}

}  // namespace selfs
