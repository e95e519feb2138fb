#include "selfs/wavelet.hpp"

#include <bit>
#include <cmath>
#include <optional>
#include <string>

#include "selfs/errors.hpp"

namespace selfs {

namespace {

// Band edges and dyadic wavelengths are compared with a small relative slack so
// that 0.0125 * 2^k lands on the decimal edges of the standard band list.
constexpr double kEdgeSlack = 1e-9;

bool exceeds(double wavelength, double edge) { return wavelength > edge * (1.0 + kEdgeSlack); }
bool at_or_below(double wavelength, double edge) { return wavelength <= edge * (1.0 + kEdgeSlack); }

GridField zeros_like(const GridField& f) { return GridField::zeros(f.rows(), f.cols(), f.spacing_deg()); }

}  // namespace

HaarSubbands haar_forward(const GridField& field) {
    const auto rows = field.rows();
    const auto cols = field.cols();
    if (rows % 2 != 0 || cols % 2 != 0)
        throw ArgumentError("haar_forward needs even dimensions, got " + std::to_string(rows) + "x" +
                            std::to_string(cols));
    const auto hr = rows / 2;
    const auto hc = cols / 2;
    std::vector<double> ll(hr * hc), lh(hr * hc), hl(hr * hc), hh(hr * hc);
    for (std::size_t i = 0; i < hr; ++i) {
        for (std::size_t j = 0; j < hc; ++j) {
            const double a = field(2 * i, 2 * j);
            const double b = field(2 * i, 2 * j + 1);
            const double c = field(2 * i + 1, 2 * j);
            const double d = field(2 * i + 1, 2 * j + 1);
            const auto o = i * hc + j;
            ll[o] = 0.5 * (a + b + c + d);
            lh[o] = 0.5 * (a + b - c - d);
            hl[o] = 0.5 * (a - b + c - d);
            hh[o] = 0.5 * (a - b - c + d);
        }
    }
    const double s = 2.0 * field.spacing_deg();
    return {GridField(hr, hc, s, FieldKind::real, std::move(ll)), GridField(hr, hc, s, FieldKind::real, std::move(lh)),
            GridField(hr, hc, s, FieldKind::real, std::move(hl)), GridField(hr, hc, s, FieldKind::real, std::move(hh))};
}

GridField haar_inverse(const HaarSubbands& bands) {
    const auto hr = bands.ll.rows();
    const auto hc = bands.ll.cols();
    if (!bands.lh.same_shape(bands.ll) || !bands.hl.same_shape(bands.ll) || !bands.hh.same_shape(bands.ll))
        throw ArgumentError("haar_inverse needs four subbands of identical shape");
    const auto cols = 2 * hc;
    std::vector<double> out(4 * hr * hc);
    for (std::size_t i = 0; i < hr; ++i) {
        for (std::size_t j = 0; j < hc; ++j) {
            const double s = bands.ll(i, j);
            const double v = bands.lh(i, j);
            const double h = bands.hl(i, j);
            const double x = bands.hh(i, j);
            out[(2 * i) * cols + 2 * j] = 0.5 * (s + v + h + x);
            out[(2 * i) * cols + 2 * j + 1] = 0.5 * (s + v - h - x);
            out[(2 * i + 1) * cols + 2 * j] = 0.5 * (s - v + h - x);
            out[(2 * i + 1) * cols + 2 * j + 1] = 0.5 * (s - v - h + x);
        }
    }
    return GridField(2 * hr, cols, bands.ll.spacing_deg() / 2.0, FieldKind::real, std::move(out));
}

int max_levels(std::size_t rows, std::size_t cols) {
    if (!std::has_single_bit(rows) || !std::has_single_bit(cols))
        throw ArgumentError("wavelet pyramid needs power-of-two dimensions, got " + std::to_string(rows) + "x" +
                            std::to_string(cols));
    return std::countr_zero(std::min(rows, cols));
}

WaveletPyramid haar_pyramid(const GridField& field, int n_levels) {
    const int available = max_levels(field.rows(), field.cols());
    if (n_levels < 1 || n_levels > available)
        throw ArgumentError("requested " + std::to_string(n_levels) + " levels, grid supports 1.." +
                            std::to_string(available));
    WaveletPyramid pyr;
    pyr.base_spacing_deg = field.spacing_deg();
    pyr.levels.reserve(static_cast<std::size_t>(n_levels));
    pyr.levels.push_back(haar_forward(field.with_values(
        std::vector<double>(field.values().begin(), field.values().end()), FieldKind::real)
                                          .with_eval_mask(std::nullopt)));
    for (int k = 2; k <= n_levels; ++k) pyr.levels.push_back(haar_forward(pyr.levels.back().ll));
    return pyr;
}

GridField reconstruct(const WaveletPyramid& pyramid) {
    if (pyramid.levels.empty()) throw ArgumentError("empty wavelet pyramid");
    GridField ll = pyramid.levels.back().ll;
    for (int k = pyramid.depth(); k >= 1; --k) {
        const auto& lv = pyramid.level(k);
        ll = haar_inverse({ll, lv.lh, lv.hl, lv.hh});
    }
    return ll;
}

std::pair<double, double> level_wavelengths(int level, double spacing_deg) {
    if (level < 1) throw ArgumentError("wavelet level must be >= 1");
    const double small = std::ldexp(spacing_deg, level);
    return {small, 2.0 * small};
}

WaveletPyramid filter_pyramid(WaveletPyramid pyr, const WavelengthBand& band) {
    const int depth = pyr.depth();
    const double delta = pyr.base_spacing_deg;

    // a. LL above the band top carries only wavelengths longer than the band.
    std::vector<bool> ll_kept(static_cast<std::size_t>(depth) + 1, true);
    for (int k = 1; k <= depth; ++k) {
        if (exceeds(level_wavelengths(k, delta).second, band.hi_deg)) {
            auto& lv = pyr.level(k);
            lv.ll = zeros_like(lv.ll);
            ll_kept[static_cast<std::size_t>(k)] = false;
        }
    }

    // b/c. Deepest level first: rebuild surviving LL from the level below,
    // then drop details that are at or under the band bottom.
    for (int k = depth; k >= 1; --k) {
        auto& lv = pyr.level(k);
        if (k < depth && ll_kept[static_cast<std::size_t>(k)]) lv.ll = haar_inverse(pyr.level(k + 1));
        if (!band.unbounded_below() && at_or_below(level_wavelengths(k, delta).first, band.lo_deg)) {
            lv.lh = zeros_like(lv.lh);
            lv.hl = zeros_like(lv.hl);
            lv.hh = zeros_like(lv.hh);
        }
    }
    return pyr;
}

std::vector<GridField> wavelet_band_pass(const GridField& field, std::span<const WavelengthBand> bands) {
    const auto [pr, pc] = next_pow2_dims(field.rows(), field.cols());
    const auto padded = taper_zero_pad(field, pr, pc);
    const int depth = max_levels(pr, pc);
    std::optional<WaveletPyramid> pyramid;
    if (depth > 0) pyramid = haar_pyramid(padded, depth);

    std::vector<GridField> out;
    out.reserve(bands.size());
    for (const auto& band : bands) {
        GridField full = padded;
        if (pyramid) {
            full = haar_inverse(filter_pyramid(*pyramid, band).level(1));
        } else if (!band.unbounded_below()) {
            // A 1-pixel axis has no decomposition; only an all-pass band keeps it.
            full = zeros_like(padded);
        }
        for (double v : full.values())
            if (!std::isfinite(v)) throw NumericError("wavelet band-pass: non-finite value after inverse transform");
        const auto cropped = crop_taper(full.with_eval_mask(std::nullopt), field.rows(), field.cols());
        out.push_back(
            field.with_values(std::vector<double>(cropped.values().begin(), cropped.values().end()), FieldKind::real));
    }
    return out;
}

GridField wavelet_band_pass(const GridField& field, const WavelengthBand& band) {
    return std::move(wavelet_band_pass(field, std::span<const WavelengthBand>(&band, 1)).front());
}

}  // namespace selfs
