#include "selfs/nbhd.hpp"

#include <algorithm>
#include <vector>

#include "selfs/errors.hpp"

namespace selfs {

namespace detail {

namespace {

// Separable pass along rows then columns. Combine is sum or max; the zero
// boundary is the identity for both because inputs of max are >= 0.
template <typename Combine>
void separable(std::span<const double> in, std::size_t rows, std::size_t cols, int r, std::span<double> out,
               Combine combine) {
    const auto rr = static_cast<std::ptrdiff_t>(r);
    const auto nr = static_cast<std::ptrdiff_t>(rows);
    const auto nc = static_cast<std::ptrdiff_t>(cols);
    std::vector<double> tmp(rows * cols);
    for (std::ptrdiff_t i = 0; i < nr; ++i) {
        const double* row = in.data() + i * nc;
        for (std::ptrdiff_t j = 0; j < nc; ++j) {
            double acc = 0.0;
            const auto lo = std::max<std::ptrdiff_t>(0, j - rr);
            const auto hi = std::min<std::ptrdiff_t>(nc - 1, j + rr);
            for (auto k = lo; k <= hi; ++k) acc = combine(acc, row[k]);
            tmp[i * nc + j] = acc;
        }
    }
    for (std::ptrdiff_t i = 0; i < nr; ++i) {
        const auto lo = std::max<std::ptrdiff_t>(0, i - rr);
        const auto hi = std::min<std::ptrdiff_t>(nr - 1, i + rr);
        for (std::ptrdiff_t j = 0; j < nc; ++j) {
            double acc = 0.0;
            for (auto k = lo; k <= hi; ++k) acc = combine(acc, tmp[k * nc + j]);
            out[i * nc + j] = acc;
        }
    }
}

}  // namespace

void mean_filter(std::span<const double> in, std::size_t rows, std::size_t cols, int r, std::span<double> out) {
    if (r == 0) {
        std::copy(in.begin(), in.end(), out.begin());
        return;
    }
    separable(in, rows, cols, r, out, [](double a, double b) { return a + b; });
    const double side = 2.0 * r + 1.0;
    const double inv_area = 1.0 / (side * side);
    for (auto& v : out) v *= inv_area;
}

void max_filter(std::span<const double> in, std::size_t rows, std::size_t cols, int r, std::span<double> out) {
    if (r == 0) {
        std::copy(in.begin(), in.end(), out.begin());
        return;
    }
    separable(in, rows, cols, r, out, [](double a, double b) { return std::max(a, b); });
}

}  // namespace detail

namespace {
void check_half_width(NbhdSpec spec) {
    if (spec.half_width < 0) throw ArgumentError("neighbourhood half-width must be >= 0");
}
}  // namespace

GridField max_filter(const GridField& field, NbhdSpec spec) {
    check_half_width(spec);
    if (field.kind() == FieldKind::real)
        throw ArgumentError("max_filter requires a mask or prob field (zero boundary assumes values >= 0)");
    std::vector<double> out(field.size());
    detail::max_filter(field.values(), field.rows(), field.cols(), spec.half_width, out);
    return field.with_values(std::move(out), field.kind());
}

GridField mean_filter(const GridField& field, NbhdSpec spec) {
    check_half_width(spec);
    std::vector<double> out(field.size());
    detail::mean_filter(field.values(), field.rows(), field.cols(), spec.half_width, out);
    FieldKind kind = field.kind();
    if (kind == FieldKind::mask && spec.half_width > 0) kind = FieldKind::prob;
    if (kind == FieldKind::prob)
        for (auto& v : out) v = std::clamp(v, 0.0, 1.0);  // rounding can overshoot 1 by an ulp
    return field.with_values(std::move(out), kind);
}

}  // namespace selfs
