#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace selfs {

enum class FieldKind { mask, prob, real };

std::string_view to_string(FieldKind kind);
FieldKind parse_field_kind(std::string_view text);

/**
 * Row-major 2-D raster with isotropic grid spacing in degrees.
 *
 * The constructor enforces the kind invariants (mask values in {0,1}, prob
 * values in [0,1], everything finite) so a GridField that exists is valid.
 * Pixels whose eval mask entry is 0 are excluded from every score sum.
 */
class GridField {
public:
    GridField(std::size_t rows, std::size_t cols, double spacing_deg, FieldKind kind,
              std::vector<double> values,
              std::optional<std::vector<std::uint8_t>> eval_mask = std::nullopt);

    static GridField zeros(std::size_t rows, std::size_t cols, double spacing_deg,
                           FieldKind kind = FieldKind::real);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return values_.size(); }
    double spacing_deg() const noexcept { return spacing_deg_; }
    FieldKind kind() const noexcept { return kind_; }

    std::span<const double> values() const noexcept { return values_; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    bool has_eval_mask() const noexcept { return eval_mask_.has_value(); }
    /// Empty span when no eval mask is attached.
    std::span<const std::uint8_t> eval_mask() const noexcept;
    bool scored(std::size_t i) const noexcept { return !eval_mask_ || (*eval_mask_)[i] != 0; }
    std::size_t scored_count() const noexcept;

    double sum() const noexcept;
    bool same_shape(const GridField& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    /// New field with the same geometry and eval mask but different values/kind.
    GridField with_values(std::vector<double> values, FieldKind kind) const;
    GridField with_eval_mask(std::optional<std::vector<std::uint8_t>> mask) const;

    friend bool operator==(const GridField&, const GridField&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    double spacing_deg_;
    FieldKind kind_;
    std::vector<double> values_;
    std::optional<std::vector<std::uint8_t>> eval_mask_;
};

/// Wavelength band in degrees. lo = 0 means unbounded below, hi = inf unbounded above.
struct WavelengthBand {
    double lo_deg = 0.0;
    double hi_deg = std::numeric_limits<double>::infinity();

    WavelengthBand() = default;
    WavelengthBand(double lo, double hi);

    bool unbounded_below() const noexcept { return lo_deg == 0.0; }
    bool unbounded_above() const noexcept { return hi_deg == std::numeric_limits<double>::infinity(); }

    friend bool operator==(const WavelengthBand&, const WavelengthBand&) = default;
};

// GRID1 codec. Values are stored as little-endian float32, so in-memory doubles
// are quantized on write; anything read back from a file round-trips exactly.
std::string encode_grid(const GridField& field);
GridField decode_grid(std::string_view bytes);
GridField read_grid(const std::filesystem::path& path);
void write_grid(const GridField& field, const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Writes `bytes` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

struct PadOffsets {
    std::size_t top;
    std::size_t left;
};

/// Centered placement; an odd remainder goes to the bottom/right.
PadOffsets pad_offsets(std::size_t src_rows, std::size_t src_cols, std::size_t dst_rows,
                       std::size_t dst_cols);

GridField taper_zero_pad(const GridField& field, std::size_t target_rows, std::size_t target_cols);
GridField crop_taper(const GridField& field, std::size_t orig_rows, std::size_t orig_cols);

std::pair<std::size_t, std::size_t> next_pow2_dims(std::size_t rows, std::size_t cols);

}  // namespace selfs
