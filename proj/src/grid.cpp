#include "selfs/grid.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "selfs/errors.hpp"

namespace selfs {

std::string_view to_string(FieldKind kind) {
    switch (kind) {
        case FieldKind::mask: return "mask";
        case FieldKind::prob: return "prob";
        case FieldKind::real: return "real";
    }
    return "real";
}

FieldKind parse_field_kind(std::string_view text) {
    if (text == "mask") return FieldKind::mask;
    if (text == "prob") return FieldKind::prob;
    if (text == "real") return FieldKind::real;
    throw FormatError("unknown field kind '" + std::string(text) + "' (expected mask, prob or real)");
}

GridField::GridField(std::size_t rows, std::size_t cols, double spacing_deg, FieldKind kind,
                     std::vector<double> values, std::optional<std::vector<std::uint8_t>> eval_mask)
    : rows_(rows),
      cols_(cols),
      spacing_deg_(spacing_deg),
      kind_(kind),
      values_(std::move(values)),
      eval_mask_(std::move(eval_mask)) {
    if (rows_ == 0 || cols_ == 0) throw ValidationError("grid dimensions must be positive");
    if (!(spacing_deg_ > 0.0) || !std::isfinite(spacing_deg_))
        throw ValidationError("grid spacing must be a positive finite number of degrees");
    if (values_.size() != rows_ * cols_)
        throw ValidationError("value count " + std::to_string(values_.size()) + " does not match " +
                              std::to_string(rows_) + "x" + std::to_string(cols_));
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double v = values_[i];
        if (!std::isfinite(v)) throw ValidationError("non-finite value at index " + std::to_string(i));
        if (kind_ == FieldKind::mask && v != 0.0 && v != 1.0)
            throw ValidationError("mask value " + std::to_string(v) + " at index " + std::to_string(i) +
                                  " is not 0 or 1");
        if (kind_ == FieldKind::prob && (v < 0.0 || v > 1.0))
            throw ValidationError("probability " + std::to_string(v) + " at index " + std::to_string(i) +
                                  " is outside [0,1]");
    }
    if (eval_mask_) {
        if (eval_mask_->size() != values_.size()) throw ValidationError("eval mask shape does not match field");
        for (auto m : *eval_mask_)
            if (m > 1) throw ValidationError("eval mask entries must be 0 or 1");
    }
}

GridField GridField::zeros(std::size_t rows, std::size_t cols, double spacing_deg, FieldKind kind) {
    return GridField(rows, cols, spacing_deg, kind, std::vector<double>(rows * cols, 0.0));
}

std::span<const std::uint8_t> GridField::eval_mask() const noexcept {
    if (!eval_mask_) return {};
    return *eval_mask_;
}

std::size_t GridField::scored_count() const noexcept {
    if (!eval_mask_) return values_.size();
    return static_cast<std::size_t>(std::count(eval_mask_->begin(), eval_mask_->end(), std::uint8_t{1}));
}

double GridField::sum() const noexcept { return std::accumulate(values_.begin(), values_.end(), 0.0); }

GridField GridField::with_values(std::vector<double> values, FieldKind kind) const {
    return GridField(rows_, cols_, spacing_deg_, kind, std::move(values), eval_mask_);
}

GridField GridField::with_eval_mask(std::optional<std::vector<std::uint8_t>> mask) const {
    return GridField(rows_, cols_, spacing_deg_, kind_, values_, std::move(mask));
}

WavelengthBand::WavelengthBand(double lo, double hi) : lo_deg(lo), hi_deg(hi) {
    if (std::isnan(lo) || std::isnan(hi) || lo < 0.0 || !std::isfinite(lo))
        throw ArgumentError("wavelength band lower edge must be finite and >= 0");
    if (!(hi > 0.0)) throw ArgumentError("wavelength band upper edge must be > 0");
    if (!(lo < hi)) throw ArgumentError("wavelength band requires lo < hi");
}

// ---------------------------------------------------------------------------
// GRID1 codec

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

namespace {

void append_f32_le(std::string& out, float f) {
    const auto bits = std::bit_cast<std::uint32_t>(f);
    out.push_back(static_cast<char>(bits & 0xFFu));
    out.push_back(static_cast<char>((bits >> 8) & 0xFFu));
    out.push_back(static_cast<char>((bits >> 16) & 0xFFu));
    out.push_back(static_cast<char>((bits >> 24) & 0xFFu));
}

float read_f32_le(const unsigned char* p) {
    const std::uint32_t bits = std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
                               (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
    return std::bit_cast<float>(bits);
}

std::vector<std::string_view> split_spaces(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        const auto j = line.find(' ', i);
        const auto end = j == std::string_view::npos ? line.size() : j;
        if (end == i) throw FormatError("GRID1 header fields must be separated by single spaces");
        tokens.push_back(line.substr(i, end - i));
        if (j == std::string_view::npos) break;
        i = j + 1;
        if (i == line.size()) throw FormatError("GRID1 header has a trailing space");
    }
    return tokens;
}

std::size_t parse_dim(std::string_view tok, const char* what) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || v == 0)
        throw FormatError(std::string("GRID1 header: invalid ") + what + " '" + std::string(tok) + "'");
    return v;
}

}  // namespace

std::string encode_grid(const GridField& field) {
    std::string out = "GRID1\n";
    out += std::to_string(field.rows()) + ' ' + std::to_string(field.cols()) + ' ' +
           format_double(field.spacing_deg()) + ' ' + std::string(to_string(field.kind()));
    if (field.has_eval_mask()) out += " masked";
    out += '\n';
    out.reserve(out.size() + field.size() * (field.has_eval_mask() ? 5 : 4));
    for (double v : field.values()) append_f32_le(out, static_cast<float>(v));
    for (auto m : field.eval_mask()) out.push_back(static_cast<char>(m));
    return out;
}

GridField decode_grid(std::string_view bytes) {
    const auto nl1 = bytes.find('\n');
    if (nl1 == std::string_view::npos || bytes.substr(0, nl1) != "GRID1")
        throw FormatError("missing GRID1 magic line");
    const auto nl2 = bytes.find('\n', nl1 + 1);
    if (nl2 == std::string_view::npos) throw FormatError("GRID1 header line 2 is not newline-terminated");
    const auto tokens = split_spaces(bytes.substr(nl1 + 1, nl2 - nl1 - 1));
    if (tokens.size() != 4 && tokens.size() != 5) throw FormatError("GRID1 header line 2 must have 4 or 5 fields");
    const std::size_t rows = parse_dim(tokens[0], "row count");
    const std::size_t cols = parse_dim(tokens[1], "column count");
    double spacing = 0.0;
    {
        auto [ptr, ec] = std::from_chars(tokens[2].data(), tokens[2].data() + tokens[2].size(), spacing);
        if (ec != std::errc{} || ptr != tokens[2].data() + tokens[2].size() || !(spacing > 0.0) ||
            !std::isfinite(spacing))
            throw FormatError("GRID1 header: invalid spacing '" + std::string(tokens[2]) + "'");
    }
    const FieldKind kind = parse_field_kind(tokens[3]);
    const bool masked = tokens.size() == 5;
    if (masked && tokens[4] != "masked") throw FormatError("GRID1 header: unexpected token '" + std::string(tokens[4]) + "'");

    const std::size_t n = rows * cols;
    const std::string_view payload = bytes.substr(nl2 + 1);
    const std::size_t expected = n * 4 + (masked ? n : 0);
    if (payload.size() < expected)
        throw TruncationError("GRID1 payload has " + std::to_string(payload.size()) + " bytes, expected " +
                              std::to_string(expected));
    if (payload.size() > expected) throw FormatError("GRID1 payload has trailing bytes");

    const auto* p = reinterpret_cast<const unsigned char*>(payload.data());
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = static_cast<double>(read_f32_le(p + 4 * i));
    std::optional<std::vector<std::uint8_t>> mask;
    if (masked) {
        mask.emplace(p + 4 * n, p + 4 * n + n);
        for (auto m : *mask)
            if (m > 1) throw FormatError("GRID1 eval mask bytes must be 0 or 1");
    }
    return GridField(rows, cols, spacing, kind, std::move(values), std::move(mask));
}

GridField read_grid(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return decode_grid(ss.str());
    } catch (const TruncationError& e) {
        throw TruncationError(path.string() + ": " + e.what());
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void write_grid(const GridField& field, const std::filesystem::path& path) {
    write_file_atomic(path, encode_grid(field));
}

// ---------------------------------------------------------------------------
// Tapering

PadOffsets pad_offsets(std::size_t src_rows, std::size_t src_cols, std::size_t dst_rows,
                       std::size_t dst_cols) {
    if (dst_rows < src_rows || dst_cols < src_cols)
        throw ArgumentError("padded dimensions must be >= the original dimensions");
    return {(dst_rows - src_rows) / 2, (dst_cols - src_cols) / 2};
}

GridField taper_zero_pad(const GridField& field, std::size_t target_rows, std::size_t target_cols) {
    if (target_rows < field.rows() || target_cols < field.cols())
        throw ArgumentError("taper target " + std::to_string(target_rows) + "x" + std::to_string(target_cols) +
                            " is smaller than the field");
    const auto off = pad_offsets(field.rows(), field.cols(), target_rows, target_cols);
    std::vector<double> out(target_rows * target_cols, 0.0);
    std::optional<std::vector<std::uint8_t>> mask;
    if (field.has_eval_mask()) mask.emplace(target_rows * target_cols, std::uint8_t{0});
    const auto src_mask = field.eval_mask();
    for (std::size_t r = 0; r < field.rows(); ++r) {
        for (std::size_t c = 0; c < field.cols(); ++c) {
            const std::size_t dst = (r + off.top) * target_cols + c + off.left;
            out[dst] = field(r, c);
            if (mask) (*mask)[dst] = src_mask[r * field.cols() + c];
        }
    }
    return GridField(target_rows, target_cols, field.spacing_deg(), field.kind(), std::move(out), std::move(mask));
}

GridField crop_taper(const GridField& field, std::size_t orig_rows, std::size_t orig_cols) {
    if (orig_rows == 0 || orig_cols == 0 || orig_rows > field.rows() || orig_cols > field.cols())
        throw ArgumentError("crop dimensions must be positive and no larger than the field");
    const auto off = pad_offsets(orig_rows, orig_cols, field.rows(), field.cols());
    std::vector<double> out(orig_rows * orig_cols);
    std::optional<std::vector<std::uint8_t>> mask;
    if (field.has_eval_mask()) mask.emplace(orig_rows * orig_cols);
    const auto src_mask = field.eval_mask();
    for (std::size_t r = 0; r < orig_rows; ++r) {
        for (std::size_t c = 0; c < orig_cols; ++c) {
            const std::size_t src = (r + off.top) * field.cols() + c + off.left;
            out[r * orig_cols + c] = field[src];
            if (mask) (*mask)[r * orig_cols + c] = src_mask[src];
        }
    }
    return GridField(orig_rows, orig_cols, field.spacing_deg(), field.kind(), std::move(out), std::move(mask));
}

std::pair<std::size_t, std::size_t> next_pow2_dims(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw ArgumentError("dimensions must be >= 1");
    return {std::bit_ceil(rows), std::bit_ceil(cols)};
}

}  // namespace selfs
