#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "selfs/grid.hpp"
#include "selfs/nbhd.hpp"
#include "selfs/scores.hpp"

namespace selfs {

enum class SpectralMethod { fourier, wavelet };

struct SpectralFilter {
    WavelengthBand band;
    SpectralMethod method = SpectralMethod::fourier;

    friend bool operator==(const SpectralFilter&, const SpectralFilter&) = default;
};

using FilterSpec = std::variant<NbhdSpec, SpectralFilter>;

/// "nbhd_r4", "F0.1-0.2", "W0-0.025", "W1.6-inf".
std::string filter_id(const FilterSpec& filter);
FilterSpec parse_filter_id(std::string_view id);

/**
 * One loss/metric configuration: a score paired with a spatial filter.
 *
 * Canonical id grammar: `<score>_<filter>` where `<filter>` is
 * `nbhd_r<half-width>`, `F<lo>-<hi>` (Fourier) or `W<lo>-<hi>` (wavelet), band
 * edges in degrees with `0`/`inf` for open ends, e.g. `fss_nbhd_r4`,
 * `brier_W0.1-inf`. Score names parse case-insensitively.
 */
struct LossSpec {
    ScoreKind score = ScoreKind::brier;
    FilterSpec filter = NbhdSpec{0};

    std::string id() const;
    bool is_neighbourhood() const { return std::holds_alternative<NbhdSpec>(filter); }
    friend bool operator==(const LossSpec&, const LossSpec&) = default;
};

/// Rejects Heidke/Peirce/Gerrity with a neighbourhood filter.
LossSpec make_loss_spec(ScoreKind score, FilterSpec filter);
LossSpec parse_loss_spec(std::string_view id);

/// Neighbourhood half-widths 0 (pixelwise), 1, 2, 3, 4, 6, 8, 12.
const std::vector<int>& standard_half_widths();
/// The 16 wavelength bands in degrees: 8 disjoint dyadic bands, 4 low-pass, 4 high-pass.
const std::vector<WavelengthBand>& standard_bands();

/// 6 scores x 8 half-widths, then 9 scores x 16 bands for Fourier and for wavelet: 336 in total.
std::vector<LossSpec> enumerate_configs();
/// The 40 distinct filters used by enumerate_configs (8 neighbourhood + 32 spectral).
std::vector<FilterSpec> enumerate_filters();

/// Spectral band-pass of any field, clamped to [0,1]. `clamp_magnitude` gets the largest correction.
GridField apply_spectral_filter(const GridField& field, const SpectralFilter& filter, double* clamp_magnitude = nullptr);

/// Observation as seen by the loss: spectral filters are applied once, outside
/// the loss; neighbourhood filters stay inside the loss so `filtered` is the raw mask.
struct PreparedTarget {
    GridField original;
    GridField filtered;
    FilterSpec filter;
    double clamp_magnitude = 0.0;
};

PreparedTarget prepare_target(const LossSpec& spec, const GridField& y);

/// Score -> loss: negatively oriented scores are used as-is, others as 1 - s.
double loss_from_score(ScoreKind kind, double score);

double loss_value(const LossSpec& spec, const GridField& p, const PreparedTarget& t);
ScoreResult loss_score(const LossSpec& spec, const GridField& p, const PreparedTarget& t);

/// Exact d(loss)/d(p_g) for every pixel. Subgradient conventions: max(p, y)
/// ties split 0.5; neighbourhood-maximum ties split equally between the tied pixels.
GridField loss_gradient(const LossSpec& spec, const GridField& p, const PreparedTarget& t);

struct GradCheckReport {
    double max_abs_err = 0.0;
    double max_rel_err = 0.0;
    double roundoff = 0.0;  ///< largest per-pixel uncertainty of the difference quotient
    std::size_t worst_row = 0;
    std::size_t worst_col = 0;
    std::size_t checked = 0;
    std::size_t excluded = 0;
};

/**
 * Central differences against loss_gradient (stencil reaches p +- 2h). Pixels within 2h of a
 * non-smooth point (max ties, log clamp edges, the [0,1] boundary) are skipped
 * and counted in `excluded`.
 *
 * The difference quotient D_h is itself uncertain by its round-off,
 * 4 * eps * (|L(p+h)| + |L(p-h)|) / (2h), plus its truncation error, estimated
 * as |D_h - D_2h| / 3. Relative error is the part of |analytic - D_h| above
 * that uncertainty, divided by
 * max(|analytic|, |numeric|, 1e-6 * max_g |analytic_g|).
 */
GridField grad_check_exclusions(const LossSpec& spec, const GridField& p, const PreparedTarget& t, double h);
GradCheckReport grad_check(const LossSpec& spec, const GridField& p, const PreparedTarget& t, double h = 1e-5);

/// Where spectral filters are applied when a configuration is used as a verification metric.
enum class FilterPlacement {
    observations_only,  ///< training-time design: filter the target once, outside the loss
    /// Filters predictions and observations inside the metric. This is how
    /// post hoc metrics are evaluated; as a *training* loss it leaves the
    /// model free to put arbitrary signal at the censored scales.
    both_fields,
};

ScoreResult evaluate_metric(const LossSpec& spec, const GridField& p, const GridField& y,
                            FilterPlacement placement = FilterPlacement::both_fields);

/// Clamped spectral filterings of one field, keyed by filter_id().
using SpectralSet = std::map<std::string, GridField>;
SpectralSet spectral_set(const GridField& field, std::span<const LossSpec> specs);

/// Batched evaluate_metric. `p_filtered` null means observations_only placement.
std::vector<ScoreResult> evaluate_metrics(std::span<const LossSpec> specs, const GridField& p, const GridField& y,
                                          const SpectralSet& y_filtered, const SpectralSet* p_filtered);

}  // namespace selfs
