#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "selfs/grid.hpp"
#include "selfs/nbhd.hpp"

namespace selfs {

enum class ScoreKind { brier, fss, iou, dice, csi, xent, heidke, peirce, gerrity };

inline constexpr std::array<ScoreKind, 9> kAllScoreKinds = {
    ScoreKind::brier, ScoreKind::fss,    ScoreKind::iou,    ScoreKind::dice,    ScoreKind::csi,
    ScoreKind::xent,  ScoreKind::heidke, ScoreKind::peirce, ScoreKind::gerrity};

/// The six scores that also have a neighbourhood form.
inline constexpr std::array<ScoreKind, 6> kNbhdScoreKinds = {ScoreKind::brier, ScoreKind::fss,  ScoreKind::iou,
                                                             ScoreKind::dice,  ScoreKind::csi,  ScoreKind::xent};

std::string_view to_string(ScoreKind kind);
ScoreKind parse_score_kind(std::string_view text);  // case-insensitive

/// Brier and cross-entropy: lower is better. Everything else: higher is better.
bool negatively_oriented(ScoreKind kind);

/// Heidke, Peirce and Gerrity need true negatives and have no neighbourhood form.
bool supports_neighbourhood(ScoreKind kind);

/// Clamp applied to probabilities inside log2 for cross-entropy.
inline constexpr double kLogClamp = 1e-7;

/// Probabilistic contingency table: a pixel with forecast p and observation y
/// adds p*y to a, p*(1-y) to b, (1-p)*y to c and (1-p)*(1-y) to d.
struct ContingencyCounts {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;

    double total() const noexcept { return a + b + c + d; }
};

/// Two-sided neighbourhood table with observation- and prediction-oriented hits.
struct NbhdContingency {
    double a_obs = 0.0;
    double a_pred = 0.0;
    double b = 0.0;
    double c = 0.0;
    int half_width = 0;
};

/// Score value plus the names of any degenerate-denominator fallbacks taken.
struct ScoreResult {
    ScoreKind kind;
    double value;
    std::vector<std::string> fallbacks;
};

ContingencyCounts prob_contingency(const GridField& p, const GridField& y);

/**
 * Observation pass: each observed pixel takes q = max of p over its
 * neighbourhood, adding q to a_obs and 1-q to c. Prediction pass: each pixel
 * with an observed event in its neighbourhood adds p to a_pred and 1-p to b;
 * a pixel without one adds p to b.
 */
NbhdContingency nbhd_contingency(const GridField& p, const GridField& y, NbhdSpec r);

/// CSI, Heidke, Peirce or Gerrity computed from a contingency table.
ScoreResult contingency_score(ScoreKind kind, const ContingencyCounts& t);

/// Partial derivatives of contingency_score with respect to (a, b, c, d).
struct ContingencyPartials {
    double da = 0.0;
    double db = 0.0;
    double dc = 0.0;
    double dd = 0.0;
};
ContingencyPartials contingency_score_partials(ScoreKind kind, const ContingencyCounts& t);

struct NbhdCsiParts {
    double pod;
    double sr;
    double csi;
    std::vector<std::string> fallbacks;
};
NbhdCsiParts nbhd_csi_parts(const NbhdContingency& t);

/// Traditional (pixelwise) form. y may be a mask or any field with values in [0,1].
ScoreResult pixelwise_score(ScoreKind kind, const GridField& p, const GridField& y);

/// Neighbourhood form for the six Table-1 scores; y must be binary.
ScoreResult nbhd_score(ScoreKind kind, const GridField& p, const GridField& y, NbhdSpec r);

namespace detail {
void require_probability(const GridField& p, const char* what);
void require_unit_interval(const GridField& y, const char* what);
void require_binary(const GridField& y, const char* what);
void require_same_shape(const GridField& p, const GridField& y);
/// 1 where both fields score the pixel.
std::vector<std::uint8_t> joint_scored(const GridField& p, const GridField& y);
}  // namespace detail

}  // namespace selfs
