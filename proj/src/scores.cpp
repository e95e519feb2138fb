#include "selfs/scores.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "selfs/errors.hpp"

namespace selfs {

std::string_view to_string(ScoreKind kind) {
    switch (kind) {
        case ScoreKind::brier: return "brier";
        case ScoreKind::fss: return "fss";
        case ScoreKind::iou: return "iou";
        case ScoreKind::dice: return "dice";
        case ScoreKind::csi: return "csi";
        case ScoreKind::xent: return "xent";
        case ScoreKind::heidke: return "heidke";
        case ScoreKind::peirce: return "peirce";
        case ScoreKind::gerrity: return "gerrity";
    }
    return "?";
}

ScoreKind parse_score_kind(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
    for (auto k : kAllScoreKinds)
        if (to_string(k) == lower) return k;
    throw ArgumentError("unknown score '" + std::string(text) +
                        "' (expected brier, fss, iou, dice, csi, xent, heidke, peirce or gerrity)");
}

bool negatively_oriented(ScoreKind kind) { return kind == ScoreKind::brier || kind == ScoreKind::xent; }

bool supports_neighbourhood(ScoreKind kind) {
    return kind != ScoreKind::heidke && kind != ScoreKind::peirce && kind != ScoreKind::gerrity;
}

namespace detail {

void require_same_shape(const GridField& p, const GridField& y) {
    if (!p.same_shape(y))
        throw ArgumentError("shape mismatch: " + std::to_string(p.rows()) + "x" + std::to_string(p.cols()) + " vs " +
                            std::to_string(y.rows()) + "x" + std::to_string(y.cols()));
}

void require_probability(const GridField& p, const char* what) {
    if (p.kind() == FieldKind::real) require_unit_interval(p, what);
}

void require_unit_interval(const GridField& y, const char* what) {
    for (double v : y.values())
        if (v < 0.0 || v > 1.0) throw ArgumentError(std::string(what) + " values must lie in [0,1]");
}

void require_binary(const GridField& y, const char* what) {
    for (double v : y.values())
        if (v != 0.0 && v != 1.0) throw ArgumentError(std::string(what) + " must be binary (0/1)");
}

std::vector<std::uint8_t> joint_scored(const GridField& p, const GridField& y) {
    std::vector<std::uint8_t> s(p.size(), 1);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = (p.scored(i) && y.scored(i)) ? 1 : 0;
    return s;
}

}  // namespace detail

namespace {

std::size_t count_scored(const std::vector<std::uint8_t>& s) {
    const auto n = static_cast<std::size_t>(std::count(s.begin(), s.end(), std::uint8_t{1}));
    if (n == 0) throw ArgumentError("no scored pixels (eval mask excludes everything)");
    return n;
}

double log2_clamped(double p) { return std::log2(std::clamp(p, kLogClamp, 1.0 - kLogClamp)); }

// Scores that need only (p, y) sums; y is either the raw observation or its
// neighbourhood maximum.
ScoreResult elementwise_score(ScoreKind kind, std::span<const double> p, std::span<const double> y,
                              const std::vector<std::uint8_t>& scored) {
    const double g = static_cast<double>(count_scored(scored));
    ScoreResult res{kind, 0.0, {}};
    switch (kind) {
        case ScoreKind::brier: {
            double s = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i)
                if (scored[i]) s += (p[i] - y[i]) * (p[i] - y[i]);
            res.value = s / g;
            break;
        }
        case ScoreKind::fss: {
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                if (!scored[i]) continue;
                num += (p[i] - y[i]) * (p[i] - y[i]);
                den += p[i] * p[i] + y[i] * y[i];
            }
            if (den == 0.0) {
                res.value = 1.0;
                res.fallbacks.emplace_back("fss_zero_denominator");
            } else {
                res.value = 1.0 - num / den;
            }
            break;
        }
        case ScoreKind::iou: {
            double inter = 0.0, uni = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                if (!scored[i]) continue;
                inter += p[i] * y[i];
                uni += std::max(p[i], y[i]);
            }
            if (uni == 0.0) {
                res.value = 1.0;
                res.fallbacks.emplace_back("iou_empty_union");
            } else {
                res.value = inter / uni;
            }
            break;
        }
        case ScoreKind::dice: {
            double s = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i)
                if (scored[i]) s += p[i] * y[i] + (1.0 - p[i]) * (1.0 - y[i]);
            res.value = s / g;
            break;
        }
        case ScoreKind::xent: {
            double s = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i)
                if (scored[i]) s += y[i] * log2_clamped(p[i]) + (1.0 - y[i]) * log2_clamped(1.0 - p[i]);
            res.value = -s / g;
            break;
        }
        default: throw ArgumentError("elementwise_score: not an elementwise score");
    }
    return res;
}

ContingencyCounts contingency_from(std::span<const double> p, std::span<const double> y,
                                   const std::vector<std::uint8_t>& scored) {
    ContingencyCounts t;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!scored[i]) continue;
        t.a += p[i] * y[i];
        t.b += p[i] * (1.0 - y[i]);
        t.c += (1.0 - p[i]) * y[i];
        t.d += (1.0 - p[i]) * (1.0 - y[i]);
    }
    return t;
}

bool is_contingency_kind(ScoreKind kind) {
    return kind == ScoreKind::csi || kind == ScoreKind::heidke || kind == ScoreKind::peirce ||
           kind == ScoreKind::gerrity;
}

}  // namespace

ContingencyCounts prob_contingency(const GridField& p, const GridField& y) {
    detail::require_same_shape(p, y);
    detail::require_probability(p, "forecast");
    detail::require_unit_interval(y, "observation");
    return contingency_from(p.values(), y.values(), detail::joint_scored(p, y));
}

NbhdContingency nbhd_contingency(const GridField& p, const GridField& y, NbhdSpec r) {
    detail::require_same_shape(p, y);
    detail::require_probability(p, "forecast");
    detail::require_binary(y, "observation");
    if (r.half_width < 0) throw ArgumentError("neighbourhood half-width must be >= 0");
    const auto scored = detail::joint_scored(p, y);
    std::vector<double> pmax(p.size()), ymax(y.size());
    detail::max_filter(p.values(), p.rows(), p.cols(), r.half_width, pmax);
    detail::max_filter(y.values(), y.rows(), y.cols(), r.half_width, ymax);
    NbhdContingency t;
    t.half_width = r.half_width;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!scored[i]) continue;
        if (y[i] == 1.0) {
            t.a_obs += pmax[i];
            t.c += 1.0 - pmax[i];
        }
        if (ymax[i] == 1.0) {
            t.a_pred += p[i];
            t.b += 1.0 - p[i];
        } else {
            t.b += p[i];
        }
    }
    return t;
}

ScoreResult contingency_score(ScoreKind kind, const ContingencyCounts& t) {
    const double a = t.a, b = t.b, c = t.c, d = t.d;
    ScoreResult res{kind, 0.0, {}};
    switch (kind) {
        case ScoreKind::csi: {
            const double den = a + b + c;
            if (den == 0.0) {
                res.value = 1.0;
                res.fallbacks.emplace_back("csi_zero_denominator");
            } else {
                res.value = a / den;
            }
            break;
        }
        case ScoreKind::heidke: {
            // (a + d - N_random) / (N - N_random) rearranged to avoid cancellation.
            const double den = (a + c) * (c + d) + (a + b) * (b + d);
            if (den == 0.0) {
                res.fallbacks.emplace_back("heidke_zero_denominator");
            } else {
                res.value = 2.0 * (a * d - b * c) / den;
            }
            break;
        }
        case ScoreKind::peirce: {
            if (a + c == 0.0 || b + d == 0.0) {
                res.fallbacks.emplace_back("peirce_empty_class");
            } else {
                res.value = a / (a + c) - b / (b + d);
            }
            break;
        }
        case ScoreKind::gerrity: {
            const double events = a + c;
            const double non_events = b + d;
            if (events == 0.0 || non_events == 0.0) {
                res.fallbacks.emplace_back("gerrity_empty_class");
            } else {
                const double ratio = events / non_events;
                res.value = (a / ratio + d * ratio - b - c) / t.total();
            }
            break;
        }
        default: throw ArgumentError("contingency_score: " + std::string(to_string(kind)) + " is not table-based");
    }
    return res;
}

ContingencyPartials contingency_score_partials(ScoreKind kind, const ContingencyCounts& t) {
    const double a = t.a, b = t.b, c = t.c, d = t.d;
    ContingencyPartials g;
    switch (kind) {
        case ScoreKind::csi: {
            const double den = a + b + c;
            if (den == 0.0) break;
            const double den2 = den * den;
            g.da = (b + c) / den2;
            g.db = -a / den2;
            g.dc = -a / den2;
            break;
        }
        case ScoreKind::heidke: {
            const double u = 2.0 * (a * d - b * c);
            const double v = (a + c) * (c + d) + (a + b) * (b + d);
            if (v == 0.0) break;
            const double v2 = v * v;
            g.da = (2.0 * d * v - u * ((c + d) + (b + d))) / v2;
            g.db = (-2.0 * c * v - u * ((a + b) + (b + d))) / v2;
            g.dc = (-2.0 * b * v - u * ((c + d) + (a + c))) / v2;
            g.dd = (2.0 * a * v - u * ((a + c) + (a + b))) / v2;
            break;
        }
        case ScoreKind::peirce: {
            const double e = a + c, f = b + d;
            if (e == 0.0 || f == 0.0) break;
            g.da = c / (e * e);
            g.dc = -a / (e * e);
            g.db = -d / (f * f);
            g.dd = b / (f * f);
            break;
        }
        case ScoreKind::gerrity: {
            const double e = a + c, f = b + d;
            if (e == 0.0 || f == 0.0) break;
            const double n = t.total();
            const double s = (a * f / e + d * e / f - b - c) / n;
            g.da = (f * c / (e * e) + d / f - s) / n;
            g.db = (a / e - d * e / (f * f) - 1.0 - s) / n;
            g.dc = (-a * f / (e * e) + d / f - 1.0 - s) / n;
            g.dd = (a / e + e * b / (f * f) - s) / n;
            break;
        }
        default: throw ArgumentError("contingency_score_partials: not a table-based score");
    }
    return g;
}

NbhdCsiParts nbhd_csi_parts(const NbhdContingency& t) {
    NbhdCsiParts parts{1.0, 1.0, 0.0, {}};
    const double obs = t.a_obs + t.c;
    const double fcst = t.a_pred + t.b;
    if (obs == 0.0) {
        parts.fallbacks.emplace_back("csi_pod_undefined");
    } else {
        parts.pod = t.a_obs / obs;
    }
    if (fcst == 0.0) {
        parts.fallbacks.emplace_back("csi_sr_undefined");
    } else {
        parts.sr = t.a_pred / fcst;
    }
    if (parts.pod == 0.0 || parts.sr == 0.0) {
        parts.csi = 0.0;
    } else {
        parts.csi = 1.0 / (1.0 / parts.pod + 1.0 / parts.sr - 1.0);
    }
    return parts;
}

ScoreResult pixelwise_score(ScoreKind kind, const GridField& p, const GridField& y) {
    detail::require_same_shape(p, y);
    detail::require_probability(p, "forecast");
    detail::require_unit_interval(y, "observation");
    const auto scored = detail::joint_scored(p, y);
    if (is_contingency_kind(kind)) {
        count_scored(scored);
        return contingency_score(kind, contingency_from(p.values(), y.values(), scored));
    }
    return elementwise_score(kind, p.values(), y.values(), scored);
}

ScoreResult nbhd_score(ScoreKind kind, const GridField& p, const GridField& y, NbhdSpec r) {
    if (!supports_neighbourhood(kind))
        throw ArgumentError(std::string(to_string(kind)) + " has no neighbourhood form");
    if (r.half_width < 0) throw ArgumentError("neighbourhood half-width must be >= 0");
    detail::require_same_shape(p, y);
    detail::require_probability(p, "forecast");
    detail::require_binary(y, "observation");
    const auto scored = detail::joint_scored(p, y);
    const int hw = r.half_width;

    if (kind == ScoreKind::csi) {
        count_scored(scored);
        auto parts = nbhd_csi_parts(nbhd_contingency(p, y, r));
        return {kind, parts.csi, std::move(parts.fallbacks)};
    }
    if (kind == ScoreKind::fss) {
        std::vector<double> mp(p.size()), my(y.size());
        detail::mean_filter(p.values(), p.rows(), p.cols(), hw, mp);
        detail::mean_filter(y.values(), y.rows(), y.cols(), hw, my);
        return elementwise_score(kind, mp, my, scored);
    }
    std::vector<double> ymax(y.size());
    detail::max_filter(y.values(), y.rows(), y.cols(), hw, ymax);
    return elementwise_score(kind, p.values(), ymax, scored);
}

}  // namespace selfs
