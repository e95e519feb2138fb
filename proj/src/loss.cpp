#include "selfs/loss.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "selfs/errors.hpp"
#include "selfs/fourier.hpp"
#include "selfs/wavelet.hpp"

namespace selfs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_edge(double v) {
    if (v == kInf) return "inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_edge(std::string_view text, std::string_view id) {
    if (text == "inf") return kInf;
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v) || v < 0.0)
        throw ArgumentError("bad band edge '" + std::string(text) + "' in '" + std::string(id) + "'");
    return v;
}

int parse_half_width(std::string_view text, std::string_view id) {
    int r = -1;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), r);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || r < 0)
        throw ArgumentError("bad neighbourhood half-width in '" + std::string(id) + "'");
    return r;
}

const char* kFilterGrammar = "expected nbhd_r<half-width>, F<lo>-<hi> or W<lo>-<hi> (degrees, 0/inf for open ends)";

std::vector<double> to_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

std::vector<double> max_filtered(const GridField& f, int r) {
    std::vector<double> out(f.size());
    detail::max_filter(f.values(), f.rows(), f.cols(), r, out);
    return out;
}

// d(score)/d(p) for the scores that reduce to sums over (p_i, y_i) pairs.
std::vector<double> elementwise_score_grad(ScoreKind kind, std::span<const double> p, std::span<const double> y,
                                           const std::vector<std::uint8_t>& scored) {
    const std::size_t n = p.size();
    std::vector<double> g(n, 0.0);
    const double count = static_cast<double>(std::count(scored.begin(), scored.end(), std::uint8_t{1}));
    if (count == 0.0) throw ArgumentError("no scored pixels (eval mask excludes everything)");
    switch (kind) {
        case ScoreKind::brier:
            for (std::size_t i = 0; i < n; ++i)
                if (scored[i]) g[i] = 2.0 * (p[i] - y[i]) / count;
            break;
        case ScoreKind::fss: {
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (!scored[i]) continue;
                num += (p[i] - y[i]) * (p[i] - y[i]);
                den += p[i] * p[i] + y[i] * y[i];
            }
            if (den == 0.0) break;
            for (std::size_t i = 0; i < n; ++i) {
                if (!scored[i]) continue;
                const double dnum = 2.0 * (p[i] - y[i]);
                const double dden = 2.0 * p[i];
                g[i] = -(dnum * den - num * dden) / (den * den);
            }
            break;
        }
        case ScoreKind::iou: {
            double inter = 0.0, uni = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (!scored[i]) continue;
                inter += p[i] * y[i];
                uni += std::max(p[i], y[i]);
            }
            if (uni == 0.0) break;
            for (std::size_t i = 0; i < n; ++i) {
                if (!scored[i]) continue;
                const double duni = p[i] > y[i] ? 1.0 : (p[i] == y[i] ? 0.5 : 0.0);
                g[i] = (y[i] * uni - inter * duni) / (uni * uni);
            }
            break;
        }
        case ScoreKind::dice:
            for (std::size_t i = 0; i < n; ++i)
                if (scored[i]) g[i] = (2.0 * y[i] - 1.0) / count;
            break;
        case ScoreKind::xent: {
            const double k = -1.0 / (count * std::log(2.0));
            for (std::size_t i = 0; i < n; ++i) {
                if (!scored[i]) continue;
                // Inside the clamp region log2 sees a constant.
                const double dpos = (p[i] > kLogClamp && p[i] < 1.0 - kLogClamp) ? 1.0 / p[i] : 0.0;
                const double q = 1.0 - p[i];
                const double dneg = (q > kLogClamp && q < 1.0 - kLogClamp) ? -1.0 / q : 0.0;
                g[i] = k * (y[i] * dpos + (1.0 - y[i]) * dneg);
            }
            break;
        }
        default: {
            ContingencyCounts t;
            for (std::size_t i = 0; i < n; ++i) {
                if (!scored[i]) continue;
                t.a += p[i] * y[i];
                t.b += p[i] * (1.0 - y[i]);
                t.c += (1.0 - p[i]) * y[i];
                t.d += (1.0 - p[i]) * (1.0 - y[i]);
            }
            const auto d = contingency_score_partials(kind, t);
            for (std::size_t i = 0; i < n; ++i)
                if (scored[i]) g[i] = d.da * y[i] + d.db * (1.0 - y[i]) - d.dc * y[i] - d.dd * (1.0 - y[i]);
            break;
        }
    }
    return g;
}

// Pixels of the window around (r, c) clipped to the grid.
struct Window {
    std::size_t r0, r1, c0, c1;
    bool clipped;
};

Window window_at(std::size_t r, std::size_t c, std::size_t rows, std::size_t cols, int hw) {
    const auto h = static_cast<std::ptrdiff_t>(hw);
    const auto ri = static_cast<std::ptrdiff_t>(r);
    const auto ci = static_cast<std::ptrdiff_t>(c);
    const auto nr = static_cast<std::ptrdiff_t>(rows);
    const auto nc = static_cast<std::ptrdiff_t>(cols);
    Window w{static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, ri - h)),
             static_cast<std::size_t>(std::min(nr - 1, ri + h)),
             static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, ci - h)),
             static_cast<std::size_t>(std::min(nc - 1, ci + h)), false};
    w.clipped = ri - h < 0 || ci - h < 0 || ri + h >= nr || ci + h >= nc;
    return w;
}

std::vector<double> nbhd_csi_grad(const GridField& p, const GridField& y, int hw) {
    const auto scored = detail::joint_scored(p, y);
    const auto t = nbhd_contingency(p, y, NbhdSpec{hw});
    const auto parts = nbhd_csi_parts(t);
    std::vector<double> g(p.size(), 0.0);
    if (parts.csi == 0.0) return g;

    const auto rows = p.rows();
    const auto cols = p.cols();
    const bool pod_free = t.a_obs + t.c > 0.0;
    const bool sr_free = t.a_pred + t.b > 0.0;
    const double dcsi_dpod = pod_free ? parts.csi * parts.csi / (parts.pod * parts.pod) : 0.0;
    const double dcsi_dsr = sr_free ? parts.csi * parts.csi / (parts.sr * parts.sr) : 0.0;

    if (dcsi_dpod != 0.0) {
        // POD = sum over observed pixels of the window max / n_obs.
        const double n_obs = t.a_obs + t.c;
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                const auto i = r * cols + c;
                if (!scored[i] || y[i] != 1.0) continue;
                const auto w = window_at(r, c, rows, cols, hw);
                double top = w.clipped ? 0.0 : -1.0;
                for (auto rr = w.r0; rr <= w.r1; ++rr)
                    for (auto cc = w.c0; cc <= w.c1; ++cc) top = std::max(top, p(rr, cc));
                double ties = (w.clipped && top == 0.0) ? 1.0 : 0.0;
                for (auto rr = w.r0; rr <= w.r1; ++rr)
                    for (auto cc = w.c0; cc <= w.c1; ++cc)
                        if (p(rr, cc) == top) ties += 1.0;
                for (auto rr = w.r0; rr <= w.r1; ++rr)
                    for (auto cc = w.c0; cc <= w.c1; ++cc)
                        if (p(rr, cc) == top) g[rr * cols + cc] += dcsi_dpod / (n_obs * ties);
            }
        }
    }
    if (dcsi_dsr != 0.0) {
        // SR = A / B with A = sum of p over pixels near an event, B = A + b.
        const auto ymax = max_filtered(y, hw);
        const double A = t.a_pred;
        const double B = t.a_pred + t.b;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (!scored[i]) continue;
            const double dA = ymax[i] == 1.0 ? 1.0 : 0.0;
            const double dB = ymax[i] == 1.0 ? 0.0 : 1.0;
            g[i] += dcsi_dsr * (dA * B - A * dB) / (B * B);
        }
    }
    return g;
}

std::vector<double> nbhd_fss_grad(const GridField& p, const GridField& y, int hw) {
    const auto scored = detail::joint_scored(p, y);
    const auto n = p.size();
    std::vector<double> mp(n), my(n);
    detail::mean_filter(p.values(), p.rows(), p.cols(), hw, mp);
    detail::mean_filter(y.values(), y.rows(), y.cols(), hw, my);
    double num = 0.0, den = 0.0;
    std::vector<double> e(n, 0.0), m(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!scored[i]) continue;
        e[i] = mp[i] - my[i];
        m[i] = mp[i];
        num += e[i] * e[i];
        den += mp[i] * mp[i] + my[i] * my[i];
    }
    std::vector<double> g(n, 0.0);
    if (den == 0.0) return g;
    // The mean filter is its own adjoint, so d/dp of sum(s * (Mp)^2) is 2 M (s * Mp).
    std::vector<double> dnum(n), dden(n);
    detail::mean_filter(e, p.rows(), p.cols(), hw, dnum);
    detail::mean_filter(m, p.rows(), p.cols(), hw, dden);
    for (std::size_t i = 0; i < n; ++i) g[i] = -(2.0 * dnum[i] * den - num * 2.0 * dden[i]) / (den * den);
    return g;
}

void check_pair(const LossSpec& spec, const GridField& p, const PreparedTarget& t) {
    if (filter_id(spec.filter) != filter_id(t.filter))
        throw ArgumentError("target was prepared for filter " + filter_id(t.filter) + ", spec uses " +
                            filter_id(spec.filter));
    detail::require_same_shape(p, t.original);
    detail::require_probability(p, "forecast");
}

}  // namespace

std::string filter_id(const FilterSpec& filter) {
    if (const auto* n = std::get_if<NbhdSpec>(&filter)) return "nbhd_r" + std::to_string(n->half_width);
    const auto& s = std::get<SpectralFilter>(filter);
    return std::string(s.method == SpectralMethod::fourier ? "F" : "W") + format_edge(s.band.lo_deg) + "-" +
           format_edge(s.band.hi_deg);
}

FilterSpec parse_filter_id(std::string_view id) {
    if (id.starts_with("nbhd_r")) return NbhdSpec{parse_half_width(id.substr(6), id)};
    if (id.empty() || (id[0] != 'F' && id[0] != 'W' && id[0] != 'f' && id[0] != 'w'))
        throw ArgumentError("unknown filter '" + std::string(id) + "': " + kFilterGrammar);
    const auto method = (id[0] == 'F' || id[0] == 'f') ? SpectralMethod::fourier : SpectralMethod::wavelet;
    const auto body = id.substr(1);
    std::size_t dash = std::string_view::npos;
    for (std::size_t i = 1; i < body.size(); ++i) {
        if (body[i] == '-' && body[i - 1] != 'e' && body[i - 1] != 'E') {
            dash = i;
            break;
        }
    }
    if (dash == std::string_view::npos)
        throw ArgumentError("unknown filter '" + std::string(id) + "': " + kFilterGrammar);
    const double lo = parse_edge(body.substr(0, dash), id);
    const double hi = parse_edge(body.substr(dash + 1), id);
    return SpectralFilter{WavelengthBand(lo, hi), method};
}

std::string LossSpec::id() const { return std::string(to_string(score)) + "_" + filter_id(filter); }

LossSpec make_loss_spec(ScoreKind score, FilterSpec filter) {
    if (const auto* n = std::get_if<NbhdSpec>(&filter)) {
        if (!supports_neighbourhood(score))
            throw ArgumentError(std::string(to_string(score)) +
                                " needs true negatives and has no neighbourhood form; use an F or W band");
        if (n->half_width < 0) throw ArgumentError("neighbourhood half-width must be >= 0");
    }
    return LossSpec{score, filter};
}

LossSpec parse_loss_spec(std::string_view id) {
    const auto us = id.find('_');
    if (us == std::string_view::npos)
        throw ArgumentError("bad loss id '" + std::string(id) + "': expected <score>_<filter>, " + kFilterGrammar);
    return make_loss_spec(parse_score_kind(id.substr(0, us)), parse_filter_id(id.substr(us + 1)));
}

const std::vector<int>& standard_half_widths() {
    static const std::vector<int> widths{0, 1, 2, 3, 4, 6, 8, 12};
    return widths;
}

const std::vector<WavelengthBand>& standard_bands() {
    static const std::vector<WavelengthBand> bands{
        {0.0, 0.025}, {0.025, 0.05}, {0.05, 0.1}, {0.1, 0.2},  {0.2, 0.4},  {0.4, 0.8},  {0.8, 1.6},  {1.6, kInf},
        {0.0, 0.1},   {0.0, 0.2},    {0.0, 0.4},  {0.0, 0.8},  {0.1, kInf}, {0.2, kInf}, {0.4, kInf}, {0.8, kInf},
    };
    return bands;
}

std::vector<LossSpec> enumerate_configs() {
    std::vector<LossSpec> out;
    out.reserve(336);
    for (auto kind : kNbhdScoreKinds)
        for (int r : standard_half_widths()) out.push_back(make_loss_spec(kind, NbhdSpec{r}));
    for (auto method : {SpectralMethod::fourier, SpectralMethod::wavelet})
        for (auto kind : kAllScoreKinds)
            for (const auto& band : standard_bands()) out.push_back(make_loss_spec(kind, SpectralFilter{band, method}));
    return out;
}

std::vector<FilterSpec> enumerate_filters() {
    std::vector<FilterSpec> out;
    for (int r : standard_half_widths()) out.emplace_back(NbhdSpec{r});
    for (auto method : {SpectralMethod::fourier, SpectralMethod::wavelet})
        for (const auto& band : standard_bands()) out.emplace_back(SpectralFilter{band, method});
    return out;
}

namespace {

GridField clamp_unit(const GridField& f, double* clamp_magnitude) {
    std::vector<double> v(f.values().begin(), f.values().end());
    double worst = 0.0;
    for (double& x : v) {
        const double c = std::clamp(x, 0.0, 1.0);
        worst = std::max(worst, std::abs(x - c));
        x = c;
    }
    if (clamp_magnitude) *clamp_magnitude = worst;
    return f.with_values(std::move(v), FieldKind::prob);
}

}  // namespace

GridField apply_spectral_filter(const GridField& field, const SpectralFilter& filter, double* clamp_magnitude) {
    const auto raw = filter.method == SpectralMethod::fourier ? fourier_band_pass(field, filter.band)
                                                               : wavelet_band_pass(field, filter.band);
    return clamp_unit(raw, clamp_magnitude);
}

PreparedTarget prepare_target(const LossSpec& spec, const GridField& y) {
    detail::require_binary(y, "observation");
    if (std::holds_alternative<NbhdSpec>(spec.filter)) return {y, y, spec.filter, 0.0};
    double clamp = 0.0;
    auto filtered = apply_spectral_filter(y, std::get<SpectralFilter>(spec.filter), &clamp);
    return {y, std::move(filtered), spec.filter, clamp};
}

double loss_from_score(ScoreKind kind, double score) { return negatively_oriented(kind) ? score : 1.0 - score; }

ScoreResult loss_score(const LossSpec& spec, const GridField& p, const PreparedTarget& t) {
    check_pair(spec, p, t);
    if (const auto* n = std::get_if<NbhdSpec>(&spec.filter)) return nbhd_score(spec.score, p, t.original, *n);
    return pixelwise_score(spec.score, p, t.filtered);
}

double loss_value(const LossSpec& spec, const GridField& p, const PreparedTarget& t) {
    return loss_from_score(spec.score, loss_score(spec, p, t).value);
}

GridField loss_gradient(const LossSpec& spec, const GridField& p, const PreparedTarget& t) {
    check_pair(spec, p, t);
    std::vector<double> g;
    if (const auto* n = std::get_if<NbhdSpec>(&spec.filter)) {
        if (!supports_neighbourhood(spec.score))
            throw ArgumentError(std::string(to_string(spec.score)) + " has no neighbourhood form");
        const auto& y = t.original;
        detail::require_binary(y, "observation");
        const int hw = n->half_width;
        if (spec.score == ScoreKind::csi) {
            g = nbhd_csi_grad(p, y, hw);
        } else if (spec.score == ScoreKind::fss) {
            g = nbhd_fss_grad(p, y, hw);
        } else {
            g = elementwise_score_grad(spec.score, p.values(), max_filtered(y, hw), detail::joint_scored(p, y));
        }
    } else {
        detail::require_unit_interval(t.filtered, "observation");
        g = elementwise_score_grad(spec.score, p.values(), t.filtered.values(), detail::joint_scored(p, t.filtered));
    }
    if (!negatively_oriented(spec.score))
        for (double& v : g) v = -v;
    for (double v : g)
        if (!std::isfinite(v)) throw NumericError("loss gradient for " + spec.id() + " is not finite");
    return GridField(p.rows(), p.cols(), p.spacing_deg(), FieldKind::real, std::move(g));
}

GridField grad_check_exclusions(const LossSpec& spec, const GridField& p, const PreparedTarget& t, double h) {
    if (!(h > 0.0)) throw ArgumentError("finite-difference step must be > 0");
    check_pair(spec, p, t);
    const auto n = p.size();
    std::vector<double> ex(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (p[i] - 2.0 * h < 0.0 || p[i] + 2.0 * h > 1.0) ex[i] = 1.0;

    const auto* nb = std::get_if<NbhdSpec>(&spec.filter);
    const double gap = 2.0 * h;
    if (spec.score == ScoreKind::xent) {
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(p[i] - kLogClamp) < gap || std::abs(p[i] - (1.0 - kLogClamp)) < gap) ex[i] = 1.0;
    } else if (spec.score == ScoreKind::iou) {
        const auto y = nb ? max_filtered(t.original, nb->half_width) : to_vector(t.filtered.values());
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(p[i] - y[i]) < gap) ex[i] = 1.0;
    } else if (spec.score == ScoreKind::csi && nb) {
        const auto rows = p.rows();
        const auto cols = p.cols();
        const auto& y = t.original;
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                if (!y.scored(r * cols + c) || y(r, c) != 1.0) continue;
                const auto w = window_at(r, c, rows, cols, nb->half_width);
                double top = w.clipped ? 0.0 : -1.0;
                for (auto rr = w.r0; rr <= w.r1; ++rr)
                    for (auto cc = w.c0; cc <= w.c1; ++cc) top = std::max(top, p(rr, cc));
                int near = (w.clipped && top < gap) ? 1 : 0;
                for (auto rr = w.r0; rr <= w.r1; ++rr)
                    for (auto cc = w.c0; cc <= w.c1; ++cc)
                        if (p(rr, cc) >= top - gap) ++near;
                if (near < 2) continue;
                for (auto rr = w.r0; rr <= w.r1; ++rr)
                    for (auto cc = w.c0; cc <= w.c1; ++cc)
                        if (p(rr, cc) >= top - gap) ex[rr * cols + cc] = 1.0;
            }
        }
    }
    return GridField(p.rows(), p.cols(), p.spacing_deg(), FieldKind::mask, std::move(ex));
}

GradCheckReport grad_check(const LossSpec& spec, const GridField& p, const PreparedTarget& t, double h) {
    const auto excluded = grad_check_exclusions(spec, p, t, h);
    const auto analytic = loss_gradient(spec, p, t);
    double scale = 0.0;
    for (double v : analytic.values()) scale = std::max(scale, std::abs(v));
    const double floor = std::max(1e-6 * scale, std::numeric_limits<double>::min());

    GradCheckReport rep;
    std::vector<double> work(p.values().begin(), p.values().end());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (excluded[i] != 0.0) {
            ++rep.excluded;
            continue;
        }
        const double orig = work[i];
        const auto at = [&](double offset) {
            work[i] = orig + offset;
            return loss_value(spec, p.with_values(work, p.kind()), t);
        };
        const double up = at(h), down = at(-h);
        const double up2 = at(2.0 * h), down2 = at(-2.0 * h);
        work[i] = orig;
        const double numeric = (up - down) / (2.0 * h);
        // Round-off of the quotient plus the Richardson estimate of its O(h^2) truncation.
        const double truncation = std::abs(numeric - (up2 - down2) / (4.0 * h)) / 3.0;
        const double roundoff =
            4.0 * std::numeric_limits<double>::epsilon() * (std::abs(up) + std::abs(down)) / (2.0 * h) + truncation;
        const double abs_err = std::abs(analytic[i] - numeric);
        const double rel_err =
            std::max(0.0, abs_err - roundoff) / std::max({std::abs(analytic[i]), std::abs(numeric), floor});
        ++rep.checked;
        rep.max_abs_err = std::max(rep.max_abs_err, abs_err);
        rep.roundoff = std::max(rep.roundoff, roundoff);
        if (rep.checked == 1 || rel_err > rep.max_rel_err) {
            rep.max_rel_err = rel_err;
            rep.worst_row = i / p.cols();
            rep.worst_col = i % p.cols();
        }
    }
    return rep;
}

ScoreResult evaluate_metric(const LossSpec& spec, const GridField& p, const GridField& y, FilterPlacement placement) {
    detail::require_same_shape(p, y);
    if (const auto* n = std::get_if<NbhdSpec>(&spec.filter)) return nbhd_score(spec.score, p, y, *n);
    const auto& f = std::get<SpectralFilter>(spec.filter);
    const auto yf = apply_spectral_filter(y, f);
    if (placement == FilterPlacement::observations_only) return pixelwise_score(spec.score, p, yf);
    return pixelwise_score(spec.score, apply_spectral_filter(p, f), yf);
}

SpectralSet spectral_set(const GridField& field, std::span<const LossSpec> specs) {
    SpectralSet out;
    std::vector<WavelengthBand> fourier, wavelet;
    for (const auto& s : specs) {
        const auto* f = std::get_if<SpectralFilter>(&s.filter);
        if (!f) continue;
        const auto id = filter_id(*f);
        if (out.contains(id)) continue;
        out.emplace(id, field);  // placeholder, replaced below
        (f->method == SpectralMethod::fourier ? fourier : wavelet).push_back(f->band);
    }
    const auto store = [&](SpectralMethod m, const std::vector<WavelengthBand>& bands, std::vector<GridField> fields) {
        for (std::size_t i = 0; i < bands.size(); ++i)
            out.insert_or_assign(filter_id(SpectralFilter{bands[i], m}), clamp_unit(fields[i], nullptr));
    };
    if (!fourier.empty()) store(SpectralMethod::fourier, fourier, fourier_band_pass(field, fourier));
    if (!wavelet.empty()) store(SpectralMethod::wavelet, wavelet, wavelet_band_pass(field, wavelet));
    return out;
}

std::vector<ScoreResult> evaluate_metrics(std::span<const LossSpec> specs, const GridField& p, const GridField& y,
                                          const SpectralSet& y_filtered, const SpectralSet* p_filtered) {
    detail::require_same_shape(p, y);
    std::vector<ScoreResult> out;
    out.reserve(specs.size());
    const auto lookup = [](const SpectralSet& set, const std::string& id) -> const GridField& {
        const auto it = set.find(id);
        if (it == set.end()) throw ArgumentError("no precomputed filtering for " + id);
        return it->second;
    };
    for (const auto& s : specs) {
        if (const auto* n = std::get_if<NbhdSpec>(&s.filter)) {
            out.push_back(nbhd_score(s.score, p, y, *n));
            continue;
        }
        const auto id = filter_id(s.filter);
        const auto& pf = p_filtered ? lookup(*p_filtered, id) : p;
        out.push_back(pixelwise_score(s.score, pf, lookup(y_filtered, id)));
    }
    return out;
}

}  // namespace selfs
