// Acceptance checks. Each criterion prints one PASS/FAIL line; pass criterion
// numbers as arguments to run a subset (default: all).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "selfs/cli.hpp"
#include "selfs/diagnostics.hpp"
#include "selfs/fourier.hpp"
#include "selfs/loss.hpp"
#include "selfs/nbhd.hpp"
#include "selfs/ranking.hpp"
#include "selfs/rng.hpp"
#include "selfs/scores.hpp"
#include "selfs/synth.hpp"
#include "selfs/wavelet.hpp"

using namespace selfs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

GridField random_prob(std::mt19937_64& eng, std::size_t rows, std::size_t cols, double lo = 0.0, double hi = 1.0) {
    std::vector<double> v(rows * cols);
    for (auto& x : v) x = lo + (hi - lo) * uniform01(eng);
    return {rows, cols, 0.0125, FieldKind::prob, std::move(v)};
}

GridField random_mask(std::mt19937_64& eng, std::size_t rows, std::size_t cols, double rate) {
    std::vector<double> v(rows * cols);
    for (auto& x : v) x = bernoulli(eng, rate) ? 1.0 : 0.0;
    return {rows, cols, 0.0125, FieldKind::mask, std::move(v)};
}

GridField random_real(std::mt19937_64& eng, std::size_t rows, std::size_t cols) {
    std::vector<double> v(rows * cols);
    for (auto& x : v) x = 2.0 * uniform01(eng) - 1.0;
    return {rows, cols, 0.0125, FieldKind::real, std::move(v)};
}

GridField as_prob(const GridField& m) { return m.with_values({m.values().begin(), m.values().end()}, FieldKind::prob); }

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// ---------------------------------------------------------------------------

Outcome census() {
    Outcome o;
    Stopwatch sw;
    const auto specs = enumerate_configs();
    std::size_t nbhd = 0, spectral = 0;
    std::set<std::string> ids, nbhd_scores;
    std::set<int> widths;
    std::set<std::string> bands_f, bands_w, spectral_scores;
    for (const auto& s : specs) {
        ids.insert(s.id());
        if (const auto* n = std::get_if<NbhdSpec>(&s.filter)) {
            ++nbhd;
            widths.insert(n->half_width);
            nbhd_scores.insert(std::string(to_string(s.score)));
        } else {
            ++spectral;
            const auto& f = std::get<SpectralFilter>(s.filter);
            (f.method == SpectralMethod::fourier ? bands_f : bands_w).insert(filter_id(f));
            spectral_scores.insert(std::string(to_string(s.score)));
        }
    }
    const double t = sw.seconds();
    o.require(specs.size() == 336, "total " + std::to_string(specs.size()));
    o.require(ids.size() == 336, "duplicate ids");
    o.require(nbhd == 48 && nbhd_scores.size() == 6 && widths == std::set<int>{0, 1, 2, 3, 4, 6, 8, 12},
              "neighbourhood block");
    o.require(spectral == 288 && spectral_scores.size() == 9 && bands_f.size() == 16 && bands_w.size() == 16,
              "spectral block");
    o.require(t < 1.0, "runtime " + num(t) + " s");
    o.detail = std::to_string(nbhd) + " + " + std::to_string(spectral) + " = " + std::to_string(specs.size()) +
               " in " + num(t) + " s" + (o.detail.empty() ? "" : " | " + o.detail);
    return o;
}

Outcome constants() {
    Outcome o;
    const double R = window_radius(615, 615);
    const double e_w0 = std::abs(blackman_harris(0.0, R) - 1.0);
    const double e_wr = std::abs(blackman_harris(R, R));
    const double numax = 1.0 / 0.5;
    const double e_half = std::abs(butterworth_low(numax, numax, 2) - 0.5);
    const double e_zero = std::abs(butterworth_low(0.0, numax, 2) - 1.0);
    double e_sum = 0.0;
    auto eng = stream_engine(2, 0);
    for (int i = 0; i < 1000; ++i) {
        const double cut = 0.2 + 10.0 * uniform01(eng);
        const double nu = 50.0 * uniform01(eng);
        e_sum = std::max(e_sum, std::abs(butterworth_low(nu, cut, 2) + butterworth_high(nu, cut, 2) - 1.0));
    }
    o.require(e_w0 <= 1e-12, "w(0)");
    o.require(e_wr <= 1e-12, "w(R)");
    o.require(e_half <= 1e-12, "g_low(nu_max)");
    o.require(e_zero <= 1e-12, "g_low(0)");
    o.require(e_sum <= 1e-12, "complementary gains");
    o.detail = "|w(0)-1| " + num(e_w0) + ", |w(R)| " + num(e_wr) + ", |g(numax)-0.5| " + num(e_half) +
               ", |g(0)-1| " + num(e_zero) + ", max|g_lo+g_hi-1| " + num(e_sum) + " over 1000 nu" +
               (o.detail.empty() ? "" : " | " + o.detail);
    return o;
}

Outcome transforms() {
    Outcome o;
    Stopwatch sw;
    auto eng = stream_engine(3, 0);
    Dft2d dft(64, 64);
    double dft_err = 0.0, haar_err = 0.0, energy_err = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto f = random_real(eng, 64, 64);
        const auto back = dft.inverse(dft.forward(f.values()));
        for (std::size_t i = 0; i < f.size(); ++i) dft_err = std::max(dft_err, std::abs(back[i] - Complex(f[i], 0.0)));
        const auto pyr = haar_pyramid(f, max_levels(64, 64));
        haar_err = std::max(haar_err, max_abs_diff(reconstruct(pyr).values(), f.values()));
        double e_in = 0.0, e_out = 0.0;
        for (double v : f.values()) e_in += v * v;
        const auto& deep = pyr.level(pyr.depth());
        for (double v : deep.ll.values()) e_out += v * v;
        for (const auto& lv : pyr.levels)
            for (const auto* band : {&lv.lh, &lv.hl, &lv.hh})
                for (double v : band->values()) e_out += v * v;
        energy_err = std::max(energy_err, std::abs(e_out - e_in) / e_in);
    }
    const double t = sw.seconds();
    o.require(dft_err <= 1e-10, "DFT round trip");
    o.require(haar_err <= 1e-10, "Haar round trip");
    o.require(energy_err <= 1e-12, "Haar energy");
    o.require(t < 10.0, "runtime");
    o.detail = "DFT " + num(dft_err) + ", Haar " + num(haar_err) + ", energy rel " + num(energy_err) + " on 100 64x64 in " +
               num(t) + " s" + (o.detail.empty() ? "" : " | " + o.detail);
    return o;
}

Outcome complementarity() {
    Outcome o;
    const auto& bands = standard_bands();
    std::vector<std::pair<WavelengthBand, WavelengthBand>> pairs;
    for (const auto& lo : bands)
        for (const auto& hi : bands)
            if (lo.lo_deg == 0.0 && hi.unbounded_above() && lo.hi_deg == hi.lo_deg) pairs.emplace_back(lo, hi);
    auto eng = stream_engine(4, 0);
    double f_err = 0.0, w_err = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = random_mask(eng, 205, 205, 0.05 + 0.3 * uniform01(eng));
        std::vector<WavelengthBand> flat;
        for (const auto& [a, b] : pairs) {
            flat.push_back(a);
            flat.push_back(b);
        }
        FourierStages st;
        fourier_band_pass(m, flat.front(), 2, &st);
        const auto reference = crop_taper(*st.windowed, m.rows(), m.cols());
        const auto fo = fourier_band_pass(m, flat);
        const auto wo = wavelet_band_pass(m, flat);
        for (std::size_t k = 0; k < flat.size(); k += 2) {
            for (std::size_t i = 0; i < m.size(); ++i) {
                f_err = std::max(f_err, std::abs(fo[k][i] + fo[k + 1][i] - reference[i]));
                w_err = std::max(w_err, std::abs(wo[k][i] + wo[k + 1][i] - m[i]));
            }
        }
    }
    o.require(pairs.size() == 4, "expected 4 complementary pairs");
    o.require(f_err <= 1e-10, "Fourier");
    o.require(w_err <= 1e-10, "wavelet");
    o.detail = std::to_string(pairs.size()) + " pairs x 20 masks: Fourier " + num(f_err) + ", wavelet " + num(w_err) +
               (o.detail.empty() ? "" : " | " + o.detail);
    return o;
}

Outcome scores() {
    Outcome o;
    const double tol = 1e-12;
    auto row = [](std::vector<double> v, FieldKind k) {
        const auto n = v.size();
        return GridField(1, n, 0.1, k, std::move(v));
    };
    // 0.8 / 0.2 splits of a single pixel.
    auto t = prob_contingency(row({0.8}, FieldKind::prob), row({1.0}, FieldKind::mask));
    o.require(std::abs(t.a - 0.8) <= tol && std::abs(t.c - 0.2) <= tol && t.b == 0.0 && t.d == 0.0, "hit split");
    t = prob_contingency(row({0.8}, FieldKind::prob), row({0.0}, FieldKind::mask));
    o.require(std::abs(t.b - 0.8) <= tol && std::abs(t.d - 0.2) <= tol && t.a == 0.0 && t.c == 0.0, "miss split");

    // Two-sided neighbourhood cases: an observed pixel whose window peaks at 0.8.
    std::vector<double> pv(25, 0.1), yv(25, 0.0);
    pv[0] = 0.8;
    yv[12] = 1.0;
    const auto nt = nbhd_contingency(GridField(5, 5, 0.1, FieldKind::prob, pv), GridField(5, 5, 0.1, FieldKind::mask, yv),
                                     {2});
    o.require(std::abs(nt.a_obs - 0.8) <= tol && std::abs(nt.c - 0.2) <= tol, "a_obs/c");
    o.require(std::abs(nt.a_pred - 3.2) <= tol && std::abs(nt.b - 21.8) <= tol, "a_pred/b");
    const auto t1 = nbhd_contingency(row({0.5, 0.0}, FieldKind::prob), row({0, 1}, FieldKind::mask), {1});
    o.require(std::abs(t1.a_pred - 0.5) <= tol && std::abs(t1.b - 1.5) <= tol, "prediction with event nearby");
    const auto t2 = nbhd_contingency(row({0.2, 0.0, 0.0}, FieldKind::prob), row({0, 0, 1}, FieldKind::mask), {1});
    o.require(t2.a_pred == 0.0 && std::abs(t2.b - 2.2) <= tol, "prediction without event nearby");

    // Classical 2x2 example: a = b = c = d = 1.
    const auto p4 = row({1, 1, 0, 0}, FieldKind::prob);
    const auto y4 = row({1, 0, 1, 0}, FieldKind::mask);
    o.require(std::abs(pixelwise_score(ScoreKind::csi, p4, y4).value - 1.0 / 3.0) <= tol, "csi 1/3");
    for (auto k : {ScoreKind::heidke, ScoreKind::peirce, ScoreKind::gerrity})
        o.require(std::abs(pixelwise_score(k, p4, y4).value) <= tol, std::string(to_string(k)) + " 0");

    // Optima for a perfect forecast.
    auto eng = stream_engine(5, 0);
    const auto y = random_mask(eng, 32, 32, 0.2);
    const auto p = as_prob(y);
    const std::map<ScoreKind, double> optimum{{ScoreKind::brier, 0.0}, {ScoreKind::xent, 0.0},  {ScoreKind::fss, 1.0},
                                              {ScoreKind::iou, 1.0},   {ScoreKind::dice, 1.0},  {ScoreKind::csi, 1.0},
                                              {ScoreKind::heidke, 1.0}, {ScoreKind::peirce, 1.0}, {ScoreKind::gerrity, 1.0}};
    for (const auto& [k, best] : optimum) {
        // xent carries the log clamp: -log2(1 - 1e-7) ~ 1.4e-7.
        const double slack = k == ScoreKind::xent ? 1e-6 : tol;
        o.require(std::abs(pixelwise_score(k, p, y).value - best) <= slack, std::string(to_string(k)) + " optimum");
        if (supports_neighbourhood(k))
            o.require(std::abs(nbhd_score(k, p, y, {0}).value - best) <= slack,
                      std::string(to_string(k)) + " r=0 optimum");
    }
    for (int r : standard_half_widths())
        o.require(std::abs(nbhd_score(ScoreKind::fss, p, y, {r}).value - 1.0) <= tol, "fss optimum r=" + std::to_string(r));

    // Ranges over 10^4 random inputs.
    std::size_t violations = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t rows = 2 + uniform_index(eng, 7), cols = 2 + uniform_index(eng, 7);
        const auto pp = random_prob(eng, rows, cols);
        const auto yy = random_mask(eng, rows, cols, 0.05 + 0.5 * uniform01(eng));
        const int r = static_cast<int>(uniform_index(eng, 4));
        for (auto k : {ScoreKind::brier, ScoreKind::fss, ScoreKind::iou, ScoreKind::dice, ScoreKind::csi}) {
            const double s = pixelwise_score(k, pp, yy).value;
            const double sn = nbhd_score(k, pp, yy, {r}).value;
            violations += (s < 0.0 || s > 1.0 || sn < 0.0 || sn > 1.0) ? 1 : 0;
        }
        violations += pixelwise_score(ScoreKind::xent, pp, yy).value < 0.0 ? 1 : 0;
        violations += nbhd_score(ScoreKind::xent, pp, yy, {r}).value < 0.0 ? 1 : 0;
        for (auto k : {ScoreKind::heidke, ScoreKind::peirce, ScoreKind::gerrity}) {
            const double s = pixelwise_score(k, pp, yy).value;
            violations += (s < -1.0 - tol || s > 1.0 + tol) ? 1 : 0;
        }
    }
    o.require(violations == 0, std::to_string(violations) + " range violations");
    o.detail = "hand contingencies, 9 optima, 10^4 random range checks (" + std::to_string(violations) + " violations)" +
               (o.detail.empty() ? "" : " | " + o.detail);
    return o;
}

Outcome gradients() {
    Outcome o;
    Stopwatch sw;
    double worst = 0.0;
    std::string worst_id;
    std::size_t smooth_exclusions = 0, checked = 0, excluded = 0;
    for (std::uint64_t seed : {1, 2, 3}) {
        auto eng = stream_engine(seed, 0);
        const auto p = random_prob(eng, 16, 16, 0.02, 0.98);
        const auto y = random_mask(eng, 16, 16, 0.3);
        for (const auto& s : enumerate_configs()) {
            const auto r = grad_check(s, p, prepare_target(s, y), 1e-5);
            checked += r.checked;
            excluded += r.excluded;
            if (r.max_rel_err > worst) {
                worst = r.max_rel_err;
                worst_id = s.id();
            }
            if (s.score == ScoreKind::brier || s.score == ScoreKind::fss || s.score == ScoreKind::xent)
                smooth_exclusions += r.excluded;
        }
    }
    const double t = sw.seconds();
    o.require(worst <= 1e-5, "max relative error " + num(worst) + " at " + worst_id);
    o.require(smooth_exclusions == 0, std::to_string(smooth_exclusions) + " brier/fss/xent exclusions");
    o.require(t < 300.0, "runtime");
    o.detail = "336 specs x 3 fields, max rel err " + num(worst) + (worst_id.empty() ? "" : " (" + worst_id + ")") +
               ", " + std::to_string(checked) + " checked / " + std::to_string(excluded) +
               " excluded (brier/fss/xent: " + std::to_string(smooth_exclusions) + "), " + num(t) + " s" +
               (o.detail.empty() ? "" : " | " + o.detail);
    return o;
}

Outcome double_penalty() {
    Outcome o;
    const Cell disc{30.0, 30.0, 5.0, 1.0, 0.0};
    const auto y = rasterize_cells(std::span(&disc, 1), 61, 61, 0.0125);
    std::ostringstream detail;
    for (int k : {1, 2, 4}) {
        const auto p = synth_prob(y, {0, k, 0, 0.0, 0});
        const double pix = pixelwise_score(ScoreKind::brier, p, y).value;
        o.require(pix > 0.0, "pixelwise brier is 0 at k=" + std::to_string(k));
        detail << "k=" << k << ": pixelwise " << num(pix);
        for (int r : {k, k + 2}) {
            const double nb = nbhd_score(ScoreKind::brier, p, y, {r}).value;
            const auto ymax = max_filter(y, {r});
            const double ring = (ymax.sum() - p.sum()) / static_cast<double>(y.size());
            o.require(nb == 0.0, "nbhd brier k=" + std::to_string(k) + " r=" + std::to_string(r) + " is " + num(nb) +
                                     " (dilation ring " + num(ring) + ")");
            detail << ", r=" << r << " nbhd " << num(nb);
        }
        detail << "; ";
    }
    o.detail = detail.str() + (o.detail.empty() ? "" : "| " + o.detail);
    return o;
}

Outcome diagnostics() {
    Outcome o;
    // Calibrated: y ~ Bernoulli(p), p ~ U(0,1), N = 10^6.
    auto eng = stream_engine(8, 0);
    std::vector<GridField> ps, ys;
    for (int s = 0; s < 10; ++s) {
        std::vector<double> p(100000), y(100000);
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = uniform01(eng);
            y[i] = bernoulli(eng, p[i]) ? 1.0 : 0.0;
        }
        ps.emplace_back(100, 1000, 0.0125, FieldKind::prob, std::move(p));
        ys.emplace_back(100, 1000, 0.0125, FieldKind::mask, std::move(y));
    }
    const auto attr = attributes_diagram(ps, ys);
    o.require(attr.n == 1e6, "N");
    o.require(attr.rel < 0.001, "REL " + num(attr.rel));
    o.require(std::abs(attr.bss - 1.0 / 3.0) <= 0.01, "BSS " + num(attr.bss));

    // Climatology: constant forecast equal to the sample base rate.
    std::vector<GridField> clim;
    for (const auto& y : ys) clim.push_back(y.with_values(std::vector<double>(y.size(), attr.base_rate), FieldKind::prob));
    const double bss_clim = attributes_diagram(clim, ys).bss;
    o.require(bss_clim == 0.0, "climatology BSS " + num(bss_clim));

    // Perfect forecast.
    std::vector<GridField> perfect;
    for (const auto& y : ys) perfect.push_back(as_prob(y));
    const double a_perfect = performance_diagram(perfect, ys, default_thresholds()).aupd;
    o.require(a_perfect == 1.0, "perfect AUPD " + num(a_perfect));

    // Consistency bars at N_k = 10^4, pbar = 0.5.
    AttributesData bars;
    bars.bins.resize(1);
    bars.bins[0].count = 1e4;
    bars.bins[0].mean_forecast = 0.5;
    consistency_bars(bars, 100, 0.95, 8);
    const double width = *bars.bins[0].consistency_hi - *bars.bins[0].consistency_lo;
    const double oracle = 2.0 * 1.959963984540054 * std::sqrt(0.25 / 1e4);
    o.require(std::abs(width - oracle) <= 0.35 * oracle, "bar width " + num(width));

    o.detail = "REL " + num(attr.rel) + ", BSS " + num(attr.bss) + " (analytic 1/3), climatology BSS " + num(bss_clim) +
               ", perfect AUPD " + num(a_perfect) + ", bar width " + num(width) + " vs binomial " + num(oracle) +
               (o.detail.empty() ? "" : " | " + o.detail);
    return o;
}

Outcome ranking() {
    Outcome o;
    auto eng = stream_engine(9, 0);
    MetricMatrix mm;
    for (int m = 0; m < 120; ++m) mm.models.push_back("model_" + std::to_string(1000 + m));
    mm.metrics = enumerate_configs();
    // Coarse values force ties in every column.
    for (std::size_t i = 0; i < 120 * 336; ++i) mm.values.push_back(std::floor(uniform01(eng) * 40.0) / 40.0);
    const auto ranks = rank_models(mm);
    std::size_t bad_sums = 0;
    for (std::size_t k = 0; k < 336; ++k) {
        double sum = 0.0;
        for (std::size_t m = 0; m < 120; ++m) sum += ranks.at(m, k);
        bad_sums += sum == 120.0 * 121.0 / 2.0 ? 0 : 1;
    }
    o.require(bad_sums == 0, std::to_string(bad_sums) + " columns with wrong rank sum");
    const auto winners = best_per_filter(summary_scores(mm, ranks));
    o.require(winners.size() == 40, std::to_string(winners.size()) + " winner rows");

    auto transformed = mm;
    for (std::size_t k = 0; k < 336; ++k) {
        const double a = 0.5 + uniform01(eng), b = uniform01(eng);
        for (std::size_t m = 0; m < 120; ++m) {
            auto& v = transformed.values[m * 336 + k];
            v = k % 2 ? std::exp(a * v) + b : a * v * v * v + b;
        }
    }
    o.require(rank_models(transformed).values == ranks.values, "ranks changed under monotone transforms");
    o.detail = "rank sums exact on 336 tied columns, " + std::to_string(winners.size()) +
               " winner rows from 120 x 336, monotone-transform invariant" + (o.detail.empty() ? "" : " | " + o.detail);
    return o;
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        out[fs::relative(e.path(), root).string()] = ss.str();
    }
    return out;
}

double pipeline(const fs::path& dir, int jobs, std::string& log) {
    Stopwatch sw;
    std::ostringstream out, err;
    const auto d = dir.string();
    const auto j = std::to_string(jobs);
    auto run = [&](std::vector<std::string> args) {
        args.insert(args.begin(), "selfs");
        const int code = run_cli(args, out, err);
        if (code != 0) throw std::runtime_error("'" + args[1] + "' exited " + std::to_string(code) + ": " + err.str());
    };
    run({"synth", "--out", d + "/data", "--steps", "50", "--seed", "2024", "--model", "sharp:0:0:0:0.05", "--model",
         "smooth:2:2:1:0.05", "--jobs", j});
    std::vector<std::string> obs;
    for (int s = 0; s < 50; ++s) {
        char name[32];
        std::snprintf(name, sizeof name, "/data/obs/t%03d.grid", s);
        obs.push_back(d + name);
    }
    auto filter = [&](const std::string& spec, const std::string& sub) {
        std::vector<std::string> args{"filter", "--spec", spec, "--out-dir", d + sub, "--jobs", j};
        args.insert(args.end(), obs.begin(), obs.end());
        run(args);
    };
    filter("nbhd_max_r4", "/filtered/nbhd_max_r4");
    filter("F0.5-2", "/filtered/F0.5-2");
    run({"score", "--obs", d + "/data/obs", "--model", "sharp=" + d + "/data/sharp", "--model",
         "smooth=" + d + "/data/smooth", "--all-336", "--out", d + "/scores.csv", "--jobs", j});
    run({"rank", "--scores", d + "/scores.csv", "--out-dir", d + "/rank"});
    run({"eval", "--obs", d + "/data/obs", "--model", "sharp=" + d + "/data/sharp", "--model",
         "smooth=" + d + "/data/smooth", "--compare", "sharp", "smooth", "--out-dir", d + "/eval", "--seed", "7",
         "--jobs", j});
    log = out.str();
    return sw.seconds();
}

Outcome determinism() {
    Outcome o;
    const auto root = fs::temp_directory_path() / ("selfs_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    std::string log_a, log_b;
    double ta = 0.0, tb = 0.0;
    try {
        ta = pipeline(root / "a", 1, log_a);
        tb = pipeline(root / "b", 2, log_b);
    } catch (const std::exception& e) {
        fs::remove_all(root);
        o.require(false, e.what());
        return o;
    }
    const auto a = snapshot(root / "a");
    const auto b = snapshot(root / "b");
    std::size_t differing = 0, bytes = 0;
    for (const auto& [name, content] : a) {
        bytes += content.size();
        const auto it = b.find(name);
        differing += (it == b.end() || it->second != content) ? 1 : 0;
    }
    o.require(a.size() == b.size(), "file sets differ");
    o.require(differing == 0, std::to_string(differing) + " files differ");
    o.require(ta < 1800.0 && tb < 1800.0, "runtime");
    std::size_t score_rows = 0;
    if (const auto it = a.find("scores.csv"); it != a.end())
        score_rows = static_cast<std::size_t>(std::count(it->second.begin(), it->second.end(), '\n')) - 1;
    o.require(score_rows == 2 * 336, "score rows " + std::to_string(score_rows));
    fs::remove_all(root);
    o.detail = std::to_string(a.size()) + " files (" + std::to_string(bytes / 1024) + " KiB) byte-identical across runs (jobs 1 vs 2); " +
               "205x205, 50 steps, 336 metrics; " + num(ta) + " s and " + num(tb) + " s" +
               (o.detail.empty() ? "" : " | " + o.detail);
    return o;
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "configuration census", census},
        {2, "window and gain constants", constants},
        {3, "transform exactness", transforms},
        {4, "band complementarity", complementarity},
        {5, "score correctness", scores},
        {6, "gradient fidelity", gradients},
        {7, "double-penalty demonstration", double_penalty},
        {8, "diagnostics sanity", diagnostics},
        {9, "ranking identities", ranking},
        {10, "end-to-end determinism", determinism},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
    int failures = 0;
    for (const auto& c : all) {
        if (!wanted.empty() && !wanted.contains(c.id)) continue;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  #" << c.id << " " << c.name << ": " << o.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
