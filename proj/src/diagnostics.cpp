#include "selfs/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "selfs/errors.hpp"
#include "selfs/rng.hpp"
#include "selfs/scores.hpp"

namespace selfs {

namespace {

using Json = nlohmann::ordered_json;

std::size_t bin_of(double p) {
    return std::min(static_cast<std::size_t>(p * static_cast<double>(kReliabilityBins)), kReliabilityBins - 1);
}

void check_thresholds(std::span<const double> thresholds) {
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
        if (!(thresholds[j] >= 0.0 && thresholds[j] <= 1.0)) throw ArgumentError("thresholds must lie in [0,1]");
        if (j > 0 && !(thresholds[j] > thresholds[j - 1]))
            throw ArgumentError("thresholds must be strictly ascending");
    }
}

void check_samples(std::span<const GridField> p, std::span<const GridField> y) {
    if (p.empty()) throw ArgumentError("diagnostics need at least one sample");
    if (p.size() != y.size())
        throw ArgumentError("forecast and observation sample counts differ (" + std::to_string(p.size()) + " vs " +
                            std::to_string(y.size()) + ")");
}

std::vector<StepTally> tally_all(std::span<const GridField> p, std::span<const GridField> y,
                                 std::span<const double> thresholds) {
    check_samples(p, y);
    std::vector<StepTally> out;
    out.reserve(p.size());
    for (std::size_t s = 0; s < p.size(); ++s) out.push_back(tally_step(p[s], y[s], thresholds));
    return out;
}

std::vector<std::size_t> identity(std::size_t n) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return idx;
}

// Shared by both attribute paths once BS_clim is known.
AttributesData attributes_core(const StepTally& t, double clim_sq_err) {
    if (t.n <= 0.0) throw ArgumentError("no scored pixels in the sample set");
    AttributesData out;
    out.n = t.n;
    out.base_rate = t.events / t.n;
    double rel = 0.0;
    for (std::size_t k = 0; k < kReliabilityBins; ++k) {
        ReliabilityBin bin;
        bin.lo = static_cast<double>(k) / static_cast<double>(kReliabilityBins);
        bin.hi = static_cast<double>(k + 1) / static_cast<double>(kReliabilityBins);
        bin.count = t.count[k];
        if (bin.count > 0.0) {
            const double pbar = t.sum_p[k] / bin.count;
            const double ybar = t.sum_y[k] / bin.count;
            bin.mean_forecast = pbar;
            bin.event_frequency = ybar;
            rel += bin.count * (pbar - ybar) * (pbar - ybar);
        }
        out.bins.push_back(bin);
    }
    out.rel = rel / t.n;
    out.bs = t.sq_err / t.n;
    out.bs_clim = clim_sq_err / t.n;
    // A sample set with a single outcome has no climatological spread; a
    // forecast that matches it is perfect, anything else is scored as no skill.
    if (out.bs_clim > 0.0)
        out.bss = 1.0 - out.bs / out.bs_clim;
    else
        out.bss = out.bs == 0.0 ? 1.0 : 0.0;
    return out;
}

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> opt_from(const Json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

std::string csv_opt(const std::optional<double>& v) { return v ? format_double(*v) : "null"; }

}  // namespace

std::vector<double> default_thresholds() {
    std::vector<double> t(101);
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = static_cast<double>(j) / 100.0;
    return t;
}

void StepTally::merge(const StepTally& o) {
    for (std::size_t k = 0; k < kReliabilityBins; ++k) {
        count[k] += o.count[k];
        sum_p[k] += o.sum_p[k];
        sum_y[k] += o.sum_y[k];
    }
    n += o.n;
    events += o.events;
    sq_err += o.sq_err;
    if (event_hist.empty()) {
        event_hist.assign(o.event_hist.size(), 0.0);
        nonevent_hist.assign(o.nonevent_hist.size(), 0.0);
    }
    if (event_hist.size() != o.event_hist.size()) throw ArgumentError("tallies use different threshold sets");
    for (std::size_t j = 0; j < event_hist.size(); ++j) {
        event_hist[j] += o.event_hist[j];
        nonevent_hist[j] += o.nonevent_hist[j];
    }
}

StepTally tally_step(const GridField& p, const GridField& y, std::span<const double> thresholds) {
    detail::require_same_shape(p, y);
    detail::require_probability(p, "forecast");
    detail::require_binary(y, "observation");
    check_thresholds(thresholds);
    const auto scored = detail::joint_scored(p, y);
    StepTally t;
    t.event_hist.assign(thresholds.size() + 1, 0.0);
    t.nonevent_hist.assign(thresholds.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!scored[i]) continue;
        const double pi = p[i], yi = y[i];
        const std::size_t k = bin_of(pi);
        t.count[k] += 1.0;
        t.sum_p[k] += pi;
        t.sum_y[k] += yi;
        t.n += 1.0;
        t.events += yi;
        t.sq_err += (pi - yi) * (pi - yi);
        const auto j = static_cast<std::size_t>(std::upper_bound(thresholds.begin(), thresholds.end(), pi) -
                                                thresholds.begin());
        (yi == 1.0 ? t.event_hist : t.nonevent_hist)[j] += 1.0;
    }
    return t;
}

StepTally combine(std::span<const StepTally> steps, std::span<const std::size_t> indices) {
    StepTally out;
    for (auto i : indices) {
        if (i >= steps.size()) throw ArgumentError("sample index out of range");
        out.merge(steps[i]);
    }
    return out;
}

AttributesData attributes_from(const StepTally& t) {
    const double ybar = t.n > 0.0 ? t.events / t.n : 0.0;
    return attributes_core(t, t.n * ybar * (1.0 - ybar));
}

AttributesData attributes_diagram(std::span<const GridField> p, std::span<const GridField> y) {
    const auto steps = tally_all(p, y, {});
    const auto total = combine(steps, identity(steps.size()));
    if (total.n <= 0.0) throw ArgumentError("no scored pixels in the sample set");
    const double ybar = total.events / total.n;
    // Same per-pixel expression and summation order as tally_step's sq_err.
    double clim = 0.0;
    for (std::size_t s = 0; s < p.size(); ++s) {
        const auto scored = detail::joint_scored(p[s], y[s]);
        double step = 0.0;
        for (std::size_t i = 0; i < p[s].size(); ++i) {
            if (!scored[i]) continue;
            const double pi = ybar, yi = y[s][i];
            step += (pi - yi) * (pi - yi);
        }
        clim += step;
    }
    return attributes_core(total, clim);
}

void consistency_bars(AttributesData& attr, int n_boot, double level, std::uint64_t seed) {
    if (n_boot < 2) throw ArgumentError("consistency bars need n_boot >= 2");
    if (!(level > 0.0 && level < 1.0)) throw ArgumentError("confidence level must lie in (0,1)");
    const double tail = (1.0 - level) / 2.0;
    for (std::size_t k = 0; k < attr.bins.size(); ++k) {
        auto& bin = attr.bins[k];
        bin.consistency_lo.reset();
        bin.consistency_hi.reset();
        if (bin.count <= 0.0 || !bin.mean_forecast) continue;
        const auto nk = static_cast<std::uint64_t>(std::llround(bin.count));
        const double pk = *bin.mean_forecast;
        std::vector<double> freq(static_cast<std::size_t>(n_boot));
        for (int b = 0; b < n_boot; ++b) {
            auto eng = stream_engine(seed, (static_cast<std::uint64_t>(k) << 32) | static_cast<std::uint64_t>(b));
            std::uint64_t hits = 0;
            for (std::uint64_t i = 0; i < nk; ++i) hits += bernoulli(eng, pk) ? 1 : 0;
            freq[static_cast<std::size_t>(b)] = static_cast<double>(hits) / static_cast<double>(nk);
        }
        bin.consistency_lo = percentile(freq, tail);
        bin.consistency_hi = percentile(std::move(freq), 1.0 - tail);
    }
}

PerformanceData performance_from(const StepTally& t, std::span<const double> thresholds) {
    check_thresholds(thresholds);
    if (t.event_hist.size() != thresholds.size() + 1) throw ArgumentError("tally built with a different threshold set");
    PerformanceData out;
    const double events = std::accumulate(t.event_hist.begin(), t.event_hist.end(), 0.0);
    const double nonevents = std::accumulate(t.nonevent_hist.begin(), t.nonevent_hist.end(), 0.0);
    out.no_events = events == 0.0;
    // Forecast "yes" at threshold j iff j < (number of thresholds <= p).
    double a = 0.0, b = 0.0;
    out.points.resize(thresholds.size());
    for (std::size_t j = thresholds.size(); j-- > 0;) {
        a += t.event_hist[j + 1];
        b += t.nonevent_hist[j + 1];
        auto& pt = out.points[j];
        pt.threshold = thresholds[j];
        pt.a = a;
        pt.b = b;
        pt.c = events - a;
        pt.d = nonevents - b;
        if (events > 0.0) pt.pod = a / events;
        if (a + b > 0.0) pt.sr = a / (a + b);
        if (pt.pod && pt.sr) {
            pt.csi = a > 0.0 ? 1.0 / (1.0 / *pt.pod + 1.0 / *pt.sr - 1.0) : 0.0;
            if (*pt.sr > 0.0) pt.bias = *pt.pod / *pt.sr;
        }
    }
    out.aupd = out.no_events ? 0.0 : aupd(out.points);
    return out;
}

PerformanceData performance_diagram(std::span<const GridField> p, std::span<const GridField> y,
                                    std::span<const double> thresholds) {
    const auto steps = tally_all(p, y, thresholds);
    return performance_from(combine(steps, identity(steps.size())), thresholds);
}

double aupd(std::span<const PerformancePoint> points) {
    std::vector<std::pair<double, double>> curve;
    for (const auto& pt : points)
        if (pt.pod && pt.sr) curve.emplace_back(*pt.sr, *pt.pod);
    curve.emplace_back(1.0, 0.0);
    // Equal SR: higher POD comes from the lower threshold, so it goes first.
    std::sort(curve.begin(), curve.end(), [](const auto& l, const auto& r) {
        return l.first != r.first ? l.first < r.first : l.second > r.second;
    });
    double area = curve.front().first * curve.front().second;
    for (std::size_t i = 1; i < curve.size(); ++i)
        area += 0.5 * (curve[i].first - curve[i - 1].first) * (curve[i].second + curve[i - 1].second);
    return std::clamp(area, 0.0, 1.0);
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw ArgumentError("percentile of an empty set");
    if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError("percentile rank must lie in [0,1]");
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

void check_bootstrap(std::size_t n_samples, int n_boot) {
    if (n_samples < 2) throw ArgumentError("bootstrap needs at least 2 samples");
    if (n_boot < 2) throw ArgumentError("bootstrap needs n_boot >= 2");
}

std::vector<std::size_t> resample(std::size_t n, std::uint64_t seed, int iteration) {
    auto eng = stream_engine(seed, static_cast<std::uint64_t>(iteration));
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = static_cast<std::size_t>(uniform_index(eng, n));
    return idx;
}

}  // namespace

BootstrapCI bootstrap_ci(const SampleStat& stat, std::size_t n_samples, int n_boot, double level,
                         std::uint64_t seed) {
    check_bootstrap(n_samples, n_boot);
    if (!(level > 0.0 && level < 1.0)) throw ArgumentError("confidence level must lie in (0,1)");
    BootstrapCI out;
    out.estimate = stat(identity(n_samples));
    std::vector<double> values(static_cast<std::size_t>(n_boot));
    for (int b = 0; b < n_boot; ++b) values[static_cast<std::size_t>(b)] = stat(resample(n_samples, seed, b));
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n_boot);
    const double tail = (1.0 - level) / 2.0;
    out.lo = percentile(values, tail);
    out.hi = percentile(std::move(values), 1.0 - tail);
    return out;
}

PairedTest paired_bootstrap_test(const SampleStat& a, const SampleStat& b, std::size_t n_samples, int n_boot,
                                 std::uint64_t seed) {
    check_bootstrap(n_samples, n_boot);
    PairedTest out;
    const auto all = identity(n_samples);
    out.diff = a(all) - b(all);
    double sum = 0.0, at_or_below = 0.0, at_or_above = 0.0;
    for (int it = 0; it < n_boot; ++it) {
        const auto idx = resample(n_samples, seed, it);
        const double d = a(idx) - b(idx);
        sum += d;
        at_or_below += d <= 0.0 ? 1.0 : 0.0;
        at_or_above += d >= 0.0 ? 1.0 : 0.0;
    }
    out.diff_mean = sum / n_boot;
    out.p_value = std::min(1.0, 2.0 * std::min(at_or_below, at_or_above) / n_boot);
    out.significant_95 = out.p_value < 0.05;
    return out;
}

EvalReport evaluate_model(std::string model, std::span<const GridField> p, std::span<const GridField> y,
                          std::span<const double> thresholds, int n_boot, int n_boot_bars, double level,
                          std::uint64_t seed) {
    EvalReport r;
    r.model = std::move(model);
    r.n_steps = p.size();
    r.n_boot = n_boot;
    r.n_boot_bars = n_boot_bars;
    r.level = level;
    r.seed = seed;
    r.attributes = attributes_diagram(p, y);
    consistency_bars(r.attributes, n_boot_bars, level, seed);
    const auto steps = tally_all(p, y, thresholds);
    r.performance = performance_from(combine(steps, identity(steps.size())), thresholds);
    if (steps.size() >= 2) {
        const auto ts = std::vector<double>(thresholds.begin(), thresholds.end());
        r.ci["rel"] = bootstrap_ci([&](auto idx) { return attributes_from(combine(steps, idx)).rel; }, steps.size(),
                                   n_boot, level, seed);
        r.ci["bss"] = bootstrap_ci([&](auto idx) { return attributes_from(combine(steps, idx)).bss; }, steps.size(),
                                   n_boot, level, seed);
        r.ci["aupd"] = bootstrap_ci([&](auto idx) { return performance_from(combine(steps, idx), ts).aupd; },
                                    steps.size(), n_boot, level, seed);
    }
    return r;
}

Comparison compare_models(std::string name_a, std::span<const GridField> pa, std::string name_b,
                          std::span<const GridField> pb, std::span<const GridField> y,
                          std::span<const double> thresholds, int n_boot, std::uint64_t seed) {
    const auto ta = tally_all(pa, y, thresholds);
    const auto tb = tally_all(pb, y, thresholds);
    Comparison c{std::move(name_a), std::move(name_b), {}};
    using Extract = std::function<double(const StepTally&)>;
    const std::vector<std::pair<std::string, Extract>> stats{
        {"rel", [](const StepTally& t) { return attributes_from(t).rel; }},
        {"bss", [](const StepTally& t) { return attributes_from(t).bss; }},
        {"aupd", [&](const StepTally& t) { return performance_from(t, thresholds).aupd; }},
    };
    for (const auto& [name, f] : stats) {
        c.tests[name] = paired_bootstrap_test([&, f = f](auto idx) { return f(combine(ta, idx)); },
                                              [&, f = f](auto idx) { return f(combine(tb, idx)); }, ta.size(),
                                              n_boot, seed);
    }
    return c;
}

// ---------------------------------------------------------------------------
// Report serialization

std::string report_json(const EvalReport& r) {
    Json j;
    j["schema"] = "selfs.eval/1";
    j["model"] = r.model;
    j["n_steps"] = r.n_steps;
    j["n_pixels"] = r.attributes.n;
    j["config"] = {{"n_boot", r.n_boot}, {"n_boot_bars", r.n_boot_bars}, {"level", r.level}, {"seed", r.seed}};
    Json bins = Json::array();
    for (const auto& b : r.attributes.bins)
        bins.push_back({{"lo", b.lo},
                        {"hi", b.hi},
                        {"count", b.count},
                        {"mean_forecast", opt(b.mean_forecast)},
                        {"event_frequency", opt(b.event_frequency)},
                        {"consistency_lo", opt(b.consistency_lo)},
                        {"consistency_hi", opt(b.consistency_hi)}});
    j["attributes"] = {{"base_rate", r.attributes.base_rate}, {"rel", r.attributes.rel}, {"bs", r.attributes.bs},
                       {"bs_clim", r.attributes.bs_clim},     {"bss", r.attributes.bss}, {"bins", bins}};
    Json pts = Json::array();
    for (const auto& p : r.performance.points)
        pts.push_back({{"threshold", p.threshold},
                       {"a", p.a},
                       {"b", p.b},
                       {"c", p.c},
                       {"d", p.d},
                       {"pod", opt(p.pod)},
                       {"sr", opt(p.sr)},
                       {"csi", opt(p.csi)},
                       {"bias", opt(p.bias)}});
    j["performance"] = {{"aupd", r.performance.aupd}, {"no_events", r.performance.no_events}, {"points", pts}};
    Json ci = Json::object();
    for (const auto& [name, c] : r.ci) ci[name] = {{"estimate", c.estimate}, {"mean", c.mean}, {"lo", c.lo}, {"hi", c.hi}};
    j["ci"] = ci;
    if (r.comparison) {
        Json tests = Json::object();
        for (const auto& [name, t] : r.comparison->tests)
            tests[name] = {{"diff", t.diff},
                           {"diff_mean", t.diff_mean},
                           {"p_value", t.p_value},
                           {"significant_95", t.significant_95}};
        j["comparison"] = {{"model_a", r.comparison->model_a}, {"model_b", r.comparison->model_b}, {"tests", tests}};
    } else {
        j["comparison"] = nullptr;
    }
    return j.dump(2) + "\n";
}

EvalReport parse_report_json(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("eval report is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("schema") != "selfs.eval/1") throw FormatError("unknown eval report schema");
        EvalReport r;
        r.model = j.at("model").get<std::string>();
        r.n_steps = j.at("n_steps").get<std::size_t>();
        const auto& cfg = j.at("config");
        r.n_boot = cfg.at("n_boot").get<int>();
        r.n_boot_bars = cfg.at("n_boot_bars").get<int>();
        r.level = cfg.at("level").get<double>();
        r.seed = cfg.at("seed").get<std::uint64_t>();
        const auto& a = j.at("attributes");
        r.attributes.n = j.at("n_pixels").get<double>();
        r.attributes.base_rate = a.at("base_rate").get<double>();
        r.attributes.rel = a.at("rel").get<double>();
        r.attributes.bs = a.at("bs").get<double>();
        r.attributes.bs_clim = a.at("bs_clim").get<double>();
        r.attributes.bss = a.at("bss").get<double>();
        for (const auto& b : a.at("bins"))
            r.attributes.bins.push_back({b.at("lo").get<double>(), b.at("hi").get<double>(), b.at("count").get<double>(),
                                         opt_from(b.at("mean_forecast")), opt_from(b.at("event_frequency")),
                                         opt_from(b.at("consistency_lo")), opt_from(b.at("consistency_hi"))});
        const auto& perf = j.at("performance");
        r.performance.aupd = perf.at("aupd").get<double>();
        r.performance.no_events = perf.at("no_events").get<bool>();
        for (const auto& p : perf.at("points"))
            r.performance.points.push_back({p.at("threshold").get<double>(), p.at("a").get<double>(),
                                            p.at("b").get<double>(), p.at("c").get<double>(), p.at("d").get<double>(),
                                            opt_from(p.at("pod")), opt_from(p.at("sr")), opt_from(p.at("csi")),
                                            opt_from(p.at("bias"))});
        for (const auto& [name, c] : j.at("ci").items())
            r.ci[name] = {c.at("estimate").get<double>(), c.at("mean").get<double>(), c.at("lo").get<double>(),
                          c.at("hi").get<double>()};
        if (const auto& cmp = j.at("comparison"); !cmp.is_null()) {
            Comparison c{cmp.at("model_a").get<std::string>(), cmp.at("model_b").get<std::string>(), {}};
            for (const auto& [name, t] : cmp.at("tests").items())
                c.tests[name] = {t.at("diff").get<double>(), t.at("diff_mean").get<double>(),
                                 t.at("p_value").get<double>(), t.at("significant_95").get<bool>()};
            r.comparison = std::move(c);
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("eval report does not match the schema: ") + e.what());
    }
}

namespace {

constexpr const char* kCsvHeader =
    "section,key,lo,hi,count,mean_forecast,event_frequency,consistency_lo,consistency_hi,"
    "threshold,a,b,c,d,pod,sr,csi,bias,value,ci_lo,ci_hi,p_value\n";

// 22 columns; fills the given ones, leaves the rest empty.
struct CsvRow {
    std::array<std::string, 22> cells;
    std::string str() const {
        std::string out;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        return out + '\n';
    }
};

}  // namespace

std::size_t report_summary_rows(const EvalReport& r) {
    return 7 + (r.comparison ? r.comparison->tests.size() : 0);
}

std::string report_csv(const EvalReport& r) {
    std::string out = kCsvHeader;
    const auto& f = format_double;
    for (std::size_t k = 0; k < r.attributes.bins.size(); ++k) {
        const auto& b = r.attributes.bins[k];
        CsvRow row;
        row.cells[0] = "bin";
        row.cells[1] = std::to_string(k);
        row.cells[2] = f(b.lo);
        row.cells[3] = f(b.hi);
        row.cells[4] = f(b.count);
        row.cells[5] = csv_opt(b.mean_forecast);
        row.cells[6] = csv_opt(b.event_frequency);
        row.cells[7] = csv_opt(b.consistency_lo);
        row.cells[8] = csv_opt(b.consistency_hi);
        out += row.str();
    }
    for (std::size_t j = 0; j < r.performance.points.size(); ++j) {
        const auto& p = r.performance.points[j];
        CsvRow row;
        row.cells[0] = "threshold";
        row.cells[1] = std::to_string(j);
        row.cells[9] = f(p.threshold);
        row.cells[10] = f(p.a);
        row.cells[11] = f(p.b);
        row.cells[12] = f(p.c);
        row.cells[13] = f(p.d);
        row.cells[14] = csv_opt(p.pod);
        row.cells[15] = csv_opt(p.sr);
        row.cells[16] = csv_opt(p.csi);
        row.cells[17] = csv_opt(p.bias);
        out += row.str();
    }
    auto summary = [&](const std::string& key, double value, const char* ci_name) {
        CsvRow row;
        row.cells[0] = "summary";
        row.cells[1] = key;
        row.cells[18] = f(value);
        if (ci_name) {
            const auto it = r.ci.find(ci_name);
            row.cells[19] = it == r.ci.end() ? "null" : f(it->second.lo);
            row.cells[20] = it == r.ci.end() ? "null" : f(it->second.hi);
        }
        out += row.str();
    };
    summary("n_pixels", r.attributes.n, nullptr);
    summary("base_rate", r.attributes.base_rate, nullptr);
    summary("rel", r.attributes.rel, "rel");
    summary("bs", r.attributes.bs, nullptr);
    summary("bs_clim", r.attributes.bs_clim, nullptr);
    summary("bss", r.attributes.bss, "bss");
    summary("aupd", r.performance.aupd, "aupd");
    if (r.comparison) {
        for (const auto& [name, t] : r.comparison->tests) {
            CsvRow row;
            row.cells[0] = "summary";
            row.cells[1] = "paired_" + name;
            row.cells[18] = f(t.diff);
            row.cells[21] = f(t.p_value);
            out += row.str();
        }
    }
    return out;
}

void emit_report(const EvalReport& report, const std::filesystem::path& stem) {
    auto json_path = stem;
    json_path += ".json";
    auto csv_path = stem;
    csv_path += ".csv";
    if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
    write_file_atomic(json_path, report_json(report));
    write_file_atomic(csv_path, report_csv(report));
}

}  // namespace selfs
