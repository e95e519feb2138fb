#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selfs/grid.hpp"

namespace selfs {

inline constexpr std::size_t kReliabilityBins = 20;

/// 0.00, 0.01, ..., 1.00
std::vector<double> default_thresholds();

/// Sufficient statistics for one time step; steps are the bootstrap resampling unit.
struct StepTally {
    std::array<double, kReliabilityBins> count{};
    std::array<double, kReliabilityBins> sum_p{};
    std::array<double, kReliabilityBins> sum_y{};
    double n = 0.0;
    double events = 0.0;
    double sq_err = 0.0;
    /// Indexed by the number of thresholds <= p, split by observed outcome.
    std::vector<double> event_hist;
    std::vector<double> nonevent_hist;

    void merge(const StepTally& other);
};

StepTally tally_step(const GridField& p, const GridField& y, std::span<const double> thresholds);

/// Tallies of the selected steps merged in the given order.
StepTally combine(std::span<const StepTally> steps, std::span<const std::size_t> indices);

struct ReliabilityBin {
    double lo = 0.0;
    double hi = 0.0;
    double count = 0.0;
    std::optional<double> mean_forecast;
    std::optional<double> event_frequency;
    std::optional<double> consistency_lo;
    std::optional<double> consistency_hi;
};

struct AttributesData {
    std::vector<ReliabilityBin> bins;
    double n = 0.0;
    double base_rate = 0.0;
    double rel = 0.0;
    double bs = 0.0;
    double bs_clim = 0.0;
    double bss = 0.0;
};

/**
 * Attributes diagram over matched samples. BS_clim is accumulated in the
 * same order as BS, so a forecast equal to the base rate gives BSS = 0 exactly.
 */
AttributesData attributes_diagram(std::span<const GridField> p, std::span<const GridField> y);

/// Same statistics from merged tallies; BS_clim uses its closed form ybar(1 - ybar).
AttributesData attributes_from(const StepTally& t);

/// Bars from n_boot resamples of N_k Bernoulli(pbar_k) outcomes per bin.
void consistency_bars(AttributesData& attr, int n_boot = 100, double level = 0.95, std::uint64_t seed = 0);

struct PerformancePoint {
    double threshold = 0.0;
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
    std::optional<double> pod;
    std::optional<double> sr;
    std::optional<double> csi;
    std::optional<double> bias;
};

struct PerformanceData {
    std::vector<PerformancePoint> points;
    double aupd = 0.0;
    bool no_events = false;
};

PerformanceData performance_diagram(std::span<const GridField> p, std::span<const GridField> y,
                                    std::span<const double> thresholds);
PerformanceData performance_from(const StepTally& t, std::span<const double> thresholds);

/**
 * Trapezoidal area under the (SR, POD) polyline sorted by SR. The curve is
 * closed with (1, 0) on the right and, on the left, extended at the POD of
 * its smallest-SR point down to SR = 0.
 */
double aupd(std::span<const PerformancePoint> points);

/// Linear-interpolation (type 7) percentile, q in [0, 1].
double percentile(std::vector<double> values, double q);

struct BootstrapCI {
    double estimate = 0.0;  ///< stat on the original sample set
    double mean = 0.0;      ///< mean over resamples
    double lo = 0.0;
    double hi = 0.0;
};

/// Statistic over a multiset of sample indices.
using SampleStat = std::function<double(std::span<const std::size_t>)>;

BootstrapCI bootstrap_ci(const SampleStat& stat, std::size_t n_samples, int n_boot = 1000, double level = 0.95,
                         std::uint64_t seed = 0);

struct PairedTest {
    double diff = 0.0;       ///< A - B on the original samples
    double diff_mean = 0.0;  ///< mean resampled difference
    double p_value = 1.0;
    bool significant_95 = false;
};

PairedTest paired_bootstrap_test(const SampleStat& a, const SampleStat& b, std::size_t n_samples, int n_boot = 1000,
                                 std::uint64_t seed = 0);

struct Comparison {
    std::string model_a;
    std::string model_b;
    std::map<std::string, PairedTest> tests;  ///< keyed by statistic name
};

struct EvalReport {
    std::string model;
    std::size_t n_steps = 0;
    AttributesData attributes;
    PerformanceData performance;
    std::map<std::string, BootstrapCI> ci;  ///< rel, bss, aupd
    int n_boot = 1000;
    int n_boot_bars = 100;
    double level = 0.95;
    std::uint64_t seed = 0;
    std::optional<Comparison> comparison;
};

/// Full evaluation of one model: diagrams, bars and per-step bootstrap intervals.
EvalReport evaluate_model(std::string model, std::span<const GridField> p, std::span<const GridField> y,
                          std::span<const double> thresholds, int n_boot = 1000, int n_boot_bars = 100,
                          double level = 0.95, std::uint64_t seed = 0);

/// Paired tests on rel, bss and aupd with time steps resampled jointly.
Comparison compare_models(std::string name_a, std::span<const GridField> pa, std::string name_b,
                          std::span<const GridField> pb, std::span<const GridField> y,
                          std::span<const double> thresholds, int n_boot = 1000, std::uint64_t seed = 0);

std::string report_json(const EvalReport& report);
EvalReport parse_report_json(std::string_view text);

/// One row per bin, per threshold and per summary statistic.
std::string report_csv(const EvalReport& report);
std::size_t report_summary_rows(const EvalReport& report);

/// Writes <stem>.json and <stem>.csv atomically.
void emit_report(const EvalReport& report, const std::filesystem::path& stem);

}  // namespace selfs
