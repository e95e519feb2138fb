#include "selfs/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <charconv>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "selfs/diagnostics.hpp"
#include "selfs/errors.hpp"
#include "selfs/fourier.hpp"
#include "selfs/loss.hpp"
#include "selfs/nbhd.hpp"
#include "selfs/ranking.hpp"
#include "selfs/rng.hpp"
#include "selfs/synth.hpp"
#include "selfs/wavelet.hpp"

namespace selfs {

namespace fs = std::filesystem;

namespace {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// helpers

/// Runs fn(0..n-1) on up to `jobs` threads. Results must go to per-index slots;
/// the first failure (lowest index) is rethrown after all workers stop.
template <class F>
void parallel_for(std::size_t n, int jobs, F&& fn) {
    const auto workers = static_cast<std::size_t>(std::max(1, jobs));
    if (workers == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex mu;
    std::size_t failed_index = n;
    std::exception_ptr error;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
        pool.emplace_back([&] {
            while (!failed.load()) {
                const auto i = next.fetch_add(1);
                if (i >= n) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (i < failed_index) {
                        failed_index = i;
                        error = std::current_exception();
                    }
                    failed = true;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::vector<fs::path> grid_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".grid") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    if (out.empty()) throw IoError("no .grid files in " + dir.string());
    return out;
}

struct NamedDir {
    std::string name;
    fs::path dir;
};

void check_model_name(const std::string& name) {
    if (name.empty() || !std::all_of(name.begin(), name.end(), [](unsigned char c) {
            return std::isalnum(c) || c == '_' || c == '-' || c == '.';
        }))
        throw ArgumentError("model name '" + name + "' must be non-empty and use only [A-Za-z0-9_.-]");
}

std::vector<NamedDir> parse_models(const std::vector<std::string>& specs) {
    std::vector<NamedDir> out;
    std::set<std::string> seen;
    for (const auto& s : specs) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ArgumentError("--model expects NAME=DIR, got '" + s + "'");
        NamedDir m{s.substr(0, eq), s.substr(eq + 1)};
        check_model_name(m.name);
        if (!seen.insert(m.name).second) throw ArgumentError("model '" + m.name + "' given twice");
        out.push_back(std::move(m));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return out;
}

/// Matched time steps: the model directory must hold exactly the observation file names.
std::vector<fs::path> matched_files(const std::vector<fs::path>& obs, const NamedDir& model) {
    const auto files = grid_files(model.dir);
    if (files.size() != obs.size())
        throw ArgumentError("model '" + model.name + "' has " + std::to_string(files.size()) +
                            " time steps, observations have " + std::to_string(obs.size()));
    for (std::size_t i = 0; i < obs.size(); ++i)
        if (files[i].filename() != obs[i].filename())
            throw ArgumentError("model '" + model.name + "' step " + files[i].filename().string() +
                                " does not match observation " + obs[i].filename().string());
    return files;
}

std::vector<GridField> read_all(const std::vector<fs::path>& files, int jobs) {
    std::vector<std::optional<GridField>> slots(files.size());
    parallel_for(files.size(), jobs, [&](std::size_t i) { slots[i] = read_grid(files[i]); });
    std::vector<GridField> out;
    out.reserve(files.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

std::string step_name(std::size_t step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "t%03zu.grid", step);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_file_atomic(path, text);
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
    fs::path out;
    SynthSpec spec;
    std::size_t steps = 50;
    std::uint64_t seed = 0;
    std::vector<std::string> models;
};

struct ModelRecipe {
    std::string name;
    ProbSpec prob;
};

ModelRecipe parse_recipe(const std::string& text) {
    // name:blur:dy:dx:noise
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 5) throw ArgumentError("--model expects name:blur:dy:dx:noise, got '" + text + "'");
    ModelRecipe r;
    r.name = parts[0];
    check_model_name(r.name);
    if (r.name == "obs") throw ArgumentError("'obs' is reserved for the observations");
    try {
        r.prob.blur_r = std::stoi(parts[1]);
        r.prob.offset_rows = std::stoi(parts[2]);
        r.prob.offset_cols = std::stoi(parts[3]);
        r.prob.noise_sd = std::stod(parts[4]);
    } catch (const std::exception&) {
        throw ArgumentError("--model '" + text + "' has a non-numeric field");
    }
    return r;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return splitmix64(splitmix64(a) ^ b); }

void cmd_synth(const SynthArgs& a, int jobs, std::ostream& out) {
    std::vector<ModelRecipe> recipes;
    for (const auto& m : a.models) recipes.push_back(parse_recipe(m));
    std::set<std::string> names;
    for (const auto& r : recipes)
        if (!names.insert(r.name).second) throw ArgumentError("model '" + r.name + "' given twice");
    if (a.steps == 0) throw ArgumentError("--steps must be >= 1");
    auto probe = a.spec;
    probe.seed = 0;
    synth_cells(probe);  // validates the spec before any file is written

    std::vector<double> fractions(a.steps);
    parallel_for(a.steps, jobs, [&](std::size_t step) {
        auto spec = a.spec;
        spec.seed = mix(a.seed, step);
        const auto mask = synth_mask(spec);
        fractions[step] = event_fraction(mask);
        write_text(a.out / "obs" / step_name(step), encode_grid(mask));
        for (std::size_t m = 0; m < recipes.size(); ++m) {
            auto prob = recipes[m].prob;
            prob.seed = mix(spec.seed, m + 1);
            write_text(a.out / recipes[m].name / step_name(step), encode_grid(synth_prob(mask, prob)));
        }
    });

    Json manifest;
    manifest["seed"] = a.seed;
    manifest["rows"] = a.spec.rows;
    manifest["cols"] = a.spec.cols;
    manifest["spacing_deg"] = a.spec.spacing_deg;
    manifest["n_cells"] = a.spec.n_cells;
    manifest["radius_px"] = {a.spec.radius_min_px, a.spec.radius_max_px};
    manifest["elongation"] = {a.spec.elongation_min, a.spec.elongation_max};
    Json models = Json::array();
    for (const auto& r : recipes)
        models.push_back({{"name", r.name},
                          {"blur_r", r.prob.blur_r},
                          {"offset_px", {r.prob.offset_rows, r.prob.offset_cols}},
                          {"noise_sd", r.prob.noise_sd}});
    manifest["models"] = models;
    manifest["event_fraction"] = fractions;
    write_text(a.out / "synth.json", manifest.dump(2) + "\n");
    double mean = 0.0;
    for (double f : fractions) mean += f;
    out << "wrote " << a.steps << " steps (" << recipes.size() << " models) to " << a.out.string()
        << "; mean event fraction " << format_double(mean / static_cast<double>(a.steps)) << "\n";
}

// ---------------------------------------------------------------------------
// filter

struct FilterArgs {
    std::string spec;
    std::vector<std::string> files;
    std::string out_dir;
    std::string dump_stages;
};

struct FilterOp {
    enum class Kind { max, mean, spectral } kind = Kind::max;
    int r = 0;
    SpectralFilter spectral;
};

FilterOp parse_filter_op(const std::string& id) {
    FilterOp op;
    auto width = [&](std::string_view rest) {
        int v = -1;
        const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
        if (ec != std::errc() || ptr != rest.data() + rest.size() || v < 0)
            throw ArgumentError("bad half-width in filter spec '" + id + "'");
        return v;
    };
    const std::string_view s(id);
    if (s.starts_with("nbhd_max_r")) {
        op.kind = FilterOp::Kind::max;
        op.r = width(s.substr(10));
    } else if (s.starts_with("nbhd_mean_r")) {
        op.kind = FilterOp::Kind::mean;
        op.r = width(s.substr(11));
    } else if (s.starts_with("F") || s.starts_with("W")) {
        op.kind = FilterOp::Kind::spectral;
        op.spectral = std::get<SpectralFilter>(parse_filter_id(id));
    } else {
        throw ArgumentError("unknown filter spec '" + id +
                            "'; expected nbhd_max_r<N>, nbhd_mean_r<N>, F<lo>-<hi> or W<lo>-<hi> (hi may be 'inf')");
    }
    return op;
}

void dump_stages(const FilterOp& op, const GridField& in, const fs::path& dir) {
    fs::create_directories(dir);
    if (op.kind != FilterOp::Kind::spectral) throw ArgumentError("--dump-stages applies to F and W specs only");
    if (op.spectral.method == SpectralMethod::fourier) {
        FourierStages st;
        const auto result = fourier_band_pass(in, op.spectral.band, 2, &st);
        write_grid(*st.tapered, dir / "1_tapered.grid");
        write_grid(*st.windowed, dir / "2_windowed.grid");
        write_grid(*st.spectrum, dir / "3_spectrum.grid");
        write_grid(*st.filtered_spectrum, dir / "4_filtered_spectrum.grid");
        write_grid(*st.reconstructed, dir / "5_reconstructed.grid");
        write_grid(result, dir / "6_cropped.grid");
    } else {
        const auto [pr, pc] = next_pow2_dims(in.rows(), in.cols());
        const auto padded = taper_zero_pad(in, pr, pc);
        write_grid(padded, dir / "1_padded.grid");
        auto pyr = filter_pyramid(haar_pyramid(padded, max_levels(pr, pc)), op.spectral.band);
        write_grid(haar_inverse(pyr.level(1)), dir / "2_reconstructed.grid");
        write_grid(crop_taper(haar_inverse(pyr.level(1)), in.rows(), in.cols()), dir / "3_cropped.grid");
    }
}

GridField apply_filter_op(const FilterOp& op, const GridField& in) {
    switch (op.kind) {
        case FilterOp::Kind::max: return max_filter(in, NbhdSpec{op.r});
        case FilterOp::Kind::mean: return mean_filter(in, NbhdSpec{op.r});
        case FilterOp::Kind::spectral: break;
    }
    return op.spectral.method == SpectralMethod::fourier ? fourier_band_pass(in, op.spectral.band)
                                                         : wavelet_band_pass(in, op.spectral.band);
}

void cmd_filter(const FilterArgs& a, int jobs, std::ostream& out) {
    const auto op = parse_filter_op(a.spec);
    std::vector<std::pair<fs::path, fs::path>> work;
    if (a.out_dir.empty()) {
        if (a.files.size() != 2) throw ArgumentError("filter takes INPUT OUTPUT, or --out-dir with one or more inputs");
        work.emplace_back(a.files[0], a.files[1]);
    } else {
        if (a.files.empty()) throw ArgumentError("filter needs at least one input");
        for (const auto& f : a.files) work.emplace_back(f, fs::path(a.out_dir) / fs::path(f).filename());
    }
    std::vector<double> sums(work.size());
    parallel_for(work.size(), jobs, [&](std::size_t i) {
        const auto& [in_path, out_path] = work[i];
        const auto in = read_grid(in_path);
        const auto filtered = apply_filter_op(op, in);
        // The sidecar describes the file as written (float32 payload).
        const auto bytes = encode_grid(filtered);
        const auto stored = decode_grid(bytes);
        sums[i] = stored.sum();
        write_text(out_path, bytes);
        Json side;
        side["input"] = in_path.filename().string();
        side["spec"] = a.spec;
        side["rows"] = stored.rows();
        side["cols"] = stored.cols();
        side["kind"] = std::string(to_string(stored.kind()));
        side["sum"] = sums[i];
        auto side_path = out_path;
        side_path += ".json";
        write_text(side_path, side.dump(2) + "\n");
        if (!a.dump_stages.empty()) {
            const auto dir = work.size() == 1 ? fs::path(a.dump_stages) : fs::path(a.dump_stages) / in_path.stem();
            dump_stages(op, in, dir);
        }
    });
    for (std::size_t i = 0; i < work.size(); ++i)
        out << work[i].second.string() << " sum " << format_double(sums[i]) << "\n";
}

// ---------------------------------------------------------------------------
// score

struct ScoreArgs {
    std::string obs;
    std::vector<std::string> models;
    std::vector<std::string> metrics;
    bool all = false;
    std::string placement = "both";
    bool wide = false;
    std::string out;
};

std::vector<LossSpec> metric_list(const std::vector<std::string>& ids, bool all) {
    std::vector<LossSpec> specs;
    if (all) specs = enumerate_configs();
    for (const auto& id : ids) specs.push_back(parse_loss_spec(id));
    if (specs.empty()) throw ArgumentError("no metrics selected; pass --metric ID (repeatable) or --all-336");
    std::sort(specs.begin(), specs.end(), [](const auto& a, const auto& b) { return a.id() < b.id(); });
    specs.erase(std::unique(specs.begin(), specs.end(), [](const auto& a, const auto& b) { return a.id() == b.id(); }),
                specs.end());
    return specs;
}

void cmd_score(const ScoreArgs& a, int jobs, std::ostream& out) {
    FilterPlacement placement;
    if (a.placement == "both")
        placement = FilterPlacement::both_fields;
    else if (a.placement == "obs")
        placement = FilterPlacement::observations_only;
    else
        throw ArgumentError("--placement must be 'both' or 'obs'");
    const auto specs = metric_list(a.metrics, a.all);
    const auto models = parse_models(a.models);
    if (models.empty()) throw ArgumentError("score needs at least one --model NAME=DIR");
    const auto obs = grid_files(a.obs);
    std::vector<std::vector<fs::path>> model_files;
    for (const auto& m : models) model_files.push_back(matched_files(obs, m));

    const std::size_t S = obs.size(), M = models.size(), K = specs.size();
    // results[step][model] -> one ScoreResult per metric
    std::vector<std::vector<std::vector<ScoreResult>>> results(S, std::vector<std::vector<ScoreResult>>(M));
    parallel_for(S, jobs, [&](std::size_t s) {
        const auto y = read_grid(obs[s]);
        const auto ys = spectral_set(y, specs);
        for (std::size_t m = 0; m < M; ++m) {
            const auto p = read_grid(model_files[m][s]);
            if (placement == FilterPlacement::both_fields) {
                const auto ps = spectral_set(p, specs);
                results[s][m] = evaluate_metrics(specs, p, y, ys, &ps);
            } else {
                results[s][m] = evaluate_metrics(specs, p, y, ys, nullptr);
            }
        }
    });

    std::ostringstream csv;
    if (a.wide) {
        csv << "model";
        for (const auto& s : specs) csv << ',' << s.id();
        csv << '\n';
    } else {
        csv << "model,metric,value,fallbacks\n";
    }
    for (std::size_t m = 0; m < M; ++m) {
        if (a.wide) csv << models[m].name;
        for (std::size_t k = 0; k < K; ++k) {
            double sum = 0.0;
            std::set<std::string> fallbacks;
            for (std::size_t s = 0; s < S; ++s) {
                const auto& r = results[s][m][k];
                if (!std::isfinite(r.value))
                    throw NumericError("non-finite " + specs[k].id() + " for model '" + models[m].name + "' at " +
                                       obs[s].filename().string());
                sum += r.value;
                fallbacks.insert(r.fallbacks.begin(), r.fallbacks.end());
            }
            const double mean = sum / static_cast<double>(S);
            if (a.wide) {
                csv << ',' << format_double(mean);
            } else {
                std::string fb;
                for (const auto& f : fallbacks) fb += (fb.empty() ? "" : ";") + f;
                csv << models[m].name << ',' << specs[k].id() << ',' << format_double(mean) << ',' << fb << '\n';
            }
        }
        if (a.wide) csv << '\n';
    }
    write_text(a.out, csv.str());
    out << "scored " << M << " model(s) x " << K << " metric(s) over " << S << " step(s) -> " << a.out << "\n";
}

// ---------------------------------------------------------------------------
// rank

struct RankArgs {
    std::string scores;
    std::string out_dir;
};

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void cmd_rank(const RankArgs& a, std::ostream& out) {
    const auto matrix = parse_scores_csv(read_text(a.scores));
    const auto ranks = rank_models(matrix);
    const auto summary = summary_scores(matrix, ranks);
    const auto winners = best_per_filter(summary);
    const fs::path dir(a.out_dir);
    write_text(dir / "ranks.csv", ranks_csv(matrix, ranks));
    write_text(dir / "summary.csv", summary_csv(summary));
    write_text(dir / "winners.csv", winners_csv(winners));
    write_text(dir / "winners.json", winners_json(winners));
    out << "ranked " << matrix.models.size() << " model(s) on " << matrix.metrics.size() << " metric(s); "
        << winners.size() << " winner rows -> " << dir.string() << "\n";
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
    std::string obs;
    std::vector<std::string> models;
    std::string out_dir;
    std::vector<double> thresholds;
    int n_boot = 1000;
    int n_boot_bars = 100;
    double level = 0.95;
    std::vector<std::string> compare;
};

void cmd_eval(const EvalArgs& a, std::uint64_t seed, int jobs, std::ostream& out) {
    const auto models = parse_models(a.models);
    if (models.empty()) throw ArgumentError("eval needs at least one --model NAME=DIR");
    if (!a.compare.empty() && a.compare.size() != 2) throw ArgumentError("--compare takes two model names");
    const auto thresholds = a.thresholds.empty() ? default_thresholds() : a.thresholds;
    const auto obs_files = grid_files(a.obs);
    std::vector<std::vector<fs::path>> files;
    for (const auto& m : models) files.push_back(matched_files(obs_files, m));
    std::map<std::string, std::size_t> index;
    for (std::size_t m = 0; m < models.size(); ++m) index[models[m].name] = m;
    for (const auto& c : a.compare)
        if (!index.contains(c)) throw ArgumentError("--compare names unknown model '" + c + "'");

    const auto y = read_all(obs_files, jobs);
    std::vector<std::vector<GridField>> p(models.size());
    for (std::size_t m = 0; m < models.size(); ++m) p[m] = read_all(files[m], jobs);

    std::vector<std::optional<EvalReport>> reports(models.size());
    parallel_for(models.size(), jobs, [&](std::size_t m) {
        reports[m] = evaluate_model(models[m].name, p[m], y, thresholds, a.n_boot, a.n_boot_bars, a.level, seed);
    });
    if (a.compare.size() == 2) {
        const auto ia = index[a.compare[0]], ib = index[a.compare[1]];
        reports[ia]->comparison = compare_models(a.compare[0], p[ia], a.compare[1], p[ib], y, thresholds, a.n_boot, seed);
    }
    for (const auto& r : reports) {
        emit_report(*r, fs::path(a.out_dir) / ("eval_" + r->model));
        out << r->model << ": REL " << format_double(r->attributes.rel) << ", BSS " << format_double(r->attributes.bss)
            << ", AUPD " << format_double(r->performance.aupd) << (r->performance.no_events ? " (no events)" : "")
            << "\n";
        if (r->comparison)
            for (const auto& [name, t] : r->comparison->tests)
                out << "  " << r->comparison->model_a << " vs " << r->comparison->model_b << " " << name
                    << ": diff " << format_double(t.diff) << ", p " << format_double(t.p_value)
                    << (t.significant_95 ? " (significant)" : "") << "\n";
    }
}

// ---------------------------------------------------------------------------
// gradcheck

struct GradArgs {
    std::vector<std::string> specs;
    std::size_t size = 16;
    double h = 1e-5;
    double tol = 1e-5;
    std::string out;
};

int cmd_gradcheck(const GradArgs& a, std::uint64_t seed, int jobs, std::ostream& out) {
    if (a.size < 2) throw ArgumentError("--size must be >= 2");
    std::vector<LossSpec> specs;
    if (a.specs.empty())
        specs = enumerate_configs();
    else
        for (const auto& id : a.specs) specs.push_back(parse_loss_spec(id));

    auto eng = stream_engine(seed, 0);
    const std::size_t n = a.size * a.size;
    std::vector<double> pv(n), yv(n);
    for (auto& v : pv) v = 0.02 + 0.96 * uniform01(eng);
    for (auto& v : yv) v = bernoulli(eng, 0.3) ? 1.0 : 0.0;
    const GridField p(a.size, a.size, 0.0125, FieldKind::prob, pv);
    const GridField y(a.size, a.size, 0.0125, FieldKind::mask, yv);

    std::vector<GradCheckReport> reports(specs.size());
    parallel_for(specs.size(), jobs, [&](std::size_t i) {
        reports[i] = grad_check(specs[i], p, prepare_target(specs[i], y), a.h);
    });

    std::ostringstream table;
    table << "spec,checked,excluded,max_rel_err,max_abs_err,worst_row,worst_col,status\n";
    std::size_t failures = 0;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& r = reports[i];
        const bool ok = r.max_rel_err <= a.tol;
        failures += ok ? 0 : 1;
        table << specs[i].id() << ',' << r.checked << ',' << r.excluded << ',' << format_double(r.max_rel_err) << ','
              << format_double(r.max_abs_err) << ',' << r.worst_row << ',' << r.worst_col << ',' << (ok ? "ok" : "FAIL")
              << '\n';
    }
    if (!a.out.empty()) write_text(a.out, table.str());
    if (specs.size() <= 20) out << table.str();
    out << specs.size() - failures << "/" << specs.size() << " specs within relative tolerance "
        << format_double(a.tol) << " (h = " << format_double(a.h) << ", " << a.size << "x" << a.size << ")\n";
    return failures == 0 ? kExitOk : kExitNumeric;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spatially enhanced loss functions: filtering, scoring, ranking and verification diagnostics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "selfs 0.1.0");
    int jobs = 1;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub, bool with_seed) {
        sub->add_option("--jobs,-j", jobs, "Worker threads")->check(CLI::Range(1, 256));
        if (with_seed) sub->add_option("--seed", seed, "Random seed");
    };

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "Generate synthetic observation masks and model forecasts");
    s->add_option("--out", synth.out, "Output directory")->required();
    s->add_option("--rows", synth.spec.rows, "Grid rows")->capture_default_str();
    s->add_option("--cols", synth.spec.cols, "Grid columns")->capture_default_str();
    s->add_option("--spacing", synth.spec.spacing_deg, "Grid spacing in degrees")->capture_default_str();
    s->add_option("--steps", synth.steps, "Time steps")->capture_default_str();
    s->add_option("--cells", synth.spec.n_cells, "Cells per step")->capture_default_str();
    s->add_option("--radius-min", synth.spec.radius_min_px, "Smallest cell radius (px)")->capture_default_str();
    s->add_option("--radius-max", synth.spec.radius_max_px, "Largest cell radius (px)")->capture_default_str();
    s->add_option("--elongation-min", synth.spec.elongation_min, "Smallest axis ratio")->capture_default_str();
    s->add_option("--elongation-max", synth.spec.elongation_max, "Largest axis ratio")->capture_default_str();
    s->add_option("--model", synth.models, "Forecast recipe name:blur:dy:dx:noise (repeatable)");
    add_common(s, false);
    s->add_option("--seed", synth.seed, "Random seed");

    FilterArgs filter;
    auto* f = app.add_subcommand("filter", "Apply a neighbourhood or spectral filter to GRID1 files");
    f->add_option("--spec", filter.spec, "nbhd_max_r<N>, nbhd_mean_r<N>, F<lo>-<hi> or W<lo>-<hi>")->required();
    f->add_option("--out-dir", filter.out_dir, "Write each input's result here under its own name");
    f->add_option("--dump-stages", filter.dump_stages, "Directory for intermediate pipeline stages");
    f->add_option("files", filter.files, "INPUT OUTPUT, or inputs with --out-dir")->required();
    add_common(f, false);

    ScoreArgs score;
    auto* sc = app.add_subcommand("score", "Compute verification metrics per model, averaged over time steps");
    sc->add_option("--obs", score.obs, "Directory of observation masks")->required();
    sc->add_option("--model", score.models, "NAME=DIR of forecast fields (repeatable)")->required();
    sc->add_option("--metric", score.metrics, "Metric id, e.g. fss_nbhd_r4 or csi_W0.1-0.2 (repeatable)");
    sc->add_flag("--all-336", score.all, "All 336 configurations");
    sc->add_option("--placement", score.placement, "Spectral filter on 'both' fields or 'obs' only")
        ->capture_default_str();
    sc->add_flag("--wide", score.wide, "One row per model, one column per metric");
    sc->add_option("--out", score.out, "Output CSV")->required();
    add_common(sc, false);

    RankArgs rank;
    auto* r = app.add_subcommand("rank", "Rank models per metric, summarise per filter, pick winners");
    r->add_option("--scores", rank.scores, "Score CSV from 'score'")->required();
    r->add_option("--out-dir", rank.out_dir, "Output directory")->required();

    EvalArgs eval;
    auto* e = app.add_subcommand("eval", "Attributes and performance diagrams with bootstrap intervals");
    e->add_option("--obs", eval.obs, "Directory of observation masks")->required();
    e->add_option("--model", eval.models, "NAME=DIR of probability forecasts (repeatable)")->required();
    e->add_option("--out-dir", eval.out_dir, "Output directory")->required();
    e->add_option("--thresholds", eval.thresholds, "Probability thresholds (default 0.00..1.00 step 0.01)")
        ->delimiter(',');
    e->add_option("--n-boot", eval.n_boot, "Bootstrap iterations for intervals and tests")->capture_default_str();
    e->add_option("--n-boot-bars", eval.n_boot_bars, "Iterations for consistency bars")->capture_default_str();
    e->add_option("--level", eval.level, "Confidence level")->capture_default_str();
    e->add_option("--compare", eval.compare, "Paired bootstrap test between two models")->expected(2);
    add_common(e, true);

    GradArgs grad;
    auto* g = app.add_subcommand("gradcheck", "Compare analytic loss gradients with central differences");
    g->add_option("--spec", grad.specs, "Loss id (repeatable; default all 336)");
    g->add_option("--size", grad.size, "Field side length")->capture_default_str();
    g->add_option("--step", grad.h, "Finite-difference step h")->capture_default_str();
    g->add_option("--tol", grad.tol, "Relative tolerance")->capture_default_str();
    g->add_option("--out", grad.out, "Optional CSV report");
    add_common(g, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*s) cmd_synth(synth, jobs, out);
        if (*f) cmd_filter(filter, jobs, out);
        if (*sc) cmd_score(score, jobs, out);
        if (*r) cmd_rank(rank, out);
        if (*e) cmd_eval(eval, seed, jobs, out);
        if (*g) return cmd_gradcheck(grad, seed, jobs, out);
        return kExitOk;
    } catch (const NumericError& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitValidation;
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    for (const auto& a : args) argv.push_back(a.c_str());
    argv.push_back(nullptr);
    return run_cli(static_cast<int>(args.size()), argv.data(), out, err);
}

}  // namespace selfs
