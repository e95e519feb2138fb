#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "selfs/cli.hpp"
#include "selfs/diagnostics.hpp"
#include "selfs/errors.hpp"
#include "selfs/fourier.hpp"
#include "selfs/grid.hpp"
#include "selfs/loss.hpp"
#include "selfs/nbhd.hpp"
#include "selfs/ranking.hpp"
#include "selfs/scores.hpp"
#include "selfs/synth.hpp"
#include "selfs/wavelet.hpp"

namespace py = pybind11;
using namespace selfs;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

GridField to_grid(const Array& a, double spacing, FieldKind kind) {
    if (a.ndim() != 2) throw ArgumentError("expected a 2-D array");
    const auto rows = static_cast<std::size_t>(a.shape(0));
    const auto cols = static_cast<std::size_t>(a.shape(1));
    return {rows, cols, spacing, kind, std::vector<double>(a.data(), a.data() + rows * cols)};
}

Array to_array(const GridField& g) {
    Array out({g.rows(), g.cols()});
    std::copy(g.values().begin(), g.values().end(), out.mutable_data());
    return out;
}

std::vector<GridField> to_grids(const std::vector<Array>& arrays, double spacing, FieldKind kind) {
    std::vector<GridField> out;
    out.reserve(arrays.size());
    for (const auto& a : arrays) out.push_back(to_grid(a, spacing, kind));
    return out;
}

WavelengthBand band(double lo, double hi) { return {lo, hi}; }

}  // namespace

PYBIND11_MODULE(_selfs, m) {
    m.doc() = "Native core of selfs: neighbourhood and spectral filters, scores, losses and diagnostics.";

    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<TruncationError>(m, "TruncationError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    // GRID1 I/O. Fields cross the boundary as (array, spacing_deg, kind).
    m.def(
        "read_grid",
        [](const std::string& path) {
            const auto g = read_grid(path);
            return py::make_tuple(to_array(g), g.spacing_deg(), std::string(to_string(g.kind())));
        },
        py::arg("path"));
    m.def(
        "write_grid",
        [](const std::string& path, const Array& values, double spacing, const std::string& kind) {
            write_grid(to_grid(values, spacing, parse_field_kind(kind)), path);
        },
        py::arg("path"), py::arg("values"), py::arg("spacing_deg"), py::arg("kind"));
    m.def(
        "encode_grid",
        [](const Array& values, double spacing, const std::string& kind) {
            return py::bytes(encode_grid(to_grid(values, spacing, parse_field_kind(kind))));
        },
        py::arg("values"), py::arg("spacing_deg"), py::arg("kind"));
    m.def(
        "decode_grid",
        [](const py::bytes& data) {
            const auto g = decode_grid(std::string(data));
            return py::make_tuple(to_array(g), g.spacing_deg(), std::string(to_string(g.kind())));
        },
        py::arg("data"));

    // Filters.
    m.def(
        "max_filter",
        [](const Array& values, int r, const std::string& kind) {
            return to_array(max_filter(to_grid(values, 1.0, parse_field_kind(kind)), {r}));
        },
        py::arg("values"), py::arg("r"), py::arg("kind") = "prob");
    m.def(
        "mean_filter",
        [](const Array& values, int r) { return to_array(mean_filter(to_grid(values, 1.0, FieldKind::real), {r})); },
        py::arg("values"), py::arg("r"));
    m.def(
        "fourier_band_pass",
        [](const Array& values, double spacing, double lo, double hi, int order) {
            return to_array(fourier_band_pass(to_grid(values, spacing, FieldKind::real), band(lo, hi), order));
        },
        py::arg("values"), py::arg("spacing_deg"), py::arg("lo_deg"), py::arg("hi_deg"), py::arg("order") = 2);
    m.def(
        "wavelet_band_pass",
        [](const Array& values, double spacing, double lo, double hi) {
            return to_array(wavelet_band_pass(to_grid(values, spacing, FieldKind::real), band(lo, hi)));
        },
        py::arg("values"), py::arg("spacing_deg"), py::arg("lo_deg"), py::arg("hi_deg"));

    // Scores: r = None is pixelwise, an integer selects the neighbourhood form.
    m.def(
        "score",
        [](const std::string& kind, const Array& p, const Array& y, std::optional<int> r) {
            const auto k = parse_score_kind(kind);
            const auto pg = to_grid(p, 1.0, FieldKind::prob);
            const auto yg = to_grid(y, 1.0, FieldKind::prob);
            const auto res = r ? nbhd_score(k, pg, yg, {*r}) : pixelwise_score(k, pg, yg);
            return py::make_tuple(res.value, res.fallbacks);
        },
        py::arg("kind"), py::arg("p"), py::arg("y"), py::arg("r") = py::none());
    m.def("negatively_oriented", [](const std::string& kind) { return negatively_oriented(parse_score_kind(kind)); });

    // Losses over the configuration grid, addressed by id ("fss_nbhd_r4", "brier_W0.1-inf").
    m.def("configs", [] {
        std::vector<std::string> ids;
        for (const auto& s : enumerate_configs()) ids.push_back(s.id());
        return ids;
    });
    m.def(
        "loss",
        [](const std::string& id, const Array& p, const Array& y, double spacing) {
            const auto s = parse_loss_spec(id);
            return loss_value(s, to_grid(p, spacing, FieldKind::prob),
                              prepare_target(s, to_grid(y, spacing, FieldKind::mask)));
        },
        py::arg("spec"), py::arg("p"), py::arg("y"), py::arg("spacing_deg") = 0.0125);
    m.def(
        "loss_gradient",
        [](const std::string& id, const Array& p, const Array& y, double spacing) {
            const auto s = parse_loss_spec(id);
            return to_array(loss_gradient(s, to_grid(p, spacing, FieldKind::prob),
                                          prepare_target(s, to_grid(y, spacing, FieldKind::mask))));
        },
        py::arg("spec"), py::arg("p"), py::arg("y"), py::arg("spacing_deg") = 0.0125);
    m.def(
        "grad_check",
        [](const std::string& id, const Array& p, const Array& y, double h, double spacing) {
            const auto s = parse_loss_spec(id);
            const auto r = grad_check(s, to_grid(p, spacing, FieldKind::prob),
                                      prepare_target(s, to_grid(y, spacing, FieldKind::mask)), h);
            py::dict d;
            d["max_rel_err"] = r.max_rel_err;
            d["max_abs_err"] = r.max_abs_err;
            d["roundoff"] = r.roundoff;
            d["worst"] = py::make_tuple(r.worst_row, r.worst_col);
            d["checked"] = r.checked;
            d["excluded"] = r.excluded;
            return d;
        },
        py::arg("spec"), py::arg("p"), py::arg("y"), py::arg("h") = 1e-5, py::arg("spacing_deg") = 0.0125);

    // Diagnostics: the full report as JSON text (schema selfs.eval/1).
    m.def(
        "evaluate_json",
        [](const std::string& model, const std::vector<Array>& p, const std::vector<Array>& y, int n_boot,
           int n_boot_bars, double level, std::uint64_t seed) {
            const auto pg = to_grids(p, 1.0, FieldKind::prob);
            const auto yg = to_grids(y, 1.0, FieldKind::mask);
            const auto thresholds = default_thresholds();
            py::gil_scoped_release release;
            return report_json(evaluate_model(model, pg, yg, thresholds, n_boot, n_boot_bars, level, seed));
        },
        py::arg("model"), py::arg("p"), py::arg("y"), py::arg("n_boot") = 1000, py::arg("n_boot_bars") = 100,
        py::arg("level") = 0.95, py::arg("seed") = 0);

    m.def(
        "rank_column",
        [](const std::vector<double>& values, bool lower_is_better) { return rank_column(values, lower_is_better); },
        py::arg("values"), py::arg("lower_is_better"));

    m.def(
        "synth_mask",
        [](std::size_t rows, std::size_t cols, int n_cells, double radius_min, double radius_max, double elong_min,
           double elong_max, std::uint64_t seed) {
            SynthSpec s;
            s.rows = rows;
            s.cols = cols;
            s.n_cells = n_cells;
            s.radius_min_px = radius_min;
            s.radius_max_px = radius_max;
            s.elongation_min = elong_min;
            s.elongation_max = elong_max;
            s.seed = seed;
            return to_array(synth_mask(s));
        },
        py::arg("rows") = 205, py::arg("cols") = 205, py::arg("n_cells") = 6, py::arg("radius_min_px") = 3.0,
        py::arg("radius_max_px") = 10.0, py::arg("elongation_min") = 1.0, py::arg("elongation_max") = 1.0,
        py::arg("seed") = 0);

    // In-process command line; returns (exit_code, stdout, stderr).
    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "selfs");
            std::ostringstream out, err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = run_cli(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));

#ifdef SELFS_VERSION
    m.attr("__version__") = SELFS_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
