#include "selfs/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <string>

#include "selfs/errors.hpp"

namespace selfs {

namespace {

// The FFTW planner is not re-entrant; plan execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void check_finite(std::span<const double> values, const char* stage) {
    for (double v : values)
        if (!std::isfinite(v))
            throw NumericError(std::string("fourier band-pass: non-finite value after ") + stage);
}

void check_finite(std::span<const Complex> values, const char* stage) {
    for (const auto& v : values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NumericError(std::string("fourier band-pass: non-finite coefficient after ") + stage);
}

}  // namespace

Dft2d::Dft2d(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    if (rows == 0 || cols == 0) throw ArgumentError("DFT dimensions must be positive");
    std::lock_guard lock(planner_mutex());
    auto* buf = fftw_alloc_complex(rows * cols);
    if (buf == nullptr) throw std::bad_alloc();
    buffer_ = buf;
    const int r = static_cast<int>(rows);
    const int c = static_cast<int>(cols);
    forward_plan_ = fftw_plan_dft_2d(r, c, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_2d(r, c, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (forward_plan_ == nullptr || inverse_plan_ == nullptr) {
        fftw_free(buf);
        throw NumericError("FFTW could not create a plan");
    }
}

Dft2d::~Dft2d() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
    fftw_free(buffer_);
}

std::vector<Complex> Dft2d::forward(std::span<const Complex> in) {
    if (in.size() != rows_ * cols_) throw ArgumentError("DFT input has the wrong size");
    auto* buf = static_cast<fftw_complex*>(buffer_);
    std::memcpy(buf, in.data(), in.size() * sizeof(Complex));
    fftw_execute(static_cast<fftw_plan>(forward_plan_));
    std::vector<Complex> out(in.size());
    std::memcpy(static_cast<void*>(out.data()), buf, out.size() * sizeof(Complex));
    return out;
}

std::vector<Complex> Dft2d::forward(std::span<const double> in) {
    std::vector<Complex> tmp(in.begin(), in.end());
    return forward(std::span<const Complex>(tmp));
}

std::vector<Complex> Dft2d::inverse(std::span<const Complex> in) {
    if (in.size() != rows_ * cols_) throw ArgumentError("DFT input has the wrong size");
    auto* buf = static_cast<fftw_complex*>(buffer_);
    std::memcpy(buf, in.data(), in.size() * sizeof(Complex));
    fftw_execute(static_cast<fftw_plan>(inverse_plan_));
    std::vector<Complex> out(in.size());
    const double scale = 1.0 / static_cast<double>(in.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = Complex(buf[i][0] * scale, buf[i][1] * scale);
    return out;
}

double blackman_harris(double r, double radius) {
    if (r > radius) return 0.0;
    constexpr double pi = std::numbers::pi;
    const double x = 1.0 + r / radius;
    return 0.42 - 0.5 * std::cos(pi * x) + 0.08 * std::cos(2.0 * pi * x);
}

double window_radius(std::size_t rows, std::size_t cols) {
    return (static_cast<double>(std::min(rows, cols)) - 1.0) / 2.0;
}

GridField blackman_harris_weights(std::size_t rows, std::size_t cols, double spacing_deg) {
    if (rows == 0 || cols == 0) throw ArgumentError("window dimensions must be positive");
    const double radius = window_radius(rows, cols);
    const double cr = (static_cast<double>(rows) - 1.0) / 2.0;
    const double cc = (static_cast<double>(cols) - 1.0) / 2.0;
    std::vector<double> w(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const double d = std::hypot(static_cast<double>(i) - cr, static_cast<double>(j) - cc);
            // A 1x1 grid has radius 0: the lone pixel sits at the centre and keeps weight 1.
            double v = radius > 0.0 ? blackman_harris(d, radius) : 1.0;
            w[i * cols + j] = std::clamp(v, 0.0, 1.0);  // w(R) evaluates to ~1e-17, not exactly 0
        }
    }
    return GridField(rows, cols, spacing_deg, FieldKind::real, std::move(w));
}

FrequencyGrid frequency_grid(std::size_t rows, std::size_t cols, double spacing_deg) {
    if (rows < 2 || cols < 2) throw ArgumentError("frequency grid needs at least 2 points per axis");
    if (!(spacing_deg > 0.0)) throw ArgumentError("grid spacing must be positive");
    auto axis = [spacing_deg](std::size_t n) {
        std::vector<double> f(n);
        for (std::size_t m = 0; m < n; ++m) {
            const double signed_index =
                m <= n / 2 ? static_cast<double>(m) : static_cast<double>(m) - static_cast<double>(n);
            f[m] = signed_index / (static_cast<double>(n) * spacing_deg);
        }
        return f;
    };
    const auto fr = axis(rows);
    const auto fc = axis(cols);
    FrequencyGrid g{rows, cols, std::vector<double>(rows * cols)};
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) g.nu_total[i * cols + j] = std::hypot(fr[i], fc[j]);
    return g;
}

double butterworth_low(double nu, double nu_max, int order) {
    return 1.0 / (1.0 + std::pow(nu / nu_max, 2.0 * order));
}

double butterworth_high(double nu, double nu_min, int order) {
    return 1.0 - 1.0 / (1.0 + std::pow(nu / nu_min, 2.0 * order));
}

double butterworth_gain(double nu, const ButterworthSpec& spec) {
    double g = 1.0;
    if (!spec.band.unbounded_below()) g *= butterworth_low(nu, 1.0 / spec.band.lo_deg, spec.order);
    if (!spec.band.unbounded_above()) g *= butterworth_high(nu, 1.0 / spec.band.hi_deg, spec.order);
    return g;
}

GridField butterworth_gain_grid(const FrequencyGrid& freqs, const ButterworthSpec& spec) {
    if (spec.order < 1) throw ArgumentError("Butterworth order must be >= 1");
    std::vector<double> g(freqs.nu_total.size());
    std::transform(freqs.nu_total.begin(), freqs.nu_total.end(), g.begin(),
                   [&](double nu) { return butterworth_gain(nu, spec); });
    return GridField(freqs.rows, freqs.cols, 1.0, FieldKind::real, std::move(g));
}

namespace {

struct Prepared {
    GridField tapered;
    GridField windowed;
    std::vector<Complex> spectrum;
};

Prepared prepare_spectrum(const GridField& field, Dft2d& dft) {
    auto tapered = taper_zero_pad(field, dft.rows(), dft.cols());
    const auto weights = blackman_harris_weights(dft.rows(), dft.cols(), field.spacing_deg());
    std::vector<double> windowed(tapered.size());
    for (std::size_t i = 0; i < windowed.size(); ++i) windowed[i] = tapered[i] * weights[i];
    check_finite(windowed, "windowing");
    auto windowed_field = tapered.with_values(std::move(windowed), FieldKind::real);
    auto spectrum = dft.forward(windowed_field.values());
    check_finite(spectrum, "forward transform");
    return {std::move(tapered), std::move(windowed_field), std::move(spectrum)};
}

GridField magnitude_field(std::span<const Complex> spec, std::size_t rows, std::size_t cols, double spacing) {
    std::vector<double> mag(spec.size());
    std::transform(spec.begin(), spec.end(), mag.begin(), [](const Complex& z) { return std::abs(z); });
    return GridField(rows, cols, spacing, FieldKind::real, std::move(mag));
}

GridField apply_band(const GridField& field, const Prepared& prep, const FrequencyGrid& freqs,
                     const WavelengthBand& band, int order, Dft2d& dft, FourierStages* stages) {
    const ButterworthSpec spec{band, order};
    std::vector<Complex> filtered(prep.spectrum.size());
    for (std::size_t i = 0; i < filtered.size(); ++i)
        filtered[i] = prep.spectrum[i] * butterworth_gain(freqs.nu_total[i], spec);
    check_finite(filtered, "Butterworth filtering");
    const auto back = dft.inverse(filtered);
    check_finite(back, "inverse transform");

    double max_abs = 1.0;
    double max_imag = 0.0;
    std::vector<double> real(back.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        real[i] = back[i].real();
        max_abs = std::max(max_abs, std::abs(real[i]));
        max_imag = std::max(max_imag, std::abs(back[i].imag()));
    }
    if (max_imag > 1e-9 * max_abs)
        throw NumericError("fourier band-pass: imaginary residue " + std::to_string(max_imag) +
                           " after inverse transform");

    auto full = prep.tapered.with_values(std::move(real), FieldKind::real);
    if (stages != nullptr) {
        stages->tapered = prep.tapered;
        stages->windowed = prep.windowed;
        stages->spectrum = magnitude_field(prep.spectrum, dft.rows(), dft.cols(), field.spacing_deg());
        stages->filtered_spectrum = magnitude_field(filtered, dft.rows(), dft.cols(), field.spacing_deg());
        stages->reconstructed = full;
    }
    auto cropped = crop_taper(full, field.rows(), field.cols());
    return field.with_values(std::vector<double>(cropped.values().begin(), cropped.values().end()),
                             FieldKind::real);
}

}  // namespace

std::vector<GridField> fourier_band_pass(const GridField& field, std::span<const WavelengthBand> bands, int order) {
    if (order < 1) throw ArgumentError("Butterworth order must be >= 1");
    Dft2d dft(3 * field.rows(), 3 * field.cols());
    const auto prep = prepare_spectrum(field, dft);
    const auto freqs = frequency_grid(dft.rows(), dft.cols(), field.spacing_deg());
    std::vector<GridField> out;
    out.reserve(bands.size());
    for (const auto& band : bands) out.push_back(apply_band(field, prep, freqs, band, order, dft, nullptr));
    return out;
}

GridField fourier_band_pass(const GridField& field, const WavelengthBand& band, int order, FourierStages* stages) {
    if (order < 1) throw ArgumentError("Butterworth order must be >= 1");
    Dft2d dft(3 * field.rows(), 3 * field.cols());
    const auto prep = prepare_spectrum(field, dft);
    const auto freqs = frequency_grid(dft.rows(), dft.cols(), field.spacing_deg());
    return apply_band(field, prep, freqs, band, order, dft, stages);
}

}  // namespace selfs
