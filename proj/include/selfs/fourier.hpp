#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "selfs/grid.hpp"

namespace selfs {

using Complex = std::complex<double>;

/// Total wavenumber (cycles per degree) for every coefficient of a rows x cols DFT.
struct FrequencyGrid {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> nu_total;

    double operator()(std::size_t r, std::size_t c) const { return nu_total[r * cols + c]; }
};

struct ButterworthSpec {
    WavelengthBand band;
    int order = 2;
};

/**
 * 2-D complex DFT. Forward is unnormalized, inverse carries the 1/(rows*cols)
 * factor, so inverse(forward(x)) == x up to rounding.
 *
 * Plans are built with FFTW_ESTIMATE on aligned buffers, which keeps results
 * bit-reproducible from run to run. One instance must not be used from two
 * threads at once; separate instances are independent.
 */
class Dft2d {
public:
    Dft2d(std::size_t rows, std::size_t cols);
    ~Dft2d();
    Dft2d(const Dft2d&) = delete;
    Dft2d& operator=(const Dft2d&) = delete;

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    std::vector<Complex> forward(std::span<const Complex> in);
    std::vector<Complex> forward(std::span<const double> in);
    std::vector<Complex> inverse(std::span<const Complex> in);

private:
    std::size_t rows_;
    std::size_t cols_;
    void* buffer_;  // fftw_complex[rows*cols]
    void* forward_plan_;
    void* inverse_plan_;
};

/// Radially symmetric Blackman-Harris weight at distance r from the centre, zero beyond radius.
double blackman_harris(double r, double radius);

/// Half-width of the grid, (min(rows, cols) - 1) / 2; 307 for a 615 x 615 grid.
double window_radius(std::size_t rows, std::size_t cols);

/// Weights over a rows x cols grid, distance measured from ((rows-1)/2, (cols-1)/2).
GridField blackman_harris_weights(std::size_t rows, std::size_t cols, double spacing_deg = 1.0);

FrequencyGrid frequency_grid(std::size_t rows, std::size_t cols, double spacing_deg);

double butterworth_low(double nu, double nu_max, int order);
double butterworth_high(double nu, double nu_min, int order);

/// Low-pass gain at nu_max = 1/lo (skipped when lo = 0) times high-pass gain
/// at nu_min = 1/hi (skipped when hi = inf).
double butterworth_gain(double nu, const ButterworthSpec& spec);

GridField butterworth_gain_grid(const FrequencyGrid& freqs, const ButterworthSpec& spec);

/// Intermediate products of one band-pass run (for --dump-stages).
struct FourierStages {
    std::optional<GridField> tapered;
    std::optional<GridField> windowed;
    std::optional<GridField> spectrum;           ///< |X| after the forward transform
    std::optional<GridField> filtered_spectrum;  ///< |X| after the Butterworth gain
    std::optional<GridField> reconstructed;      ///< real part of the inverse, before cropping
};

/**
 * Band-pass filter a field: taper to 3x dimensions, apply the Blackman-Harris
 * window, forward DFT, multiply by the real Butterworth gain (magnitudes
 * scale, phases stay), inverse DFT, keep the real part, crop back.
 * Output kind is real.
 */
GridField fourier_band_pass(const GridField& field, const WavelengthBand& band, int order = 2,
                            FourierStages* stages = nullptr);

/// Same pipeline for several bands, sharing the taper/window/forward transform.
std::vector<GridField> fourier_band_pass(const GridField& field, std::span<const WavelengthBand> bands,
                                         int order = 2);

}  // namespace selfs
