#pragma once

#include <complex>
#include <span>
#include <vector>

#include "scalohar/signal_io.hpp"
#include "scalohar/wavelet.hpp"

namespace scalohar {

/// Geometric scale grid a_j = a0 * 2^(j * dj), in samples.
struct ScaleGrid {
  double a0 = 2.0;
  double dj = 0.25;
  std::size_t n_scales = 1;
  std::vector<double> scales;
};

ScaleGrid build_scale_grid(double a0, double dj, std::size_t n_scales);

/// a0 = 2, dj = 0.25, as many scales as fit under n_samples / 2 (at least 1).
ScaleGrid default_scale_grid(std::size_t n_samples);

/// n_scales scales from a0 up to exactly max_scale (dj derived).
ScaleGrid scale_grid_spanning(double a0, double max_scale, std::size_t n_scales);

/// Equivalent Fourier period (seconds) of every scale in the grid.
std::vector<double> fourier_periods(const ScaleGrid& grid, const MotherWavelet& w,
                                    double sample_rate_hz);

enum class CwtStrategy { Direct, Fft };

/// ZeroPad: the signal is zero outside [0, N) and the integral over the window
/// is trapezoidal (end samples weighted 1/2). Periodic: the signal is treated
/// as N-periodic, so circular shifts of the input shift every row.
enum class Boundary { ZeroPad, Periodic };

struct Scalogram {
  std::size_t n_scales = 0;
  std::size_t n_times = 0;
  /// Row-major n_scales x n_times. Signed real part for real (DOG) wavelets,
  /// modulus for complex ones.
  std::vector<double> coefficients;
  ScaleGrid grid;
  double sample_rate_hz = 1.0;
  MotherWavelet wavelet = MotherWavelet::mexican_hat();

  double at(std::size_t scale, std::size_t time) const {
    return coefficients[scale * n_times + time];
  }
  std::span<const double> row(std::size_t scale) const {
    return {coefficients.data() + scale * n_times, n_times};
  }
};

/// W(a, b) = sum_t S(t) conj(psi((t - b) / a)) / sqrt(a), for every integer
/// translation b. Direct is the O(N^2) reference; Fft correlates on a
/// zero-padded power-of-two buffer (ZeroPad) or an N-point buffer (Periodic).
/// Single-threaded.
Scalogram cwt(const Signal& s, const MotherWavelet& w, const ScaleGrid& grid,
              CwtStrategy strategy = CwtStrategy::Fft, Boundary boundary = Boundary::ZeroPad);

/// Complex coefficients before the modulus / real-part reduction, row-major.
std::vector<std::complex<double>> cwt_complex(const Signal& s, const MotherWavelet& w,
                                              const ScaleGrid& grid, CwtStrategy strategy,
                                              Boundary boundary = Boundary::ZeroPad);

/// Parallel map of cwt over independent signals; the output order and values
/// do not depend on the thread count.
std::vector<Scalogram> cwt_batch(std::span<const Signal> signals, const MotherWavelet& w,
                                 const ScaleGrid& grid, CwtStrategy strategy = CwtStrategy::Fft,
                                 Boundary boundary = Boundary::ZeroPad);

enum class WindowKind { Hann, Rect };

struct Spectrogram {
  std::size_t n_freqs = 0;
  std::size_t n_hops = 0;
  std::vector<double> magnitudes;  // n_freqs x n_hops, row-major
  std::size_t window_len = 0;
  std::size_t hop = 0;

  double at(std::size_t freq, std::size_t hop_index) const {
    return magnitudes[freq * n_hops + hop_index];
  }
};

/// Periodic Hann window of length n.
std::vector<double> make_window(WindowKind kind, std::size_t n);

Spectrogram stft(const Signal& s, std::size_t window_len, std::size_t hop,
                 WindowKind window = WindowKind::Hann);

/// |DFT| for bins 0..N/2.
std::vector<double> dft_magnitude(const Signal& s);
std::vector<double> dft_magnitude(std::span<const double> samples);

struct FourierSeries {
  double a0 = 0.0;
  std::vector<double> a;  // a_1..a_nmax
  std::vector<double> b;  // b_1..b_nmax
};

/// Samples are read as a uniform grid spanning [-pi, pi] inclusive.
FourierSeries fourier_series_coeffs(std::span<const double> samples, std::size_t n_max);

/// C_n = <s, phi_n> / ||phi_n||^2 with trapezoidal inner products. The basis
/// must be pairwise orthogonal to 1e-6 relative and free of zero functions.
std::vector<double> generalized_fourier_coeffs(std::span<const double> s,
                                               const std::vector<std::vector<double>>& basis);

/// Trapezoidal inner product with unit spacing.
double trapezoid_dot(std::span<const double> a, std::span<const double> b);

}  // namespace scalohar
