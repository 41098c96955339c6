#include "scalohar/transform.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>

#include "scalohar/error.hpp"
#include "scalohar/fft.hpp"

namespace scalohar {

ScaleGrid build_scale_grid(double a0, double dj, std::size_t n_scales) {
  if (!(a0 > 0.0) || !std::isfinite(a0)) throw Error(ErrorCode::InvalidScale, "a0 must be positive");
  if (!(dj > 0.0) || !std::isfinite(dj)) throw Error(ErrorCode::InvalidScale, "dj must be positive");
  if (n_scales == 0) throw Error(ErrorCode::InvalidScale, "need at least one scale");
  ScaleGrid grid{a0, dj, n_scales, {}};
  grid.scales.resize(n_scales);
  for (std::size_t j = 0; j < n_scales; ++j)
    grid.scales[j] = a0 * std::exp2(static_cast<double>(j) * dj);
  return grid;
}

ScaleGrid default_scale_grid(std::size_t n_samples) {
  constexpr double a0 = 2.0, dj = 0.25;
  const double largest = static_cast<double>(n_samples) / 2.0;
  std::size_t n = 1;
  if (largest > a0) n = static_cast<std::size_t>(std::floor(std::log2(largest / a0) / dj)) + 1;
  return build_scale_grid(a0, dj, n);
}

ScaleGrid scale_grid_spanning(double a0, double max_scale, std::size_t n_scales) {
  if (n_scales < 2) return build_scale_grid(a0, 1.0, n_scales);
  if (!(max_scale > a0)) throw Error(ErrorCode::InvalidScale, "max_scale must exceed a0");
  const double dj = std::log2(max_scale / a0) / static_cast<double>(n_scales - 1);
  return build_scale_grid(a0, dj, n_scales);
}

std::vector<double> fourier_periods(const ScaleGrid& grid, const MotherWavelet& w,
                                    double sample_rate_hz) {
  std::vector<double> periods;
  for (double a : grid.scales) periods.push_back(w.fourier_factor() * a / sample_rate_hz);
  return periods;
}

namespace {

// Daughter wavelet conj(psi(k / a)) / sqrt(a) for k = -half..half.
std::vector<std::complex<double>> daughter(const MotherWavelet& w, double a, std::size_t half) {
  std::vector<std::complex<double>> d(2 * half + 1);
  const double inv_sqrt_a = 1.0 / std::sqrt(a);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double k = static_cast<double>(i) - static_cast<double>(half);
    d[i] = std::conj(w.evaluate(k / a)) * inv_sqrt_a;
  }
  return d;
}

std::size_t support(const MotherWavelet& w, double a) {
  const double k = std::floor(w.support_halfwidth() * a);
  return k > 1e9 ? std::size_t{1000000000} : static_cast<std::size_t>(k);
}

std::vector<double> weighted_signal(const Signal& s, Boundary boundary) {
  std::vector<double> x = s.samples;
  if (boundary == Boundary::ZeroPad) {
    x.front() *= 0.5;
    x.back() *= 0.5;
  }
  return x;
}

void check_inputs(const Signal& s, const ScaleGrid& grid) {
  if (s.size() < 2) throw Error(ErrorCode::InvalidArgument, "cwt needs at least 2 samples");
  if (grid.scales.empty()) throw Error(ErrorCode::InvalidScale, "empty scale grid");
  const double padded = static_cast<double>(next_pow2(2 * s.size()));
  for (double a : grid.scales) {
    if (!(a > 0.0)) throw Error(ErrorCode::InvalidScale, "scales must be positive");
    if (a > padded)
      throw Error(ErrorCode::ScaleTooLarge, "scale " + std::to_string(a) +
                                                " exceeds padded length " + std::to_string(padded));
  }
}

void direct_zero_pad(std::span<const double> x, const MotherWavelet& w, double a,
                     std::span<std::complex<double>> row) {
  const std::size_t n = x.size();
  const std::size_t half = std::min(support(w, a), n - 1);
  const auto d = daughter(w, a, half);
  for (std::size_t b = 0; b < n; ++b) {
    const std::size_t t0 = b > half ? b - half : 0;
    const std::size_t t1 = std::min(n - 1, b + half);
    std::complex<double> acc = 0.0;
    for (std::size_t t = t0; t <= t1; ++t) acc += x[t] * d[t + half - b];
    row[b] = acc;
  }
}

// Daughter folded onto one period: p[r] = sum over k = r (mod n) of d(k).
std::vector<std::complex<double>> periodic_daughter(const MotherWavelet& w, double a,
                                                    std::size_t n) {
  const std::size_t half = std::min(support(w, a), 8 * n);
  const auto d = daughter(w, a, half);
  std::vector<std::complex<double>> p(n);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const long long k = static_cast<long long>(i) - static_cast<long long>(half);
    const auto r = static_cast<std::size_t>(((k % static_cast<long long>(n)) + static_cast<long long>(n)) %
                                            static_cast<long long>(n));
    p[r] += d[i];
  }
  return p;
}

void direct_periodic(std::span<const double> x, const MotherWavelet& w, double a,
                     std::span<std::complex<double>> row) {
  const std::size_t n = x.size();
  const auto p = periodic_daughter(w, a, n);
  for (std::size_t b = 0; b < n; ++b) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) acc += x[t] * p[(t + n - b) % n];
    row[b] = acc;
  }
}

void fft_zero_pad(std::span<const double> x, const MotherWavelet& w, const ScaleGrid& grid,
                  std::span<std::complex<double>> out) {
  const std::size_t n = x.size();
  const std::size_t padded = next_pow2(2 * n);
  const FftPlan plan(padded);
  std::vector<std::complex<double>> spectrum(padded);
  std::copy(x.begin(), x.end(), spectrum.begin());
  plan.forward(spectrum);

  std::vector<std::complex<double>> kernel(padded);
  for (std::size_t j = 0; j < grid.scales.size(); ++j) {
    const double a = grid.scales[j];
    const std::size_t half = std::min(support(w, a), n - 1);
    const auto d = daughter(w, a, half);
    // Correlation as convolution with h[m] = d(-m), stored modulo padded.
    std::fill(kernel.begin(), kernel.end(), std::complex<double>{});
    for (std::size_t i = 0; i < d.size(); ++i) {
      const long long m = static_cast<long long>(half) - static_cast<long long>(i);
      kernel[static_cast<std::size_t>((m + static_cast<long long>(padded)) %
                                      static_cast<long long>(padded))] = d[i];
    }
    plan.forward(kernel);
    for (std::size_t i = 0; i < padded; ++i) kernel[i] *= spectrum[i];
    plan.inverse(kernel);
    const double scale = 1.0 / static_cast<double>(padded);
    for (std::size_t b = 0; b < n; ++b) out[j * n + b] = kernel[b] * scale;
  }
}

void fft_periodic(std::span<const double> x, const MotherWavelet& w, const ScaleGrid& grid,
                  std::span<std::complex<double>> out) {
  const std::size_t n = x.size();
  const auto spectrum = dft(x);
  std::vector<std::complex<double>> kernel(n);
  for (std::size_t j = 0; j < grid.scales.size(); ++j) {
    const auto p = periodic_daughter(w, grid.scales[j], n);
    // h[m] = p(-m mod n)
    for (std::size_t m = 0; m < n; ++m) kernel[m] = p[(n - m) % n];
    auto h = dft(std::span<const std::complex<double>>(kernel));
    for (std::size_t i = 0; i < n; ++i) h[i] *= spectrum[i];
    const auto row = idft(h);
    std::copy(row.begin(), row.end(), out.begin() + static_cast<std::ptrdiff_t>(j * n));
  }
}

}  // namespace

std::vector<std::complex<double>> cwt_complex(const Signal& s, const MotherWavelet& w,
                                              const ScaleGrid& grid, CwtStrategy strategy,
                                              Boundary boundary) {
  check_inputs(s, grid);
  const std::size_t n = s.size();
  const auto x = weighted_signal(s, boundary);
  std::vector<std::complex<double>> out(grid.scales.size() * n);
  if (strategy == CwtStrategy::Direct) {
    for (std::size_t j = 0; j < grid.scales.size(); ++j) {
      std::span<std::complex<double>> row(out.data() + j * n, n);
      if (boundary == Boundary::ZeroPad)
        direct_zero_pad(x, w, grid.scales[j], row);
      else
        direct_periodic(x, w, grid.scales[j], row);
    }
  } else if (boundary == Boundary::ZeroPad) {
    fft_zero_pad(x, w, grid, out);
  } else {
    fft_periodic(x, w, grid, out);
  }
  return out;
}

Scalogram cwt(const Signal& s, const MotherWavelet& w, const ScaleGrid& grid,
              CwtStrategy strategy, Boundary boundary) {
  const auto coeffs = cwt_complex(s, w, grid, strategy, boundary);
  Scalogram sc;
  sc.n_scales = grid.scales.size();
  sc.n_times = s.size();
  sc.grid = grid;
  sc.sample_rate_hz = s.sample_rate_hz;
  sc.wavelet = w;
  sc.coefficients.resize(coeffs.size());
  const bool real = w.is_real();
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    sc.coefficients[i] = real ? coeffs[i].real() : std::abs(coeffs[i]);
  return sc;
}

std::vector<Scalogram> cwt_batch(std::span<const Signal> signals, const MotherWavelet& w,
                                 const ScaleGrid& grid, CwtStrategy strategy, Boundary boundary) {
  std::vector<Scalogram> out(signals.size());
  std::vector<std::exception_ptr> errors(signals.size());
  const auto count = static_cast<long long>(signals.size());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      out[i] = cwt(signals[i], w, grid, strategy, boundary);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<double> make_window(WindowKind kind, std::size_t n) {
  std::vector<double> win(n, 1.0);
  if (kind == WindowKind::Hann)
    for (std::size_t i = 0; i < n; ++i)
      win[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                    static_cast<double>(n));
  return win;
}

Spectrogram stft(const Signal& s, std::size_t window_len, std::size_t hop, WindowKind window) {
  if (hop == 0 || window_len == 0 || hop > window_len || window_len > s.size())
    throw Error(ErrorCode::InvalidArgument, "stft requires 0 < hop <= window_len <= length");
  const auto win = make_window(window, window_len);
  Spectrogram sg;
  sg.window_len = window_len;
  sg.hop = hop;
  sg.n_freqs = window_len / 2 + 1;
  sg.n_hops = (s.size() - window_len) / hop + 1;
  sg.magnitudes.assign(sg.n_freqs * sg.n_hops, 0.0);
  std::vector<double> frame(window_len);
  for (std::size_t h = 0; h < sg.n_hops; ++h) {
    for (std::size_t i = 0; i < window_len; ++i) frame[i] = s.samples[h * hop + i] * win[i];
    const auto mags = dft_magnitude(frame);
    for (std::size_t f = 0; f < sg.n_freqs; ++f) sg.magnitudes[f * sg.n_hops + h] = mags[f];
  }
  return sg;
}

std::vector<double> dft_magnitude(std::span<const double> samples) {
  const auto spectrum = dft(samples);
  std::vector<double> mags(samples.size() / 2 + 1);
  for (std::size_t k = 0; k < mags.size(); ++k) mags[k] = std::abs(spectrum[k]);
  return mags;
}

std::vector<double> dft_magnitude(const Signal& s) { return dft_magnitude(s.samples); }

FourierSeries fourier_series_coeffs(std::span<const double> samples, std::size_t n_max) {
  const std::size_t n = samples.size();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "need at least two samples");
  const double pi = std::numbers::pi;
  const double h = 2.0 * pi / static_cast<double>(n - 1);
  auto integrate = [&](auto&& basis) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = -pi + h * static_cast<double>(i);
      const double weight = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
      sum += weight * samples[i] * basis(t);
    }
    return sum * h / pi;
  };
  FourierSeries fs;
  fs.a0 = integrate([](double) { return 1.0; });
  for (std::size_t k = 1; k <= n_max; ++k) {
    const double kk = static_cast<double>(k);
    fs.a.push_back(integrate([kk](double t) { return std::cos(kk * t); }));
    fs.b.push_back(integrate([kk](double t) { return std::sin(kk * t); }));
  }
  return fs;
}

double trapezoid_dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "inner product of unequal lengths");
  if (a.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  if (a.size() > 1) sum -= 0.5 * (a.front() * b.front() + a.back() * b.back());
  return sum;
}

std::vector<double> generalized_fourier_coeffs(std::span<const double> s,
                                               const std::vector<std::vector<double>>& basis) {
  std::vector<double> norms;
  for (const auto& phi : basis) {
    if (phi.size() != s.size())
      throw Error(ErrorCode::DimensionMismatch, "basis function length differs from signal");
    const double nn = trapezoid_dot(phi, phi);
    if (!(nn > 0.0)) throw Error(ErrorCode::BasisNotOrthogonal, "basis contains a zero function");
    norms.push_back(nn);
  }
  for (std::size_t k = 0; k < basis.size(); ++k)
    for (std::size_t n = k + 1; n < basis.size(); ++n) {
      const double dot = trapezoid_dot(basis[k], basis[n]);
      if (std::abs(dot) > 1e-6 * std::sqrt(norms[k] * norms[n]))
        throw Error(ErrorCode::BasisNotOrthogonal,
                    "basis functions " + std::to_string(k) + " and " + std::to_string(n) +
                        " are not orthogonal");
    }
  std::vector<double> coeffs;
  for (std::size_t k = 0; k < basis.size(); ++k)
    coeffs.push_back(trapezoid_dot(s, basis[k]) / norms[k]);
  return coeffs;
}

}  // namespace scalohar
