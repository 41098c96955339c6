#include "scalohar/fft.hpp"

#include <cmath>
#include <numbers>

#include "scalohar/error.hpp"

namespace scalohar {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

FftPlan::FftPlan(std::size_t n) : n_(n) {
  if (n == 0 || (n & (n - 1)) != 0)
    throw Error(ErrorCode::InvalidArgument, "FftPlan length must be a power of two");
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  bitrev_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b)
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
    bitrev_[i] = r;
  }
  twiddles_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    twiddles_[k] = {std::cos(angle), std::sin(angle)};
  }
}

void FftPlan::run(std::span<std::complex<double>> data, bool inverse) const {
  if (data.size() != n_) throw Error(ErrorCode::InvalidArgument, "FFT buffer size mismatch");
  for (std::size_t i = 0; i < n_; ++i)
    if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        auto w = twiddles_[k * stride];
        if (inverse) w = std::conj(w);
        const auto u = data[start + k];
        const auto v = data[start + k + half] * w;
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }
}

namespace {

std::vector<std::complex<double>> bluestein(std::span<const std::complex<double>> x, bool inverse) {
  const std::size_t n = x.size();
  const std::size_t m = next_pow2(2 * n - 1);
  const double sign = inverse ? 1.0 : -1.0;
  // chirp[k] = exp(sign * i pi k^2 / n); k^2 reduced mod 2n to keep angles small.
  std::vector<std::complex<double>> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto k2 = static_cast<double>((k * k) % (2 * n));
    const double angle = sign * std::numbers::pi * k2 / static_cast<double>(n);
    chirp[k] = {std::cos(angle), std::sin(angle)};
  }
  std::vector<std::complex<double>> a(m), b(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);
  FftPlan plan(m);
  plan.forward(a);
  plan.forward(b);
  for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
  plan.inverse(a);
  std::vector<std::complex<double>> out(n);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * scale * chirp[k];
  return out;
}

std::vector<std::complex<double>> transform(std::span<const std::complex<double>> x, bool inverse) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  std::vector<std::complex<double>> out;
  if ((n & (n - 1)) == 0) {
    out.assign(x.begin(), x.end());
    FftPlan plan(n);
    inverse ? plan.inverse(out) : plan.forward(out);
  } else {
    out = bluestein(x, inverse);
  }
  if (inverse)
    for (auto& v : out) v /= static_cast<double>(n);
  return out;
}

}  // namespace

std::vector<std::complex<double>> dft(std::span<const std::complex<double>> x) {
  return transform(x, false);
}

std::vector<std::complex<double>> dft(std::span<const double> x) {
  std::vector<std::complex<double>> c(x.begin(), x.end());
  return transform(c, false);
}

std::vector<std::complex<double>> idft(std::span<const std::complex<double>> x) {
  return transform(x, true);
}

}  // namespace scalohar
