#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace scalohar {

std::size_t next_pow2(std::size_t n);

/// Iterative radix-2 plan for one power-of-two length. Twiddles are computed
/// directly (not by recurrence) so round-off does not accumulate with size.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);

  std::size_t size() const { return n_; }

  void forward(std::span<std::complex<double>> data) const { run(data, false); }
  /// Unnormalized inverse; callers divide by size().
  void inverse(std::span<std::complex<double>> data) const { run(data, true); }

 private:
  void run(std::span<std::complex<double>> data, bool inverse) const;

  std::size_t n_;
  std::vector<std::size_t> bitrev_;
  std::vector<std::complex<double>> twiddles_;  // exp(-2 pi i k / n), k < n/2
};

/// Forward DFT of any length: radix-2 when possible, Bluestein otherwise.
std::vector<std::complex<double>> dft(std::span<const std::complex<double>> x);
std::vector<std::complex<double>> dft(std::span<const double> x);

/// Inverse DFT of any length, normalized by 1/N.
std::vector<std::complex<double>> idft(std::span<const std::complex<double>> x);

}  // namespace scalohar
