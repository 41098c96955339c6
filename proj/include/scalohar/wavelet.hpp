#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace scalohar {

enum class WaveletFamily { Dog, Morlet, Paul };

/// Unit-norm mother wavelets:
///   DOG(m):    -He_m(t) exp(-t^2/2) / sqrt(Gamma(m + 1/2))
///   Morlet:    pi^(-1/4) exp(i w0 t) exp(-t^2/2)
///   Paul(m):   2^m i^m m! / sqrt(pi (2m)!) * (1 - i t)^-(m+1)
/// DOG(2) is the Mexican hat.
class MotherWavelet {
 public:
  static MotherWavelet dog(int order);
  static MotherWavelet mexican_hat() { return dog(2); }
  static MotherWavelet morlet(double omega0 = 6.0);
  static MotherWavelet paul(int order = 4);

  /// Parses `dog:<m>`, `mexh`, `morlet[:<w0>]`, `paul[:<m>]`.
  static MotherWavelet parse(std::string_view selector);

  WaveletFamily family() const { return family_; }
  /// DOG/Paul order, or Morlet's w0.
  double parameter() const { return param_; }
  int order() const { return static_cast<int>(param_); }
  bool is_real() const { return family_ == WaveletFamily::Dog; }

  std::complex<double> evaluate(double t) const;

  /// Equivalent Fourier period of scale a is fourier_factor() * a.
  double fourier_factor() const;

  /// |psi(t)| < 1e-12 * max|psi| for |t| beyond this value.
  double support_halfwidth() const { return halfwidth_; }

  /// Canonical selector; parse(selector()) reproduces the wavelet.
  std::string selector() const;

  bool operator==(const MotherWavelet& other) const {
    return family_ == other.family_ && param_ == other.param_;
  }

 private:
  MotherWavelet(WaveletFamily family, double param);

  WaveletFamily family_;
  double param_;
  double norm_;  // family-specific prefactor
  double halfwidth_ = 0.0;
};

struct EvalGrid {
  double t_min = -8.0;
  double t_max = 8.0;
  std::size_t n_points = 4096;

  std::vector<double> points() const;
  double step() const { return (t_max - t_min) / static_cast<double>(n_points - 1); }
};

/// [-8, 8] x 4096 for DOG and Morlet; [-20, 20] x 8192 for Paul.
EvalGrid standard_grid(const MotherWavelet& w);

struct AdmissibilityReport {
  std::complex<double> mean;  // trapezoidal integral of psi
  double norm_sq = 0.0;       // trapezoidal integral of |psi|^2
  bool decay_ok = false;      // endpoint magnitude below the family threshold
};

/// Endpoint threshold behind decay_ok: 1e-9 for the Gaussian-envelope
/// families, 1e-6 for Paul, whose envelope only decays as |t|^-(m+1).
double decay_tolerance(const MotherWavelet& w);

/// Throws GridTooNarrow when an endpoint value exceeds 1e-3 (the grid cuts
/// through the body of the wavelet).
AdmissibilityReport admissibility_report(const MotherWavelet& w, const EvalGrid& grid);

/// Entry k is |integral t^k psi(t) dt| for k = 0..up_to.
std::vector<double> vanishing_moments(const MotherWavelet& w, int up_to, const EvalGrid& grid);

}  // namespace scalohar
