#include "scalohar/wavelet.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "scalohar/error.hpp"

namespace scalohar {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRelativeCutoff = 1e-12;

// Probabilists' Hermite polynomial He_m(t).
double hermite_e(int m, double t) {
  double prev = 1.0;
  if (m == 0) return prev;
  double cur = t;
  for (int n = 1; n < m; ++n) {
    const double next = t * cur - n * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

std::complex<double> trapezoid(const EvalGrid& grid, auto&& integrand) {
  const double h = grid.step();
  std::complex<double> sum = 0.5 * (integrand(grid.t_min) + integrand(grid.t_max));
  for (std::size_t i = 1; i + 1 < grid.n_points; ++i)
    sum += integrand(grid.t_min + h * static_cast<double>(i));
  return sum * h;
}

void check_grid(const EvalGrid& grid) {
  if (!(grid.t_min < grid.t_max) || grid.n_points < 2)
    throw Error(ErrorCode::InvalidArgument, "evaluation grid needs t_min < t_max and >= 2 points");
}

bool parse_number(std::string_view text, double& out) {
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

MotherWavelet::MotherWavelet(WaveletFamily family, double param)
    : family_(family), param_(param), norm_(1.0) {
  switch (family_) {
    case WaveletFamily::Dog: {
      const int m = order();
      norm_ = -1.0 / std::sqrt(std::tgamma(m + 0.5));
      // Scan outward; past the last crossing of the cutoff the Gaussian wins.
      const double peak = std::abs(evaluate(0.0).real()) + std::abs(evaluate(1.0).real());
      double last = 0.0;
      for (double t = 0.0; t < 64.0; t += 0.01)
        if (std::abs(evaluate(t).real()) >= kRelativeCutoff * peak) last = t;
      halfwidth_ = last + 0.01;
      break;
    }
    case WaveletFamily::Morlet:
      norm_ = std::pow(kPi, -0.25);
      halfwidth_ = std::sqrt(2.0 * std::log(1.0 / kRelativeCutoff));
      break;
    case WaveletFamily::Paul: {
      const int m = order();
      norm_ = std::pow(2.0, m) * factorial(m) / std::sqrt(kPi * factorial(2 * m));
      // Envelope norm * (1 + t^2)^(-(m+1)/2) is monotone, peak at t = 0.
      const double ratio = std::pow(1.0 / kRelativeCutoff, 2.0 / (m + 1));
      halfwidth_ = std::sqrt(ratio - 1.0);
      break;
    }
  }
}

MotherWavelet MotherWavelet::dog(int order) {
  if (order < 1 || order > 30)
    throw Error(ErrorCode::InvalidWavelet, "DOG order must lie in [1, 30]");
  return MotherWavelet(WaveletFamily::Dog, order);
}

MotherWavelet MotherWavelet::morlet(double omega0) {
  if (!(omega0 > 0.0) || !std::isfinite(omega0))
    throw Error(ErrorCode::InvalidWavelet, "Morlet w0 must be positive");
  return MotherWavelet(WaveletFamily::Morlet, omega0);
}

MotherWavelet MotherWavelet::paul(int order) {
  if (order < 1 || order > 30)
    throw Error(ErrorCode::InvalidWavelet, "Paul order must lie in [1, 30]");
  return MotherWavelet(WaveletFamily::Paul, order);
}

MotherWavelet MotherWavelet::parse(std::string_view selector) {
  const auto colon = selector.find(':');
  const auto name = selector.substr(0, colon);
  const bool has_arg = colon != std::string_view::npos;
  const auto arg = has_arg ? selector.substr(colon + 1) : std::string_view{};
  double value = 0.0;
  if (has_arg && !parse_number(arg, value))
    throw Error(ErrorCode::InvalidWavelet, "bad parameter in '" + std::string(selector) + "'");
  auto as_order = [&](double v) {
    if (v != std::floor(v))
      throw Error(ErrorCode::InvalidWavelet, "order must be an integer in '" + std::string(selector) + "'");
    return static_cast<int>(v);
  };
  if (name == "mexh" && !has_arg) return mexican_hat();
  if (name == "dog" && has_arg) return dog(as_order(value));
  if (name == "morlet") return has_arg ? morlet(value) : morlet();
  if (name == "paul") return has_arg ? paul(as_order(value)) : paul();
  throw Error(ErrorCode::InvalidWavelet, "unknown wavelet selector '" + std::string(selector) + "'");
}

std::complex<double> MotherWavelet::evaluate(double t) const {
  switch (family_) {
    case WaveletFamily::Dog:
      return {norm_ * hermite_e(order(), t) * std::exp(-0.5 * t * t), 0.0};
    case WaveletFamily::Morlet:
      return norm_ * std::exp(-0.5 * t * t) *
             std::complex<double>(std::cos(param_ * t), std::sin(param_ * t));
    case WaveletFamily::Paul: {
      const int m = order();
      // i^m
      static constexpr std::complex<double> kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
      const std::complex<double> base = 1.0 / std::complex<double>(1.0, -t);
      std::complex<double> p = base;
      for (int k = 0; k < m; ++k) p *= base;
      return norm_ * kIPow[m % 4] * p;
    }
  }
  return {};
}

double MotherWavelet::fourier_factor() const {
  switch (family_) {
    case WaveletFamily::Dog: return 2.0 * kPi / std::sqrt(param_ + 0.5);
    case WaveletFamily::Morlet: return 4.0 * kPi / (param_ + std::sqrt(2.0 + param_ * param_));
    case WaveletFamily::Paul: return 4.0 * kPi / (2.0 * param_ + 1.0);
  }
  return 1.0;
}

std::string MotherWavelet::selector() const {
  switch (family_) {
    case WaveletFamily::Dog:
      return order() == 2 ? "mexh" : "dog:" + std::to_string(order());
    case WaveletFamily::Morlet: {
      if (param_ == 6.0) return "morlet";
      char buf[40];
      std::snprintf(buf, sizeof buf, "morlet:%.17g", param_);
      return buf;
    }
    case WaveletFamily::Paul:
      return order() == 4 ? "paul" : "paul:" + std::to_string(order());
  }
  return "?";
}

std::vector<double> EvalGrid::points() const {
  std::vector<double> t(n_points);
  const double h = step();
  for (std::size_t i = 0; i < n_points; ++i) t[i] = t_min + h * static_cast<double>(i);
  return t;
}

EvalGrid standard_grid(const MotherWavelet& w) {
  if (w.family() == WaveletFamily::Paul) return EvalGrid{-20.0, 20.0, 8192};
  return EvalGrid{-8.0, 8.0, 4096};
}

double decay_tolerance(const MotherWavelet& w) {
  return w.family() == WaveletFamily::Paul ? 1e-6 : 1e-9;
}

namespace {

double endpoint_magnitude(const MotherWavelet& w, const EvalGrid& grid) {
  check_grid(grid);
  const double edge = std::max(std::abs(w.evaluate(grid.t_min)), std::abs(w.evaluate(grid.t_max)));
  if (edge > 1e-3)
    throw Error(ErrorCode::GridTooNarrow,
                "wavelet " + w.selector() + " is still " + std::to_string(edge) +
                    " at the grid edge");
  return edge;
}

}  // namespace

AdmissibilityReport admissibility_report(const MotherWavelet& w, const EvalGrid& grid) {
  const double edge = endpoint_magnitude(w, grid);
  AdmissibilityReport report;
  report.mean = trapezoid(grid, [&](double t) { return w.evaluate(t); });
  report.norm_sq = trapezoid(grid, [&](double t) {
                     return std::complex<double>(std::norm(w.evaluate(t)), 0.0);
                   }).real();
  report.decay_ok = edge < decay_tolerance(w);
  return report;
}

std::vector<double> vanishing_moments(const MotherWavelet& w, int up_to, const EvalGrid& grid) {
  if (up_to < 0) throw Error(ErrorCode::InvalidArgument, "moment order must be >= 0");
  endpoint_magnitude(w, grid);
  std::vector<double> moments;
  for (int k = 0; k <= up_to; ++k)
    moments.push_back(
        std::abs(trapezoid(grid, [&](double t) { return std::pow(t, k) * w.evaluate(t); })));
  return moments;
}

}  // namespace scalohar
