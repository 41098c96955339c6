#include "scalohar/demo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "scalohar/error.hpp"

namespace scalohar {

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "vectors differ in length");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / std::sqrt(aa * bb);
}

double scalogram_distance(const Scalogram& a, const Scalogram& b) {
  if (a.n_scales != b.n_scales || a.n_times != b.n_times)
    throw Error(ErrorCode::DimensionMismatch, "scalograms differ in shape");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.coefficients.size(); ++i) {
    const double d = a.coefficients[i] - b.coefficients[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

FourierDemo fourier_demo(const MotherWavelet& w, std::size_t samples_per_unit) {
  if (samples_per_unit < 4) throw Error(ErrorCode::InvalidArgument, "need at least 4 samples per unit");
  const std::size_t n = 20 * samples_per_unit;
  const double rate = static_cast<double>(samples_per_unit);
  std::array<std::vector<double>, 3> x;
  for (auto& v : x) v.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / rate;
    const double low = std::sin(2.0 * t), high = std::sin(10.0 * t);
    x[0][k] = t < 10.0 ? low : high;
    x[1][k] = t < 10.0 ? high : low;
    x[2][k] = low + high;
  }
  FourierDemo demo;
  const ScaleGrid grid = default_scale_grid(n);
  for (std::size_t i = 0; i < 3; ++i) {
    demo.signals[i] = Signal::make(x[i], rate);
    demo.spectra[i] = dft_magnitude(demo.signals[i]);
    demo.scalograms[i] = cwt(demo.signals[i], w, grid);
  }
  demo.cosine_ab = cosine_similarity(demo.spectra[0], demo.spectra[1]);
  demo.cosine_ac = cosine_similarity(demo.spectra[0], demo.spectra[2]);
  demo.cosine_bc = cosine_similarity(demo.spectra[1], demo.spectra[2]);
  demo.distance_ab = scalogram_distance(demo.scalograms[0], demo.scalograms[1]);
  demo.self_recompute = scalogram_distance(demo.scalograms[0], cwt(demo.signals[0], w, grid));

  std::vector<double> reversed(x[0].rbegin(), x[0].rend());
  Scalogram back = cwt(Signal::make(std::move(reversed), rate), w, grid);
  for (std::size_t s = 0; s < back.n_scales; ++s)
    std::reverse(back.coefficients.begin() + static_cast<std::ptrdiff_t>(s * back.n_times),
                 back.coefficients.begin() + static_cast<std::ptrdiff_t>((s + 1) * back.n_times));
  demo.self_reversal = scalogram_distance(demo.scalograms[0], back);
  return demo;
}

ImagePlane plot_line(std::span<const double> y, std::size_t height, std::size_t width) {
  if (y.empty() || height < 2 || width < 2) throw Error(ErrorCode::InvalidArgument, "nothing to plot");
  ImagePlane plane;
  plane.height = height;
  plane.width = width;
  plane.pixels.assign(height * width, 1.0f);
  const auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
  const double lo = *lo_it, span = *hi_it > lo ? *hi_it - lo : 1.0;
  auto row_of = [&](double v) {
    const double r = (1.0 - (v - lo) / span) * static_cast<double>(height - 1);
    return static_cast<std::size_t>(std::lround(r));
  };
  std::size_t prev = row_of(y[0]);
  for (std::size_t c = 0; c < width; ++c) {
    const std::size_t i = y.size() == 1 ? 0 : c * (y.size() - 1) / (width - 1);
    const std::size_t r = row_of(y[i]);
    // Vertical run joins consecutive points so steep segments stay connected.
    for (std::size_t k = std::min(prev, r); k <= std::max(prev, r); ++k) plane.pixels[k * width + c] = 0.0f;
    prev = r;
  }
  return plane;
}

std::string demo_report(const FourierDemo& d) {
  char buf[1024];
  std::snprintf(buf, sizeof buf,
                "signals: A = sin2x | sin10x, B = sin10x | sin2x, C = sin2x + sin10x on [0, 20)\n"
                "wavelet: %s, %zu samples, %zu scales\n"
                "spectral cosine similarity A,B: %.6f\n"
                "spectral cosine similarity A,C: %.6f\n"
                "spectral cosine similarity B,C: %.6f\n"
                "scalogram distance A,B:         %.6e\n"
                "self distance (recompute):      %.6e\n"
                "self distance (time reversal):  %.6e\n",
                d.scalograms[0].wavelet.selector().c_str(), d.signals[0].size(), d.scalograms[0].n_scales,
                d.cosine_ab, d.cosine_ac, d.cosine_bc, d.distance_ab, d.self_recompute, d.self_reversal);
  return buf;
}

}  // namespace scalohar
