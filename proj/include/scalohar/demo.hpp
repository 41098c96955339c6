#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "scalohar/scalogram_image.hpp"
#include "scalohar/transform.hpp"

namespace scalohar {

/// Three signals on x in [0, 20): A = sin 2x then sin 10x (switch at x = 10),
/// B = the same pieces in reverse order, C = sin 2x + sin 10x. Their
/// magnitude spectra look alike; their scalograms do not.
struct FourierDemo {
  std::array<std::string, 3> names{"A", "B", "C"};
  std::array<Signal, 3> signals;
  std::array<std::vector<double>, 3> spectra;
  std::array<Scalogram, 3> scalograms;
  double cosine_ab = 0.0, cosine_ac = 0.0, cosine_bc = 0.0;
  /// L2 distance between the scalograms of A and B.
  double distance_ab = 0.0;
  /// Distance of A's scalogram to an identical recomputation of it.
  double self_recompute = 0.0;
  /// Distance of A's scalogram to the time-reversed scalogram of reversed A.
  double self_reversal = 0.0;
};

FourierDemo fourier_demo(const MotherWavelet& w, std::size_t samples_per_unit = 50);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Frobenius distance; DimensionMismatch when the shapes differ.
double scalogram_distance(const Scalogram& a, const Scalogram& b);

/// Dark polyline on a white plane, y autoscaled to the plane height.
ImagePlane plot_line(std::span<const double> y, std::size_t height, std::size_t width);

/// Plain-text report of the demo numbers.
std::string demo_report(const FourierDemo& demo);

}  // namespace scalohar
