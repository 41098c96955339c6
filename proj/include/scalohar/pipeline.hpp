#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scalohar/nn.hpp"
#include "scalohar/scalogram_image.hpp"
#include "scalohar/signal_io.hpp"
#include "scalohar/transform.hpp"

namespace scalohar {

/// Signal -> scalogram -> grayscale -> stacked image, for every sample.
struct PipelineConfig {
  std::vector<Axis> axes{Axis::X, Axis::Y, Axis::Z};
  std::vector<MotherWavelet> wavelets{MotherWavelet::mexican_hat()};
  std::size_t n_scales = 64;
  double a0 = 2.0;
  /// 0: derive dj so the largest scale is half the window length.
  double dj = 0.0;
  /// Unset: per-wavelet default (absmax for DOG, minmax otherwise).
  std::optional<GrayMode> gray_mode;
  /// false keeps raw coefficients (float) instead of [0, 1] pixels.
  bool normalize = true;
  CwtStrategy strategy = CwtStrategy::Fft;
  Boundary boundary = Boundary::ZeroPad;
  /// Cut the image into this many scale bands and stack them as channels.
  std::size_t bands = 1;
  /// 0 keeps the native size.
  std::size_t resize_height = 0;
  std::size_t resize_width = 0;
};

ScaleGrid pipeline_grid(const PipelineConfig& cfg, std::size_t n_samples);

/// Channel order: wavelet-major, then axis, then band.
ImageTensor sample_image(const MultiAxisSample& sample, const PipelineConfig& cfg);

/// Parallel map over samples; output order matches `ds`.
std::vector<ImageTensor> build_images(const Dataset& ds, const PipelineConfig& cfg);

/// Replaces every image by its sliding crops; with crop.width = 0 the input
/// is returned unchanged.
std::vector<ImageTensor> augment(std::span<const ImageTensor> images, const CropSpec& crop);

/// Images must carry labels and share one shape.
nn::TensorDataset to_tensor_dataset(std::span<const ImageTensor> images, std::size_t n_classes);

// ------------------------------------------------------------- synthetic

/// Four classes on x/y/z: sine at f_low, sine at f_high, linear chirp from
/// f_low to f_high, white noise. Amplitudes and phases vary per sample.
struct SynthSpec {
  std::size_t per_class = 250;
  std::size_t length = 64;
  double sample_rate_hz = 50.0;
  double f_low = 2.0;
  double f_high = 8.0;
  double noise = 0.1;
  std::uint64_t seed = 7;
  /// 2 keeps only the sine-vs-chirp pair (classes f_low sine and chirp).
  std::size_t n_classes = 4;
};

Dataset make_synthetic(const SynthSpec& spec);

}  // namespace scalohar
