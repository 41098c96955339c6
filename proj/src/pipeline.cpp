#include "scalohar/pipeline.hpp"

#include <cmath>
#include <exception>
#include <numbers>

#include "scalohar/error.hpp"
#include "scalohar/rng.hpp"

namespace scalohar {

ScaleGrid pipeline_grid(const PipelineConfig& cfg, std::size_t n_samples) {
  if (cfg.n_scales == 0) throw Error(ErrorCode::InvalidScale, "need at least one scale");
  if (cfg.dj > 0.0) return build_scale_grid(cfg.a0, cfg.dj, cfg.n_scales);
  return scale_grid_spanning(cfg.a0, static_cast<double>(n_samples) / 2.0, cfg.n_scales);
}

namespace {

Signal axis_signal(const MultiAxisSample& sample, Axis axis) {
  if (sample.has(axis)) return sample.at(axis);
  if (axis == Axis::Magnitude) return magnitude(sample);
  throw Error(ErrorCode::MissingAxis,
              "sample '" + sample.id + "' has no " + std::string(axis_tag(axis)) + " axis");
}

}  // namespace

ImageTensor sample_image(const MultiAxisSample& sample, const PipelineConfig& cfg) {
  if (cfg.axes.empty() || cfg.wavelets.empty())
    throw Error(ErrorCode::InvalidArgument, "pipeline needs at least one axis and one wavelet");
  if (cfg.bands == 0) throw Error(ErrorCode::InvalidArgument, "band count must be positive");
  std::vector<Signal> signals;
  for (Axis a : cfg.axes) signals.push_back(axis_signal(sample, a));
  const ScaleGrid grid = pipeline_grid(cfg, signals.front().size());

  std::vector<ImagePlane> planes;
  for (const auto& w : cfg.wavelets) {
    const GrayMode mode = cfg.gray_mode.value_or(default_gray_mode(w));
    for (std::size_t i = 0; i < cfg.axes.size(); ++i) {
      const Scalogram sc = cwt(signals[i], w, grid, cfg.strategy, cfg.boundary);
      Provenance prov{std::string(axis_tag(cfg.axes[i])), w.selector()};
      if (cfg.normalize) {
        planes.push_back(to_grayscale(sc, mode, std::move(prov)));
      } else {
        ImagePlane p{sc.n_scales, sc.n_times, {}, std::move(prov)};
        p.pixels.assign(sc.coefficients.begin(), sc.coefficients.end());
        planes.push_back(std::move(p));
      }
    }
  }
  ImageTensor img = stack_channels(std::move(planes));
  if (cfg.bands > 1) {
    std::vector<ImagePlane> banded;
    for (auto& part : split_bands(img, cfg.bands))
      for (auto& p : part.channels) banded.push_back(std::move(p));
    img = stack_channels(std::move(banded));
  }
  if (cfg.resize_height || cfg.resize_width)
    img = resize(img, cfg.resize_height ? cfg.resize_height : img.height(),
                 cfg.resize_width ? cfg.resize_width : img.width());
  img.id = sample.id;
  img.label = sample.label;
  return img;
}

std::vector<ImageTensor> build_images(const Dataset& ds, const PipelineConfig& cfg) {
  std::vector<ImageTensor> out(ds.size());
  std::vector<std::exception_ptr> errors(ds.size());
  const auto n = static_cast<std::ptrdiff_t>(ds.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = sample_image(ds.samples[i], cfg);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  // First failure in dataset order, whatever the thread timing.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<ImageTensor> augment(std::span<const ImageTensor> images, const CropSpec& crop) {
  std::vector<ImageTensor> out;
  if (crop.width == 0) {
    out.assign(images.begin(), images.end());
    return out;
  }
  for (const auto& img : images)
    for (auto& c : sliding_crops(img, crop)) out.push_back(std::move(c));
  return out;
}

nn::TensorDataset to_tensor_dataset(std::span<const ImageTensor> images, std::size_t n_classes) {
  if (images.empty()) throw Error(ErrorCode::EmptyDataset, "no images");
  nn::TensorDataset ds;
  ds.shape = {images.front().n_channels(), images.front().height(), images.front().width()};
  ds.n_classes = n_classes;
  ds.data.reserve(images.size() * ds.shape.size());
  for (const auto& img : images) {
    if (!img.label) throw Error(ErrorCode::InvalidArgument, "image '" + img.id + "' has no label");
    if (*img.label < 0 || static_cast<std::size_t>(*img.label) >= n_classes)
      throw Error(ErrorCode::LabelOutOfRange, "image '" + img.id + "' has label " + std::to_string(*img.label));
    if (img.n_channels() != ds.shape.channels || img.height() != ds.shape.height ||
        img.width() != ds.shape.width)
      throw Error(ErrorCode::DimensionMismatch, "image '" + img.id + "' differs in shape from the first image");
    for (const auto& plane : img.channels) ds.data.insert(ds.data.end(), plane.pixels.begin(), plane.pixels.end());
    ds.labels.push_back(*img.label);
  }
  return ds;
}

Dataset make_synthetic(const SynthSpec& spec) {
  if (spec.n_classes != 2 && spec.n_classes != 4)
    throw Error(ErrorCode::InvalidArgument, "synthetic sets have 2 or 4 classes");
  if (spec.per_class == 0 || spec.length < 2 || !(spec.sample_rate_hz > 0.0))
    throw Error(ErrorCode::InvalidArgument, "synthetic set needs samples, length >= 2 and a positive rate");
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  Dataset ds;
  ds.class_names = spec.n_classes == 4 ? std::vector<std::string>{"sine_low", "sine_high", "chirp", "noise"}
                                       : std::vector<std::string>{"sine", "chirp"};
  Rng rng(spec.seed);
  const double duration = static_cast<double>(spec.length) / spec.sample_rate_hz;
  // Interleave classes so any prefix of the set stays balanced.
  for (std::size_t i = 0; i < spec.per_class; ++i) {
    for (std::size_t c = 0; c < spec.n_classes; ++c) {
      const std::size_t kind = spec.n_classes == 4 ? c : (c == 0 ? 0 : 2);
      MultiAxisSample s;
      s.id = "s" + std::to_string(i * spec.n_classes + c);
      s.label = static_cast<int>(c);
      for (Axis axis : {Axis::X, Axis::Y, Axis::Z}) {
        const double amp = rng.uniform(0.5, 1.5);
        const double phase = rng.uniform(0.0, kTwoPi);
        const double offset = rng.uniform(-0.5, 0.5);
        std::vector<double> x(spec.length);
        for (std::size_t k = 0; k < spec.length; ++k) {
          const double t = static_cast<double>(k) / spec.sample_rate_hz;
          double v = 0.0;
          switch (kind) {
            case 0: v = amp * std::sin(kTwoPi * spec.f_low * t + phase); break;
            case 1: v = amp * std::sin(kTwoPi * spec.f_high * t + phase); break;
            case 2: {
              const double rate = (spec.f_high - spec.f_low) / duration;
              v = amp * std::sin(kTwoPi * (spec.f_low * t + 0.5 * rate * t * t) + phase);
              break;
            }
            default: v = amp * rng.normal(); break;
          }
          x[k] = offset + v + spec.noise * rng.normal();
        }
        s.axes.emplace(axis, Signal::make(std::move(x), spec.sample_rate_hz));
      }
      ds.samples.push_back(std::move(s));
    }
  }
  return ds;
}

}  // namespace scalohar
