#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "scalohar/metrics.hpp"
#include "scalohar/nn.hpp"
#include "scalohar/pipeline.hpp"

namespace scalohar {

/// Everything needed to go from a signal dataset to a trained network.
struct ExperimentConfig {
  PipelineConfig pipeline;
  nn::ArchParams arch;
  nn::TrainConfig train;
  double train_fraction = 0.8;
  /// Training crops; width 0 trains on whole images. Test images always get
  /// one centered crop of the same width.
  CropSpec augment{0, 0};
  std::uint64_t seed = 0;
};

struct ExperimentResult {
  nn::Network network;
  nn::History history;
  nn::Evaluation evaluation;  // final test-set evaluation
};

/// Splits with derive_seed(seed, "split"), initializes with
/// derive_seed(seed, "init"), shuffles with derive_seed(seed, "train").
ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& ds,
                                const std::function<void(std::size_t, const nn::EpochRecord&)>& on_epoch = {});

enum class SweepDimension {
  Axes,
  ConvLayers,
  Neurons,
  DenseLayers,
  CutImages,
  Wavelet,
  WaveletCombo,
  BatchSize,
  ImageSize,
  DogOrder,
  DogCombo,
};

std::string_view dimension_name(SweepDimension d);
SweepDimension parse_dimension(std::string_view name);

/// Applies one sweep value to a copy of `base`:
///   axes "x" | "mag" | "xyz" | "xyzm" | "x,y"; conv_layers N (widths padded
///   with the last base width); neurons "32/128/128"; dense_layers N;
///   cut_images N; wavelet <selector>; wavelet_combo "mexh+paul";
///   batch_size N; image_size "HxW"; dog_order M; dog_combo "2+4".
ExperimentConfig apply_sweep_value(const ExperimentConfig& base, SweepDimension d, std::string_view value);

struct SweepSpec {
  SweepDimension dimension = SweepDimension::Axes;
  std::vector<std::string> values;
  ExperimentConfig base;
  /// Sweep points run concurrently; results are merged in spec order.
  int jobs = 1;
};

struct SweepRow {
  std::string value;
  nn::History history;
  Metrics final_metrics;
};

struct SweepReport {
  SweepDimension dimension = SweepDimension::Axes;
  std::vector<SweepRow> rows;
};

/// Point seeds are derive_seed(base.seed, value). Errors carry the value.
SweepReport run_sweep(const SweepSpec& spec, const Dataset& ds);

/// `sweep_value,epoch,train_loss,test_loss,accuracy,precision,recall`
std::string report_csv(const SweepReport& report);

/// One line per value with its final metrics; the best final accuracy
/// (first on ties) is marked with '*'.
std::string report_summary(const SweepReport& report);

/// Row-per-true-class CSV with a header of predicted class names.
std::string confusion_csv(const Confusion& confusion, const std::vector<std::string>& class_names);

/// Human-readable metric block with the averaging convention in its header.
std::string metrics_text(const Metrics& m, const Confusion& confusion, const std::vector<std::string>& class_names);

}  // namespace scalohar
