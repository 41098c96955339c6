#include "scalohar/harness.hpp"

#include <array>
#include <cstdio>
#include <exception>
#include <sstream>

#include "scalohar/error.hpp"
#include "scalohar/rng.hpp"

namespace scalohar {

namespace {

constexpr std::array<std::pair<SweepDimension, std::string_view>, 11> kDimensions{{
    {SweepDimension::Axes, "axes"},
    {SweepDimension::ConvLayers, "conv_layers"},
    {SweepDimension::Neurons, "neurons"},
    {SweepDimension::DenseLayers, "dense_layers"},
    {SweepDimension::CutImages, "cut_images"},
    {SweepDimension::Wavelet, "wavelet"},
    {SweepDimension::WaveletCombo, "wavelet_combo"},
    {SweepDimension::BatchSize, "batch_size"},
    {SweepDimension::ImageSize, "image_size"},
    {SweepDimension::DogOrder, "dog_order"},
    {SweepDimension::DogCombo, "dog_combo"},
}};

std::size_t parse_count(std::string_view text, std::string_view what) {
  std::size_t v = 0;
  for (char c : text) {
    if (c < '0' || c > '9') {
      v = 0;
      break;
    }
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  if (text.empty() || v == 0)
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be a positive integer, got '" +
                                                std::string(text) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i)
    if (i == text.size() || text[i] == sep) {
      out.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  return out;
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& ds,
                                const std::function<void(std::size_t, const nn::EpochRecord&)>& on_epoch) {
  if (ds.size() == 0) throw Error(ErrorCode::EmptyDataset, "dataset is empty");
  const auto [train_ds, test_ds] = split_train_test(ds, {cfg.train_fraction, derive_seed(cfg.seed, "split")});
  auto train_images = build_images(train_ds, cfg.pipeline);
  auto test_images = build_images(test_ds, cfg.pipeline);
  if (cfg.augment.width > 0) {
    train_images = augment(train_images, cfg.augment);
    test_images = augment(test_images, {cfg.augment.width, 0});
  }
  const auto train_set = to_tensor_dataset(train_images, ds.n_classes());
  const auto test_set = to_tensor_dataset(test_images, ds.n_classes());

  ExperimentResult result;
  result.network = nn::Network::from_descriptor(nn::arch_descriptor(train_set.shape, ds.n_classes(), cfg.arch),
                                                derive_seed(cfg.seed, "init"));
  nn::TrainConfig tc = cfg.train;
  tc.seed = derive_seed(cfg.seed, "train");
  result.history = nn::train(result.network, train_set, test_set, tc, on_epoch);
  result.evaluation = nn::evaluate(result.network, test_set);
  return result;
}

std::string_view dimension_name(SweepDimension d) {
  for (const auto& [dim, name] : kDimensions)
    if (dim == d) return name;
  return "?";
}

SweepDimension parse_dimension(std::string_view name) {
  for (const auto& [dim, n] : kDimensions)
    if (n == name) return dim;
  throw Error(ErrorCode::InvalidArgument, "unknown sweep dimension '" + std::string(name) + "'");
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& base, SweepDimension d, std::string_view value) {
  ExperimentConfig cfg = base;
  switch (d) {
    case SweepDimension::Axes:
      cfg.pipeline.axes = parse_axis_list(value);
      break;
    case SweepDimension::ConvLayers: {
      const std::size_t n = parse_count(value, "conv_layers");
      auto& w = cfg.arch.conv_widths;
      if (w.empty()) w.push_back(32);
      w.resize(n, w.back());
      break;
    }
    case SweepDimension::Neurons: {
      cfg.arch.conv_widths.clear();
      for (auto part : split(value, '/')) cfg.arch.conv_widths.push_back(parse_count(part, "neurons"));
      break;
    }
    case SweepDimension::DenseLayers: {
      // "0" is meaningful here: no hidden dense layer.
      cfg.arch.dense_layers = value == "0" ? 0 : parse_count(value, "dense_layers");
      break;
    }
    case SweepDimension::CutImages:
      cfg.pipeline.bands = parse_count(value, "cut_images");
      break;
    case SweepDimension::Wavelet:
      cfg.pipeline.wavelets = {MotherWavelet::parse(value)};
      break;
    case SweepDimension::WaveletCombo:
      cfg.pipeline.wavelets.clear();
      for (auto part : split(value, '+')) cfg.pipeline.wavelets.push_back(MotherWavelet::parse(part));
      break;
    case SweepDimension::BatchSize:
      cfg.train.batch_size = parse_count(value, "batch_size");
      break;
    case SweepDimension::ImageSize: {
      const auto parts = split(value, 'x');
      if (parts.size() != 2) throw Error(ErrorCode::InvalidArgument, "image_size must be <H>x<W>");
      cfg.pipeline.resize_height = parse_count(parts[0], "image height");
      cfg.pipeline.resize_width = parse_count(parts[1], "image width");
      break;
    }
    case SweepDimension::DogOrder:
      cfg.pipeline.wavelets = {MotherWavelet::dog(static_cast<int>(parse_count(value, "dog_order")))};
      break;
    case SweepDimension::DogCombo:
      cfg.pipeline.wavelets.clear();
      for (auto part : split(value, '+'))
        cfg.pipeline.wavelets.push_back(MotherWavelet::dog(static_cast<int>(parse_count(part, "dog order"))));
      break;
  }
  cfg.seed = derive_seed(base.seed, value);
  return cfg;
}

SweepReport run_sweep(const SweepSpec& spec, const Dataset& ds) {
  if (spec.values.empty()) throw Error(ErrorCode::EmptySweep, "sweep has no values");
  SweepReport report;
  report.dimension = spec.dimension;
  report.rows.resize(spec.values.size());
  std::vector<std::exception_ptr> errors(spec.values.size());
  const auto n = static_cast<std::ptrdiff_t>(spec.values.size());
#pragma omp parallel for schedule(dynamic) num_threads(spec.jobs > 0 ? spec.jobs : 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::string& value = spec.values[i];
    try {
      const auto cfg = apply_sweep_value(spec.base, spec.dimension, value);
      auto result = run_experiment(cfg, ds);
      report.rows[i] = {value, std::move(result.history), result.evaluation.metrics};
    } catch (const Error& e) {
      errors[i] = std::make_exception_ptr(
          Error(e.code(), std::string(dimension_name(spec.dimension)) + "=" + value + ": " + e.what()));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return report;
}

std::string report_csv(const SweepReport& report) {
  std::string out = "sweep_value,epoch,train_loss,test_loss,accuracy,precision,recall\n";
  for (const auto& row : report.rows)
    for (std::size_t e = 0; e < row.history.size(); ++e) {
      const auto& r = row.history[e];
      out += row.value + "," + std::to_string(e + 1) + "," + fmt("%.6f", r.train_loss) + "," +
             fmt("%.6f", r.test_loss) + "," + fmt("%.6f", r.accuracy) + "," + fmt("%.6f", r.precision) + "," +
             fmt("%.6f", r.recall) + "\n";
    }
  return out;
}

std::string report_summary(const SweepReport& report) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    if (report.rows[i].final_metrics.accuracy > report.rows[best].final_metrics.accuracy) best = i;
  std::ostringstream out;
  out << "sweep: " << dimension_name(report.dimension) << "\n"
      << "precision/recall are macro averages; a class with no predictions counts as 0\n\n";
  char line[256];
  std::snprintf(line, sizeof line, "  %-16s %8s %10s %10s %10s %10s\n", "value", "epochs", "loss", "accuracy",
                "precision", "recall");
  out << line;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& row = report.rows[i];
    const auto& m = row.final_metrics;
    std::snprintf(line, sizeof line, "%c %-16s %8zu %10.6f %10.6f %10.6f %10.6f\n", i == best ? '*' : ' ',
                  row.value.c_str(), row.history.size(), m.loss, m.accuracy, m.macro_precision, m.macro_recall);
    out << line;
  }
  if (!report.rows.empty()) out << "\nbest: " << report.rows[best].value << "\n";
  return out.str();
}

std::string confusion_csv(const Confusion& confusion, const std::vector<std::string>& class_names) {
  auto name = [&](std::size_t i) { return i < class_names.size() ? class_names[i] : std::to_string(i); };
  std::string out = "true\\predicted";
  for (std::size_t j = 0; j < confusion.size(); ++j) out += "," + name(j);
  out += "\n";
  for (std::size_t i = 0; i < confusion.size(); ++i) {
    out += name(i);
    for (auto c : confusion[i]) out += "," + std::to_string(c);
    out += "\n";
  }
  return out;
}

std::string metrics_text(const Metrics& m, const Confusion& confusion, const std::vector<std::string>& class_names) {
  std::ostringstream out;
  out << "precision/recall: macro averages over " << confusion.size() << " classes\n"
      << "loss      " << fmt("%.6f", m.loss) << "\n"
      << "accuracy  " << fmt("%.6f", m.accuracy) << "\n"
      << "precision " << fmt("%.6f", m.macro_precision) << "\n"
      << "recall    " << fmt("%.6f", m.macro_recall) << "\n";
  for (auto c : classes_without_predictions(confusion))
    out << "warning: class " << (c < class_names.size() ? class_names[c] : std::to_string(c))
        << " was never predicted; its precision counts as 0\n";
  return out.str();
}

}  // namespace scalohar
