// scalohar: signals -> scalograms -> CNN, from the command line.

#include <omp.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "run_config.hpp"
#include "scalohar/demo.hpp"
#include "scalohar/error.hpp"
#include "scalohar/harness.hpp"
#include "scalohar/nn.hpp"
#include "scalohar/pipeline.hpp"
#include "scalohar/rng.hpp"

namespace fs = std::filesystem;
using namespace scalohar;

namespace {

// ------------------------------------------------------------ option sets

struct PipelineArgs {
  std::string axes = "xyz";
  std::vector<std::string> wavelets{"mexh"};
  std::size_t scales = 64;
  double a0 = 2.0;
  double dj = 0.0;
  std::string gray = "auto";
  std::size_t bands = 1;
  std::size_t height = 0;
  std::size_t width = 0;
  std::string strategy = "fft";
  std::string boundary = "zero";
};

void add_pipeline_options(CLI::App* app, PipelineArgs& a) {
  app->add_option("--axes", a.axes, "Axes to transform: xyz, xyzm, z, mag, or a comma list")->capture_default_str();
  app->add_option("--wavelet", a.wavelets, "Mother wavelet (repeatable): mexh, dog:<m>, morlet[:w0], paul[:m]")
      ->capture_default_str();
  app->add_option("--scales", a.scales, "Number of scales (image rows)")->capture_default_str();
  app->add_option("--a0", a.a0, "Smallest scale in samples")->capture_default_str();
  app->add_option("--dj", a.dj, "Scale spacing in octaves; 0 spans up to half the window")->capture_default_str();
  app->add_option("--gray", a.gray, "Grayscale mapping: auto, minmax, absmax")->capture_default_str();
  app->add_option("--bands", a.bands, "Cut images into this many scale bands, stacked as channels")
      ->capture_default_str();
  app->add_option("--height", a.height, "Resize images to this height (0 keeps it)")->capture_default_str();
  app->add_option("--width", a.width, "Resize images to this width (0 keeps it)")->capture_default_str();
  app->add_option("--strategy", a.strategy, "CWT evaluation: fft or direct")->capture_default_str();
  app->add_option("--boundary", a.boundary, "Signal extension: zero or periodic")->capture_default_str();
}

PipelineConfig to_pipeline(const PipelineArgs& a) {
  PipelineConfig cfg;
  cfg.axes = parse_axis_list(a.axes);
  cfg.wavelets.clear();
  for (const auto& w : a.wavelets) cfg.wavelets.push_back(MotherWavelet::parse(w));
  cfg.n_scales = a.scales;
  cfg.a0 = a.a0;
  cfg.dj = a.dj;
  if (a.gray == "minmax")
    cfg.gray_mode = GrayMode::MinMax;
  else if (a.gray == "absmax")
    cfg.gray_mode = GrayMode::AbsMax;
  else if (a.gray != "auto")
    throw Error(ErrorCode::InvalidArgument, "--gray must be auto, minmax or absmax");
  cfg.bands = a.bands;
  cfg.resize_height = a.height;
  cfg.resize_width = a.width;
  if (a.strategy == "direct")
    cfg.strategy = CwtStrategy::Direct;
  else if (a.strategy != "fft")
    throw Error(ErrorCode::InvalidArgument, "--strategy must be fft or direct");
  if (a.boundary == "periodic")
    cfg.boundary = Boundary::Periodic;
  else if (a.boundary != "zero")
    throw Error(ErrorCode::InvalidArgument, "--boundary must be zero or periodic");
  return cfg;
}

struct ModelArgs {
  std::string preset = "paper-initial";
  std::string conv_widths;
  std::size_t kernel = 0;
  int dense_layers = -1;
  std::size_t dense_units = 0;
  bool residual = false;
  std::size_t epochs = 20;
  std::size_t batch_size = 35;
  std::string optimizer = "adam";
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double stop_at_accuracy = 0.0;
  double train_fraction = 0.8;
  std::size_t crop_width = 0;
  std::size_t augment_stride = 0;
};

void add_model_options(CLI::App* app, ModelArgs& a) {
  app->add_option("--preset", a.preset, "Architecture: paper-initial, paper-best, paper-residual")
      ->capture_default_str();
  app->add_option("--conv-widths", a.conv_widths, "Override conv widths, e.g. 32/128/128");
  app->add_option("--kernel", a.kernel, "Override the conv kernel size");
  app->add_option("--dense-layers", a.dense_layers, "Override the number of hidden dense layers");
  app->add_option("--dense-units", a.dense_units, "Override the hidden dense width");
  app->add_flag("--residual", a.residual, "Add a residual block after every pool");
  app->add_option("--epochs", a.epochs, "Training epochs")->capture_default_str();
  app->add_option("--batch-size", a.batch_size, "Mini-batch size")->capture_default_str();
  app->add_option("--optimizer", a.optimizer, "adam or sgd")->capture_default_str();
  app->add_option("--lr", a.lr, "Learning rate")->capture_default_str();
  app->add_option("--beta1", a.beta1, "Adam beta1")->capture_default_str();
  app->add_option("--beta2", a.beta2, "Adam beta2")->capture_default_str();
  app->add_option("--epsilon", a.epsilon, "Adam epsilon")->capture_default_str();
  app->add_option("--stop-at-accuracy", a.stop_at_accuracy, "Stop once test accuracy reaches this (0: never)")
      ->capture_default_str();
  app->add_option("--train-fraction", a.train_fraction, "Share of samples used for training")
      ->capture_default_str();
  app->add_option("--crop-width", a.crop_width, "Crop width in columns (0: no crop; 128 when augmenting)")
      ->capture_default_str();
  app->add_option("--augment-stride", a.augment_stride, "Sliding-crop stride for training images (0: off)")
      ->capture_default_str();
}

nn::ArchParams to_arch(const ModelArgs& a) {
  nn::ArchParams arch = nn::preset(a.preset);
  if (!a.conv_widths.empty()) {
    arch.conv_widths.clear();
    std::stringstream ss(a.conv_widths);
    for (std::string part; std::getline(ss, part, '/');) {
      std::size_t pos = 0;
      unsigned long v = 0;
      try {
        v = std::stoul(part, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != part.size() || v == 0)
        throw Error(ErrorCode::InvalidArgument, "--conv-widths expects e.g. 32/128/128");
      arch.conv_widths.push_back(v);
    }
  }
  if (a.kernel) arch.kernel = a.kernel;
  if (a.dense_layers >= 0) arch.dense_layers = static_cast<std::size_t>(a.dense_layers);
  if (a.dense_units) arch.dense_units = a.dense_units;
  if (a.residual) arch.residual = true;
  return arch;
}

nn::TrainConfig to_train(const ModelArgs& a) {
  nn::TrainConfig tc;
  tc.epochs = a.epochs;
  tc.batch_size = a.batch_size;
  if (a.optimizer == "sgd")
    tc.optimizer.kind = nn::OptimizerKind::Sgd;
  else if (a.optimizer != "adam")
    throw Error(ErrorCode::InvalidArgument, "--optimizer must be adam or sgd");
  tc.optimizer.learning_rate = a.lr;
  tc.optimizer.beta1 = a.beta1;
  tc.optimizer.beta2 = a.beta2;
  tc.optimizer.epsilon = a.epsilon;
  tc.stop_at_accuracy = a.stop_at_accuracy;
  return tc;
}

CropSpec to_crop(const ModelArgs& a) {
  if (a.augment_stride > 0) return {a.crop_width ? a.crop_width : 128, a.augment_stride};
  return {a.crop_width, 0};
}

// --------------------------------------------------------- tensor folders

// <dir>/index.csv: id,label,file,channels; <dir>/classes.txt.
struct TensorDir {
  std::vector<ImageTensor> images;
  std::vector<std::string> class_names;
};

std::string channel_tags(const ImageTensor& img) {
  std::string s;
  for (std::size_t c = 0; c < img.channels.size(); ++c)
    s += (c ? "|" : "") + img.channels[c].provenance.axis + ":" + img.channels[c].provenance.wavelet;
  return s;
}

std::vector<Provenance> parse_channel_tags(const std::string& tags) {
  std::vector<Provenance> out;
  std::stringstream ss(tags);
  for (std::string part; std::getline(ss, part, '|');) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::BadFormat, "bad channel tag '" + part + "'");
    out.push_back({part.substr(0, colon), part.substr(colon + 1)});
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

void write_tensor_dir(const fs::path& dir, const std::vector<ImageTensor>& images,
                      const std::vector<std::string>& class_names) {
  fs::create_directories(dir);
  std::string index = "id,label,file,channels\n";
  for (const auto& img : images) {
    const std::string file = img.id + ".cwts";
    export_raw(img, dir / file);
    index += img.id + "," + (img.label ? std::to_string(*img.label) : "") + "," + file + "," + channel_tags(img) + "\n";
  }
  write_text(dir / "index.csv", index);
  std::string classes;
  for (const auto& c : class_names) classes += c + "\n";
  write_text(dir / "classes.txt", classes);
}

TensorDir read_tensor_dir(const fs::path& dir) {
  std::ifstream index(dir / "index.csv");
  if (!index) throw Error(ErrorCode::Io, "cannot open " + (dir / "index.csv").string());
  TensorDir td;
  std::string line;
  std::getline(index, line);
  if (line.rfind("id,label,file,channels", 0) != 0)
    throw Error(ErrorCode::BadFormat, (dir / "index.csv").string() + ": unexpected header");
  while (std::getline(index, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    if (cols.size() != 4) throw Error(ErrorCode::BadFormat, "bad index row '" + line + "'");
    ImageTensor img = import_raw(dir / cols[2], parse_channel_tags(cols[3]));
    img.id = cols[0];
    if (!cols[1].empty()) img.label = std::stoi(cols[1]);
    td.images.push_back(std::move(img));
  }
  std::ifstream classes(dir / "classes.txt");
  for (std::string c; std::getline(classes, c);)
    if (!c.empty()) td.class_names.push_back(c);
  if (td.class_names.empty()) {
    int top = -1;
    for (const auto& img : td.images) top = std::max(top, img.label.value_or(-1));
    for (int k = 0; k <= top; ++k) td.class_names.push_back(std::to_string(k));
  }
  return td;
}

std::string history_csv(const nn::History& h) {
  std::string out = "epoch,train_loss,test_loss,accuracy,precision,recall\n";
  char buf[256];
  for (std::size_t e = 0; e < h.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f,%.6f,%.6f\n", e + 1, h[e].train_loss, h[e].test_loss,
                  h[e].accuracy, h[e].precision, h[e].recall);
    out += buf;
  }
  return out;
}

void print_epoch(std::size_t e, const nn::EpochRecord& r) {
  std::printf("epoch %3zu  train_loss %.4f  test_loss %.4f  acc %.4f  prec %.4f  rec %.4f\n", e + 1, r.train_loss,
              r.test_loss, r.accuracy, r.precision, r.recall);
  std::fflush(stdout);
}

std::vector<ImageTensor> center_crop_to(std::vector<ImageTensor> images, std::size_t width) {
  for (auto& img : images)
    if (img.width() > width) img = sliding_crops(img, {width, 0}).front();
  return images;
}

void set_jobs(int jobs) {
  if (jobs > 0) omp_set_num_threads(jobs);
}

// ------------------------------------------------------------- commands

struct IngestArgs {
  std::string data;
  std::string require;
  bool strict = false;
  std::size_t entropy_frames = 0;
};

int cmd_ingest_check(const IngestArgs& a) {
  LoadOptions opts;
  if (!a.require.empty()) opts.required_axes = parse_axis_list(a.require);
  opts.strict = a.strict;
  const auto result = load_dataset(a.data, opts);
  const auto& ds = result.dataset;
  const auto meta = fs::exists(meta_path_for(a.data)) ? read_meta(meta_path_for(a.data)) : DatasetMeta{};
  std::printf("dataset: %s\n", a.data.c_str());
  std::printf("samples: %zu\nclasses: %zu\n", ds.size(), ds.n_classes());
  if (!ds.samples.empty()) {
    const auto& first = ds.samples.front();
    std::printf("window: %zu samples at %g Hz\n", first.axes.begin()->second.size(),
                first.axes.begin()->second.sample_rate_hz);
  }
  std::vector<std::size_t> counts(ds.n_classes(), 0);
  std::vector<double> entropy(ds.n_classes(), 0.0);
  for (const auto& s : ds.samples) {
    ++counts[static_cast<std::size_t>(s.label)];
    if (a.entropy_frames) {
      const Signal& sig = s.has(Axis::Magnitude) ? s.at(Axis::Magnitude) : s.axes.begin()->second;
      try {
        entropy[static_cast<std::size_t>(s.label)] += energy_entropy(sig, a.entropy_frames);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroEnergy) throw;
      }
    }
  }
  for (std::size_t k = 0; k < ds.n_classes(); ++k) {
    std::printf("  %-24s %6zu", ds.class_names[k].c_str(), counts[k]);
    if (a.entropy_frames && counts[k]) std::printf("  mean energy entropy %.4f", entropy[k] / static_cast<double>(counts[k]));
    std::printf("\n");
  }
  (void)meta;
  if (!result.flagged.empty()) {
    std::printf("flagged (missing required axes): %zu\n", result.flagged.size());
    for (const auto& id : result.flagged) std::printf("  %s\n", id.c_str());
  }
  return 0;
}

struct SynthArgs {
  std::string out;
  std::size_t per_class = 250;
  std::size_t length = 64;
  double rate = 50.0;
  std::size_t classes = 4;
  double noise = 0.1;
  double f_low = 2.0;
  double f_high = 8.0;
  std::uint64_t seed = 0;
};

int cmd_synth(const SynthArgs& a) {
  SynthSpec spec;
  spec.per_class = a.per_class;
  spec.length = a.length;
  spec.sample_rate_hz = a.rate;
  spec.n_classes = a.classes;
  spec.noise = a.noise;
  spec.f_low = a.f_low;
  spec.f_high = a.f_high;
  spec.seed = derive_seed(a.seed, "synth");
  const Dataset ds = make_synthetic(spec);
  if (fs::path(a.out).has_parent_path()) fs::create_directories(fs::path(a.out).parent_path());
  save_dataset(a.out, ds, a.rate);
  std::printf("wrote %zu samples (%zu classes) to %s\n", ds.size(), ds.n_classes(), a.out.c_str());
  return 0;
}

struct TransformArgs {
  std::string data;
  std::string out;
  PipelineArgs pipeline;
  bool png = false;
  bool raw_coefficients = false;
  int jobs = 0;
};

int cmd_transform(const TransformArgs& a) {
  set_jobs(a.jobs);
  auto cfg = to_pipeline(a.pipeline);
  cfg.normalize = !a.raw_coefficients;
  LoadOptions opts;
  // Magnitude is derived when absent; the other requested axes must exist.
  for (Axis ax : cfg.axes)
    if (ax != Axis::Magnitude) opts.required_axes.push_back(ax);
  opts.strict = true;
  const auto loaded = load_dataset(a.data, opts);
  const auto images = build_images(loaded.dataset, cfg);
  write_tensor_dir(a.out, images, loaded.dataset.class_names);
  std::size_t pngs = 0;
  if (a.png) {
    if (a.raw_coefficients) throw Error(ErrorCode::InvalidArgument, "--png needs normalized images");
    fs::create_directories(fs::path(a.out) / "png");
    for (const auto& img : images) pngs += export_png(img, fs::path(a.out) / "png").size();
  }
  const auto& first = images.front();
  std::printf("wrote %zu tensors (%zux%zux%zu) to %s", images.size(), first.n_channels(), first.height(),
              first.width(), a.out.c_str());
  if (pngs) std::printf(", %zu PNGs", pngs);
  std::printf("\n");
  return 0;
}

struct RenderArgs {
  std::string tensors;
  std::string out;
};

int cmd_render(const RenderArgs& a) {
  const auto td = read_tensor_dir(a.tensors);
  fs::create_directories(a.out);
  std::size_t n = 0;
  for (auto img : td.images) {
    // Raw coefficient tensors are stretched to [0, 1] per plane.
    for (auto& p : img.channels) {
      const auto [lo, hi] = std::minmax_element(p.pixels.begin(), p.pixels.end());
      if (*lo >= 0.0f && *hi <= 1.0f) continue;
      const float l = *lo, span = *hi > *lo ? *hi - *lo : 1.0f;
      for (auto& v : p.pixels) v = *hi > l ? (v - l) / span : 0.5f;
    }
    n += export_png(img, a.out).size();
  }
  std::printf("wrote %zu PNGs to %s\n", n, a.out.c_str());
  return 0;
}

struct TrainArgs {
  std::string tensors;
  std::string out;
  ModelArgs model;
  std::uint64_t seed = 0;
};

int cmd_train(const TrainArgs& a) {
  const auto td = read_tensor_dir(a.tensors);
  const auto [train_idx, test_idx] =
      split_indices(td.images.size(), {a.model.train_fraction, derive_seed(a.seed, "split")});
  std::vector<ImageTensor> train_images, test_images;
  std::string split = "id,set\n";
  for (auto i : train_idx) {
    train_images.push_back(td.images[i]);
    split += td.images[i].id + ",train\n";
  }
  for (auto i : test_idx) {
    test_images.push_back(td.images[i]);
    split += td.images[i].id + ",test\n";
  }
  const CropSpec crop = to_crop(a.model);
  if (crop.width) {
    train_images = augment(train_images, crop);
    test_images = augment(test_images, {crop.width, 0});
  }
  const auto train_set = to_tensor_dataset(train_images, td.class_names.size());
  const auto test_set = to_tensor_dataset(test_images, td.class_names.size());
  const auto desc = nn::arch_descriptor(train_set.shape, td.class_names.size(), to_arch(a.model));
  auto net = nn::Network::from_descriptor(desc, derive_seed(a.seed, "init"));
  std::printf("network: %s (%zu parameters)\n", desc.c_str(), net.parameter_count());
  std::printf("train %zu / test %zu images\n", train_set.size(), test_set.size());
  auto tc = to_train(a.model);
  tc.seed = derive_seed(a.seed, "train");
  const auto history = nn::train(net, train_set, test_set, tc, print_epoch);
  const auto ev = nn::evaluate(net, test_set);

  fs::create_directories(a.out);
  nn::save_checkpoint(net, fs::path(a.out) / "model.shnn");
  write_text(fs::path(a.out) / "history.csv", history_csv(history));
  write_text(fs::path(a.out) / "split.csv", split);
  write_text(fs::path(a.out) / "metrics.txt", metrics_text(ev.metrics, ev.confusion, td.class_names));
  write_text(fs::path(a.out) / "confusion.csv", confusion_csv(ev.confusion, td.class_names));
  std::printf("%s", metrics_text(ev.metrics, ev.confusion, td.class_names).c_str());
  return 0;
}

struct EvalArgs {
  std::string tensors;
  std::string model;
  std::string split;
  std::string subset;
  std::string out;
};

int cmd_eval(const EvalArgs& a) {
  if (!fs::exists(a.model)) throw Error(ErrorCode::Io, "checkpoint not found: " + a.model);
  auto net = nn::load_checkpoint(a.model);
  auto td = read_tensor_dir(a.tensors);
  std::vector<ImageTensor> images;
  if (!a.split.empty()) {
    const std::string subset = a.subset.empty() ? "test" : a.subset;
    std::ifstream in(a.split);
    if (!in) throw Error(ErrorCode::Io, "cannot open split file " + a.split);
    std::map<std::string, std::string> set_of;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      const auto comma = line.find(',');
      if (comma != std::string::npos) set_of[line.substr(0, comma)] = line.substr(comma + 1);
    }
    for (auto& img : td.images)
      if (subset == "all" || set_of[img.id] == subset) images.push_back(std::move(img));
  } else {
    if (!a.subset.empty() && a.subset != "all") throw Error(ErrorCode::InvalidArgument, "--subset needs --split");
    images = std::move(td.images);
  }
  images = center_crop_to(std::move(images), net.input_shape().width);
  const auto ds = to_tensor_dataset(images, net.n_classes());
  const auto ev = nn::evaluate(net, ds);
  const auto text = metrics_text(ev.metrics, ev.confusion, td.class_names);
  std::printf("evaluated %zu images\n%s", ds.size(), text.c_str());
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    write_text(fs::path(a.out) / "metrics.txt", text);
    write_text(fs::path(a.out) / "confusion.csv", confusion_csv(ev.confusion, td.class_names));
  }
  return 0;
}

struct SweepArgs {
  std::string data;
  std::string out;
  std::string dimension;
  std::vector<std::string> values;
  PipelineArgs pipeline;
  ModelArgs model;
  std::uint64_t seed = 0;
  int jobs = 1;
};

int cmd_sweep(const SweepArgs& a) {
  const auto loaded = load_dataset(a.data);
  SweepSpec spec;
  spec.dimension = parse_dimension(a.dimension);
  spec.values = a.values;
  spec.base.pipeline = to_pipeline(a.pipeline);
  spec.base.arch = to_arch(a.model);
  spec.base.train = to_train(a.model);
  spec.base.train_fraction = a.model.train_fraction;
  spec.base.augment = to_crop(a.model);
  spec.base.seed = a.seed;
  spec.jobs = a.jobs;
  if (spec.jobs > 1) omp_set_max_active_levels(1);
  const auto report = run_sweep(spec, loaded.dataset);
  fs::create_directories(a.out);
  write_text(fs::path(a.out) / "report.csv", report_csv(report));
  write_text(fs::path(a.out) / "summary.txt", report_summary(report));
  std::printf("%s", report_summary(report).c_str());
  return 0;
}

struct DemoArgs {
  std::string out = "demo-fourier";
  std::string wavelet = "mexh";
  std::size_t samples_per_unit = 50;
};

int cmd_demo_fourier(const DemoArgs& a) {
  const auto demo = fourier_demo(MotherWavelet::parse(a.wavelet), a.samples_per_unit);
  fs::create_directories(a.out);
  const GrayMode mode = default_gray_mode(demo.scalograms[0].wavelet);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& n = demo.names[i];
    write_png(fs::path(a.out) / (n + "_waveform.png"), plot_line(demo.signals[i].samples, 128, 512));
    write_png(fs::path(a.out) / (n + "_spectrum.png"), plot_line(demo.spectra[i], 128, 512));
    write_png(fs::path(a.out) / (n + "_scalogram.png"), to_grayscale(demo.scalograms[i], mode));
  }
  const auto report = demo_report(demo);
  write_text(fs::path(a.out) / "report.txt", report);
  std::printf("%s", report.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wavelet scalograms and CNN classification of multi-axis signals"};
  app.require_subcommand(1);
  std::string config;

  auto with_config = [&](CLI::App* sub) {
    sub->add_option("--config", config, "key=value file; keys are flag names without dashes");
    return sub;
  };

  IngestArgs ingest;
  auto* s_ingest = with_config(app.add_subcommand("ingest-check", "Load a signal CSV and report on it"));
  s_ingest->add_option("--data", ingest.data, "Signal CSV (sidecar <csv>.meta optional)");
  s_ingest->add_option("--require", ingest.require, "Axes every sample must have, e.g. xyz");
  s_ingest->add_flag("--strict", ingest.strict, "Fail instead of flagging samples with missing axes");
  s_ingest->add_option("--entropy-frames", ingest.entropy_frames, "Report mean energy entropy over this many frames");

  SynthArgs synth;
  auto* s_synth = with_config(app.add_subcommand("synth", "Write a synthetic 2- or 4-class signal set"));
  s_synth->add_option("--out", synth.out, "Output CSV path");
  s_synth->add_option("--per-class", synth.per_class, "Samples per class")->capture_default_str();
  s_synth->add_option("--length", synth.length, "Samples per window")->capture_default_str();
  s_synth->add_option("--rate", synth.rate, "Sample rate in Hz")->capture_default_str();
  s_synth->add_option("--classes", synth.classes, "2 (sine, chirp) or 4 (two sines, chirp, noise)")
      ->capture_default_str();
  s_synth->add_option("--noise", synth.noise, "Additive noise standard deviation")->capture_default_str();
  s_synth->add_option("--f-low", synth.f_low, "Low frequency in Hz")->capture_default_str();
  s_synth->add_option("--f-high", synth.f_high, "High frequency in Hz")->capture_default_str();
  s_synth->add_option("--seed", synth.seed, "Random seed")->capture_default_str();

  TransformArgs transform;
  auto* s_transform = with_config(app.add_subcommand("transform", "Compute scalogram tensors (CWTS files)"));
  s_transform->add_option("--data", transform.data, "Signal CSV");
  s_transform->add_option("--out", transform.out, "Output directory");
  add_pipeline_options(s_transform, transform.pipeline);
  s_transform->add_flag("--png", transform.png, "Also write one PNG per channel");
  s_transform->add_flag("--raw-coefficients", transform.raw_coefficients, "Store coefficients, not [0,1] pixels");
  s_transform->add_option("--jobs", transform.jobs, "Worker threads (0: OpenMP default)")->capture_default_str();

  RenderArgs render;
  auto* s_render = with_config(app.add_subcommand("render", "Write PNGs for a tensor directory"));
  s_render->add_option("--tensors", render.tensors, "Directory written by transform");
  s_render->add_option("--out", render.out, "PNG output directory");

  TrainArgs train;
  auto* s_train = with_config(app.add_subcommand("train", "Train a network on a tensor directory"));
  s_train->add_option("--tensors", train.tensors, "Directory written by transform");
  s_train->add_option("--out", train.out, "Output directory (model.shnn, history.csv, ...)");
  add_model_options(s_train, train.model);
  s_train->add_option("--seed", train.seed, "Master seed for split, init and shuffling")->capture_default_str();

  EvalArgs eval;
  auto* s_eval = with_config(app.add_subcommand("eval", "Evaluate a checkpoint"));
  s_eval->add_option("--tensors", eval.tensors, "Directory written by transform");
  s_eval->add_option("--model", eval.model, "Checkpoint (model.shnn)");
  s_eval->add_option("--split", eval.split, "split.csv written by train");
  s_eval->add_option("--subset", eval.subset, "train, test or all (default test with --split)");
  s_eval->add_option("--out", eval.out, "Write metrics.txt and confusion.csv here");

  SweepArgs sweep;
  auto* s_sweep = with_config(app.add_subcommand("sweep", "Train one model per value of a sweep dimension"));
  s_sweep->add_option("--data", sweep.data, "Signal CSV");
  s_sweep->add_option("--out", sweep.out, "Output directory (report.csv, summary.txt)");
  s_sweep->add_option("--dimension", sweep.dimension,
                      "axes, conv_layers, neurons, dense_layers, cut_images, wavelet, wavelet_combo, "
                      "batch_size, image_size, dog_order, dog_combo");
  s_sweep->add_option("--values", sweep.values, "Comma-separated sweep values")->delimiter(',');
  add_pipeline_options(s_sweep, sweep.pipeline);
  add_model_options(s_sweep, sweep.model);
  s_sweep->add_option("--seed", sweep.seed, "Master seed")->capture_default_str();
  s_sweep->add_option("--jobs", sweep.jobs, "Sweep points run concurrently")->capture_default_str();

  DemoArgs demo;
  auto* s_demo = with_config(app.add_subcommand("demo-fourier", "Spectra vs scalograms of three test signals"));
  s_demo->add_option("--out", demo.out, "Output directory")->capture_default_str();
  s_demo->add_option("--wavelet", demo.wavelet, "Scalogram wavelet")->capture_default_str();
  s_demo->add_option("--samples-per-unit", demo.samples_per_unit, "Sampling density on [0, 20)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  auto require = [](const std::string& value, const char* flag) {
    if (value.empty()) throw Error(ErrorCode::InvalidArgument, std::string(flag) + " is required");
  };

  try {
    CLI::App* sub = app.get_subcommands().front();
    std::vector<std::pair<std::string, std::string>> entries;
    if (!config.empty()) entries = cli::read_run_config(config);
    cli::merge_run_config(*sub, entries);

    if (sub == s_ingest) {
      require(ingest.data, "--data");
      return cmd_ingest_check(ingest);
    }
    if (sub == s_synth) {
      require(synth.out, "--out");
      return cmd_synth(synth);
    }
    if (sub == s_transform) {
      require(transform.data, "--data");
      require(transform.out, "--out");
      return cmd_transform(transform);
    }
    if (sub == s_render) {
      require(render.tensors, "--tensors");
      require(render.out, "--out");
      return cmd_render(render);
    }
    if (sub == s_train) {
      require(train.tensors, "--tensors");
      require(train.out, "--out");
      return cmd_train(train);
    }
    if (sub == s_eval) {
      require(eval.tensors, "--tensors");
      require(eval.model, "--model");
      return cmd_eval(eval);
    }
    if (sub == s_sweep) {
      require(sweep.data, "--data");
      require(sweep.out, "--out");
      require(sweep.dimension, "--dimension");
      return cmd_sweep(sweep);
    }
    if (sub == s_demo) return cmd_demo_fourier(demo);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == ErrorCode::Diverged ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
