#include <algorithm>
#include <numeric>

#include "scalohar/harness.hpp"
#include "test_util.hpp"

using namespace scalohar;

namespace {

Dataset small_synth(std::size_t per_class = 12) {
  SynthSpec s;
  s.per_class = per_class;
  s.length = 32;
  s.seed = 77;
  return make_synthetic(s);
}

ExperimentConfig tiny_experiment() {
  ExperimentConfig cfg;
  cfg.pipeline.n_scales = 16;
  cfg.arch.conv_widths = {4};
  cfg.arch.kernel = 3;
  cfg.arch.dense_units = 16;
  cfg.train.epochs = 2;
  cfg.train.batch_size = 8;
  cfg.seed = 5;
  return cfg;
}

Confusion confusion_of(const std::vector<int>& truth, const std::vector<int>& pred, std::size_t k) {
  Confusion c(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) ++c[truth[i]][pred[i]];
  return c;
}

}  // namespace

TEST(Metrics, AllCorrect) {
  const auto m = metrics_from_confusion(confusion_of({0, 1, 2, 2}, {0, 1, 2, 2}, 3), 0.1);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.macro_precision, 1.0);
  EXPECT_EQ(m.macro_recall, 1.0);
  EXPECT_EQ(m.loss, 0.1);
}

TEST(Metrics, AllClassZeroOnBalancedSeventeen) {
  std::vector<int> truth, pred;
  for (int k = 0; k < 17; ++k)
    for (int r = 0; r < 3; ++r) {
      truth.push_back(k);
      pred.push_back(0);
    }
  const auto c = confusion_of(truth, pred, 17);
  const auto m = metrics_from_confusion(c, 0);
  EXPECT_NEAR(m.accuracy, 1.0 / 17, 1e-15);
  EXPECT_NEAR(m.accuracy, 0.0588, 1e-4);
  EXPECT_NEAR(m.macro_recall, 1.0 / 17, 1e-15);
  EXPECT_NEAR(m.macro_precision, (1.0 / 17) / 17, 1e-15);
  EXPECT_EQ(classes_without_predictions(c).size(), 16u);
  const auto text = metrics_text(m, c, {});
  EXPECT_NE(text.find("macro"), std::string::npos);
  EXPECT_NE(text.find("never predicted"), std::string::npos);
}

TEST(Metrics, RowsSumToClassCounts) {
  Rng rng(3);
  std::vector<int> truth(200), pred(200);
  for (auto& t : truth) t = int(rng.below(5));
  for (auto& p : pred) p = int(rng.below(5));
  const auto c = confusion_of(truth, pred, 5);
  for (int k = 0; k < 5; ++k)
    EXPECT_EQ(std::accumulate(c[k].begin(), c[k].end(), std::size_t{0}),
              std::size_t(std::count(truth.begin(), truth.end(), k)));
}

TEST(Metrics, PermutationInvariant) {
  Rng rng(4);
  std::vector<std::size_t> order(150);
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> truth(150), pred(150);
  for (auto& t : truth) t = int(rng.below(4));
  for (std::size_t i = 0; i < 150; ++i) pred[i] = rng.uniform() < 0.7 ? truth[i] : int(rng.below(4));
  const auto base = metrics_from_confusion(confusion_of(truth, pred, 4), 0);
  for (int trial = 0; trial < 10; ++trial) {
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<int> t2, p2;
    for (auto i : order) {
      t2.push_back(truth[i]);
      p2.push_back(pred[i]);
    }
    const auto m = metrics_from_confusion(confusion_of(t2, p2, 4), 0);
    EXPECT_EQ(m.accuracy, base.accuracy);
    EXPECT_EQ(m.macro_precision, base.macro_precision);
    EXPECT_EQ(m.macro_recall, base.macro_recall);
  }
}

TEST(Metrics, BalancedMacroRecallEqualsAccuracy) {
  // 3 classes x 10 samples, symmetric confusions.
  const Confusion c{{7, 2, 1}, {2, 6, 2}, {1, 2, 7}};
  const auto m = metrics_from_confusion(c, 0);
  EXPECT_NEAR(m.macro_recall, m.accuracy, 1e-15);
  EXPECT_NEAR(m.macro_precision, m.accuracy, 1e-15);
}

TEST(Metrics, ConfusionCsv) {
  const Confusion c{{2, 0}, {1, 3}};
  EXPECT_EQ(confusion_csv(c, {"walk", "fall"}), "true\\predicted,walk,fall\nwalk,2,0\nfall,1,3\n");
}

TEST(Sweep, DimensionNames) {
  for (const char* n : {"axes", "conv_layers", "neurons", "dense_layers", "cut_images", "wavelet", "wavelet_combo",
                        "batch_size", "image_size", "dog_order", "dog_combo"})
    EXPECT_EQ(dimension_name(parse_dimension(n)), n);
  EXPECT_SH_ERROR(parse_dimension("color"), InvalidArgument);
}

TEST(Sweep, ApplyValues) {
  ExperimentConfig base;
  base.arch.conv_widths = {32, 64};
  auto c = apply_sweep_value(base, SweepDimension::ConvLayers, "3");
  EXPECT_EQ(c.arch.conv_widths, (std::vector<std::size_t>{32, 64, 64}));
  c = apply_sweep_value(base, SweepDimension::Neurons, "32/128/128");
  EXPECT_EQ(c.arch.conv_widths, (std::vector<std::size_t>{32, 128, 128}));
  EXPECT_EQ(apply_sweep_value(base, SweepDimension::DenseLayers, "0").arch.dense_layers, 0u);
  EXPECT_EQ(apply_sweep_value(base, SweepDimension::Axes, "xyzm").pipeline.axes.size(), 4u);
  EXPECT_EQ(apply_sweep_value(base, SweepDimension::WaveletCombo, "mexh+paul").pipeline.wavelets,
            (std::vector<MotherWavelet>{MotherWavelet::mexican_hat(), MotherWavelet::paul()}));
  EXPECT_EQ(apply_sweep_value(base, SweepDimension::DogCombo, "2+4").pipeline.wavelets,
            (std::vector<MotherWavelet>{MotherWavelet::dog(2), MotherWavelet::dog(4)}));
  EXPECT_EQ(apply_sweep_value(base, SweepDimension::DogOrder, "3").pipeline.wavelets.front(), MotherWavelet::dog(3));
  c = apply_sweep_value(base, SweepDimension::ImageSize, "32x96");
  EXPECT_EQ(c.pipeline.resize_height, 32u);
  EXPECT_EQ(c.pipeline.resize_width, 96u);
  EXPECT_EQ(apply_sweep_value(base, SweepDimension::BatchSize, "35").train.batch_size, 35u);
  EXPECT_EQ(apply_sweep_value(base, SweepDimension::CutImages, "2").pipeline.bands, 2u);
  EXPECT_SH_ERROR(apply_sweep_value(base, SweepDimension::BatchSize, "0"), InvalidArgument);
  EXPECT_SH_ERROR(apply_sweep_value(base, SweepDimension::ImageSize, "32"), InvalidArgument);
  // Point seeds differ per value but not per call.
  EXPECT_EQ(apply_sweep_value(base, SweepDimension::BatchSize, "8").seed,
            apply_sweep_value(base, SweepDimension::BatchSize, "8").seed);
  EXPECT_NE(apply_sweep_value(base, SweepDimension::BatchSize, "8").seed,
            apply_sweep_value(base, SweepDimension::BatchSize, "9").seed);
}

TEST(Sweep, EmptyValues) {
  SweepSpec spec;
  EXPECT_SH_ERROR(run_sweep(spec, small_synth()), EmptySweep);
}

TEST(Sweep, AxesTableAndReproducible) {
  const auto ds = small_synth();
  SweepSpec spec;
  spec.dimension = SweepDimension::Axes;
  spec.values = {"x", "y", "z", "mag", "xyz", "xyzm"};
  spec.base = tiny_experiment();
  spec.base.train.epochs = 1;
  const auto a = run_sweep(spec, ds);
  ASSERT_EQ(a.rows.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(a.rows[i].value, spec.values[i]);
    EXPECT_EQ(a.rows[i].history.size(), 1u);
  }
  spec.jobs = 3;
  const auto b = run_sweep(spec, ds);
  EXPECT_EQ(report_csv(a), report_csv(b));
  EXPECT_EQ(report_summary(a), report_summary(b));
  const auto csv = report_csv(a);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "sweep_value,epoch,train_loss,test_loss,accuracy,precision,recall");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
  const auto summary = report_summary(a);
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '*'), 1);
}

TEST(Sweep, ErrorsNameTheValue) {
  SweepSpec spec;
  spec.dimension = SweepDimension::Wavelet;
  spec.values = {"mexh", "haar"};
  spec.base = tiny_experiment();
  try {
    run_sweep(spec, small_synth());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidWavelet);
    EXPECT_NE(std::string(e.what()).find("haar"), std::string::npos);
  }
}

TEST(Experiment, DeterministicAndShaped) {
  const auto ds = small_synth();
  const auto cfg = tiny_experiment();
  const auto a = run_experiment(cfg, ds), b = run_experiment(cfg, ds);
  ASSERT_EQ(a.history.size(), 2u);
  auto na = a.network, nb = b.network;
  EXPECT_EQ(nn::encode_checkpoint(na), nn::encode_checkpoint(nb));
  EXPECT_EQ(a.evaluation.confusion, b.evaluation.confusion);
  std::size_t total = 0;
  for (const auto& row : a.evaluation.confusion) total += std::accumulate(row.begin(), row.end(), std::size_t{0});
  EXPECT_EQ(total, 48u - 38u);  // floor(0.8 * 48) train
}

TEST(Experiment, CropAugmentation) {
  const auto ds = small_synth();
  auto cfg = tiny_experiment();
  cfg.augment = {24, 4};
  cfg.train.epochs = 1;
  auto r = run_experiment(cfg, ds);
  EXPECT_EQ(r.network.input_shape().width, 24u);
  std::size_t total = 0;
  for (const auto& row : r.evaluation.confusion) total += std::accumulate(row.begin(), row.end(), std::size_t{0});
  EXPECT_EQ(total, 10u);  // one centered crop per test image
}
