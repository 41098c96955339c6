#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scalohar/kernels.hpp"
#include "scalohar/metrics.hpp"
#include "scalohar/rng.hpp"

namespace scalohar::nn {

struct Shape {
  std::size_t channels = 1, height = 1, width = 1;

  std::size_t size() const { return channels * height * width; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

/// A batch of n tensors of one shape, NCHW, double precision.
struct Batch {
  std::size_t n = 0;
  Shape shape;
  std::vector<double> data;

  Batch() = default;
  Batch(std::size_t n_, Shape shape_) : n(n_), shape(shape_), data(n_ * shape_.size()) {}

  std::span<double> sample(std::size_t i) { return {data.data() + i * shape.size(), shape.size()}; }
  std::span<const double> sample(std::size_t i) const {
    return {data.data() + i * shape.size(), shape.size()};
  }
};

/// View of one trainable tensor and its gradient buffer.
struct ParamRef {
  std::span<double> values;
  std::span<double> grads;
  /// He-uniform fan-in; 0 for biases (initialized to zero).
  std::size_t fan_in = 0;
};

class Layer {
 public:
  virtual ~Layer() = default;

  /// Canonical descriptor fragment, e.g. "conv:32:5x5:s1:p0".
  virtual std::string descriptor() const = 0;
  /// Throws ShapeMismatch when the input cannot feed this layer.
  virtual Shape output_shape(const Shape& in) const = 0;
  virtual void forward(const Batch& in, Batch& out) = 0;
  /// Overwrites parameter gradients with those of this batch.
  virtual void backward(const Batch& in, const Batch& out, const Batch& grad_out,
                        Batch& grad_in) = 0;
  virtual void collect(std::vector<ParamRef>&) {}
  virtual std::unique_ptr<Layer> clone() const = 0;
};

class Conv2D final : public Layer {
 public:
  Conv2D(std::size_t in_channels, std::size_t out_channels, std::size_t kernel_h,
         std::size_t kernel_w, std::size_t stride = 1, std::size_t pad = 0);

  std::string descriptor() const override;
  Shape output_shape(const Shape& in) const override;
  void forward(const Batch& in, Batch& out) override;
  void backward(const Batch& in, const Batch& out, const Batch& grad_out, Batch& grad_in) override;
  void collect(std::vector<ParamRef>& refs) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Conv2D>(*this); }

  std::span<double> weights() { return weights_; }
  std::span<double> bias() { return bias_; }

 private:
  kernels::ConvGeometry geometry(const Batch& in) const;

  std::size_t in_channels_, out_channels_, kernel_h_, kernel_w_, stride_, pad_;
  std::vector<double> weights_, bias_, grad_weights_, grad_bias_;
};

class MaxPool final : public Layer {
 public:
  MaxPool(std::size_t size = 2, std::size_t stride = 2);

  std::string descriptor() const override;
  Shape output_shape(const Shape& in) const override;
  void forward(const Batch& in, Batch& out) override;
  /// Each upstream gradient goes to the first maximal input of its window.
  void backward(const Batch& in, const Batch& out, const Batch& grad_out, Batch& grad_in) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<MaxPool>(*this); }

 private:
  std::size_t size_, stride_;
};

class Dense final : public Layer {
 public:
  Dense(std::size_t in_units, std::size_t out_units);

  std::string descriptor() const override;
  Shape output_shape(const Shape& in) const override;
  void forward(const Batch& in, Batch& out) override;
  void backward(const Batch& in, const Batch& out, const Batch& grad_out, Batch& grad_in) override;
  void collect(std::vector<ParamRef>& refs) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Dense>(*this); }

  std::span<double> weights() { return weights_; }
  std::span<double> bias() { return bias_; }

 private:
  std::size_t in_units_, out_units_;
  std::vector<double> weights_, bias_, grad_weights_, grad_bias_;
};

class ReLU final : public Layer {
 public:
  std::string descriptor() const override { return "relu"; }
  Shape output_shape(const Shape& in) const override { return in; }
  void forward(const Batch& in, Batch& out) override;
  void backward(const Batch& in, const Batch& out, const Batch& grad_out, Batch& grad_in) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<ReLU>(*this); }
};

/// Row-wise softmax over the flattened sample. Only valid as the final layer;
/// training differentiates it jointly with the cross-entropy loss.
class Softmax final : public Layer {
 public:
  std::string descriptor() const override { return "softmax"; }
  Shape output_shape(const Shape& in) const override { return {in.size(), 1, 1}; }
  void forward(const Batch& in, Batch& out) override;
  void backward(const Batch& in, const Batch& out, const Batch& grad_out, Batch& grad_in) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Softmax>(*this); }
};

/// y = F(x) + x, or F(x) + P(x) with a 1x1 convolution P when `projection`
/// is set. F must preserve the spatial size.
class Residual final : public Layer {
 public:
  Residual(std::vector<std::unique_ptr<Layer>> inner, const Shape& input, bool projection);
  Residual(const Residual& other);

  std::string descriptor() const override;
  Shape output_shape(const Shape& in) const override;
  void forward(const Batch& in, Batch& out) override;
  void backward(const Batch& in, const Batch& out, const Batch& grad_out, Batch& grad_in) override;
  void collect(std::vector<ParamRef>& refs) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Residual>(*this); }

  std::vector<std::unique_ptr<Layer>>& inner() { return inner_; }

 private:
  std::vector<std::unique_ptr<Layer>> inner_;
  std::unique_ptr<Conv2D> projection_;
  Shape input_shape_;
  std::vector<Batch> acts_;  // inner activations of the last forward
  Batch shortcut_;
};

/// Layer list behind a descriptor string:
///   in=<C>x<H>x<W>;<layer>,<layer>,...
/// with layers conv:<out>:<kh>x<kw>[:s<stride>][:p<pad>], pool:<size>[:<stride>],
/// dense:<units>, relu, softmax, res[<layers>], resproj[<layers>].
class Network {
 public:
  Network() = default;
  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  /// Builds and He-uniform initializes the network.
  static Network from_descriptor(std::string_view descriptor, std::uint64_t seed);

  std::string descriptor() const;
  const Shape& input_shape() const { return input_shape_; }
  std::size_t n_classes() const { return output_shape_.size(); }
  std::size_t parameter_count() const;
  std::vector<ParamRef> parameters();
  std::vector<Layer*> layers();

  /// Class probabilities, n x K.
  Batch forward(const Batch& input);
  /// Pre-softmax outputs.
  Batch logits(const Batch& input);

  /// Mean categorical cross-entropy from a stable log-sum-exp; no gradients.
  double loss(const Batch& input, std::span<const int> labels);

  /// Mean categorical cross-entropy; fills every parameter's gradient.
  double loss_and_backward(const Batch& input, std::span<const int> labels);

  /// Parameters are kept float32-representable so checkpoints are exact.
  void round_parameters_to_float();

 private:
  void check_input(const Batch& input) const;
  void run_forward(const Batch& input, std::size_t n_layers);

  Shape input_shape_;
  Shape output_shape_;
  std::vector<std::unique_ptr<Layer>> layers_;
  std::vector<Batch> acts_;
};

/// Mean -log p[label]; probabilities are rows of `probs`.
double cross_entropy(const Batch& probs, std::span<const int> labels);

/// Argmax with ties to the lowest index.
std::size_t argmax(std::span<const double> values);

struct Prediction {
  std::size_t label = 0;
  std::vector<double> probabilities;
};

Prediction predict(Network& net, std::span<const double> image);

/// Max over sampled parameters of |analytic - numeric| / (|analytic| +
/// |numeric| + 1e-12), central differences with step eps. Samples
/// max(ceil(fraction * P), min(P, 16)) parameters. Pairs where both
/// gradients are below 1e-10 count as agreeing.
double gradient_check(Network& net, const Batch& input, std::span<const int> labels,
                      double eps = 1e-4, double fraction = 0.01, std::uint64_t seed = 1);

// ---------------------------------------------------------------- training

enum class OptimizerKind { Sgd, Adam };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config);
  /// One update of every parameter from its current gradient.
  void step(std::span<const ParamRef> params);
  const OptimizerConfig& config() const { return config_; }

 private:
  OptimizerConfig config_;
  std::uint64_t steps_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

/// Images flattened to doubles' worth of float storage, one row per sample.
struct TensorDataset {
  Shape shape;
  std::vector<float> data;
  std::vector<int> labels;
  std::size_t n_classes = 0;

  std::size_t size() const { return labels.size(); }
  std::span<const float> sample(std::size_t i) const {
    return {data.data() + i * shape.size(), shape.size()};
  }
  void push_back(std::span<const float> image, int label);
};

Batch gather(const TensorDataset& ds, std::span<const std::size_t> indices);

struct Evaluation {
  Metrics metrics;
  Confusion confusion;
};

/// Mean loss, accuracy, macro precision/recall and the confusion matrix,
/// evaluated in chunks of `chunk` samples.
Evaluation evaluate(Network& net, const TensorDataset& ds, std::size_t chunk = 64);

struct TrainConfig {
  std::size_t batch_size = 35;
  std::size_t epochs = 20;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;
  /// Stop after the first epoch whose test accuracy reaches this; 0 disables.
  double stop_at_accuracy = 0.0;
};

struct EpochRecord {
  double train_loss = 0.0;
  double test_loss = 0.0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

using History = std::vector<EpochRecord>;

/// Mini-batch training, shuffled per epoch from cfg.seed. Throws Diverged on
/// a non-finite loss.
History train(Network& net, const TensorDataset& train_set, const TensorDataset& test_set,
              const TrainConfig& cfg,
              const std::function<void(std::size_t, const EpochRecord&)>& on_epoch = {});

// -------------------------------------------------------------- checkpoint

/// `SHNN`, u32 version, u32-length-prefixed UTF-8 descriptor, then every
/// parameter tensor as u64 count + float32 little-endian values.
std::vector<std::uint8_t> encode_checkpoint(Network& net);
Network decode_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint(Network& net, const std::filesystem::path& path);
Network load_checkpoint(const std::filesystem::path& path);

// ----------------------------------------------------------- architectures

struct ArchParams {
  std::vector<std::size_t> conv_widths{32, 64};
  std::size_t kernel = 5;
  std::size_t dense_layers = 1;
  std::size_t dense_units = 1000;
  /// Insert a shape-preserving residual block (two 3x3 convs) after each pool.
  bool residual = false;
};

/// `paper-initial`: two 5x5 convs (32, 64) each followed by 2x2 max-pooling,
/// dense 1000, dense K. `paper-best`: three convs 32/128/128. `paper-residual`:
/// paper-initial with a residual block after every pool.
ArchParams preset(std::string_view name);
std::vector<std::string> preset_names();

/// Expands an architecture into a descriptor for the given input and class count.
std::string arch_descriptor(const Shape& input, std::size_t n_classes, const ArchParams& arch);

}  // namespace scalohar::nn
