#include <algorithm>
#include <cmath>
#include <numeric>

#include "scalohar/error.hpp"
#include "scalohar/nn.hpp"

namespace scalohar::nn {

Optimizer::Optimizer(OptimizerConfig config) : config_(config) {
  if (!(config_.learning_rate > 0.0) || !std::isfinite(config_.learning_rate))
    throw Error(ErrorCode::InvalidArgument, "learning rate must be positive");
  if (config_.kind == OptimizerKind::Adam &&
      (!(config_.beta1 > 0.0 && config_.beta1 < 1.0) || !(config_.beta2 > 0.0 && config_.beta2 < 1.0) ||
       !(config_.epsilon > 0.0)))
    throw Error(ErrorCode::InvalidArgument, "Adam needs beta1, beta2 in (0,1) and epsilon > 0");
}

void Optimizer::step(std::span<const ParamRef> params) {
  ++steps_;
  if (config_.kind == OptimizerKind::Sgd) {
    for (const auto& p : params)
      for (std::size_t i = 0; i < p.values.size(); ++i) p.values[i] -= config_.learning_rate * p.grads[i];
    return;
  }
  if (m_.size() != params.size()) {
    m_.assign(params.size(), {});
    v_.assign(params.size(), {});
  }
  const double t = static_cast<double>(steps_);
  const double c1 = 1.0 - std::pow(config_.beta1, t);
  const double c2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t b = 0; b < params.size(); ++b) {
    const auto& p = params[b];
    auto& m = m_[b];
    auto& v = v_[b];
    if (m.size() != p.values.size()) {
      m.assign(p.values.size(), 0.0);
      v.assign(p.values.size(), 0.0);
    }
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      const double g = p.grads[i];
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
      p.values[i] -= config_.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + config_.epsilon);
    }
  }
}

void TensorDataset::push_back(std::span<const float> image, int label) {
  if (image.size() != shape.size())
    throw Error(ErrorCode::ShapeMismatch, "image has " + std::to_string(image.size()) +
                                              " values, dataset shape is " + shape.str());
  data.insert(data.end(), image.begin(), image.end());
  labels.push_back(label);
}

Batch gather(const TensorDataset& ds, std::span<const std::size_t> indices) {
  Batch batch(indices.size(), ds.shape);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = ds.sample(indices[i]);
    std::copy(src.begin(), src.end(), batch.sample(i).begin());
  }
  return batch;
}

namespace {

std::vector<int> gather_labels(const TensorDataset& ds, std::span<const std::size_t> indices) {
  std::vector<int> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(ds.labels[i]);
  return out;
}

void check_dataset(const Network& net, const TensorDataset& ds, const char* which) {
  if (ds.size() == 0) throw Error(ErrorCode::EmptyDataset, std::string(which) + " set is empty");
  if (!(ds.shape == net.input_shape()))
    throw Error(ErrorCode::ShapeMismatch, std::string(which) + " images are " + ds.shape.str() +
                                              ", network expects " + net.input_shape().str());
  if (ds.data.size() != ds.size() * ds.shape.size())
    throw Error(ErrorCode::ShapeMismatch, std::string(which) + " buffer does not match its labels");
}

}  // namespace

Evaluation evaluate(Network& net, const TensorDataset& ds, std::size_t chunk) {
  if (ds.size() == 0) throw Error(ErrorCode::EmptyDataset, "nothing to evaluate");
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t k = net.n_classes();
  Evaluation ev;
  ev.confusion.assign(k, std::vector<std::size_t>(k, 0));
  double loss_sum = 0.0;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < ds.size(); start += chunk) {
    const std::size_t end = std::min(ds.size(), start + chunk);
    idx.resize(end - start);
    std::iota(idx.begin(), idx.end(), start);
    const Batch input = gather(ds, idx);
    const auto labels = gather_labels(ds, idx);
    loss_sum += net.loss(input, labels) * static_cast<double>(idx.size());
    const Batch probs = net.forward(input);
    for (std::size_t i = 0; i < idx.size(); ++i)
      ++ev.confusion[static_cast<std::size_t>(labels[i])][argmax(probs.sample(i))];
  }
  ev.metrics = metrics_from_confusion(ev.confusion, loss_sum / static_cast<double>(ds.size()));
  return ev;
}

History train(Network& net, const TensorDataset& train_set, const TensorDataset& test_set,
              const TrainConfig& cfg, const std::function<void(std::size_t, const EpochRecord&)>& on_epoch) {
  if (cfg.batch_size == 0) throw Error(ErrorCode::InvalidArgument, "batch size must be positive");
  check_dataset(net, train_set, "training");
  check_dataset(net, test_set, "test");
  Optimizer opt(cfg.optimizer);
  Rng rng(derive_seed(cfg.seed, "train-shuffle"));
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  History history;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::span<const std::size_t> idx(order.data() + start,
                                             std::min(cfg.batch_size, order.size() - start));
      const Batch input = gather(train_set, idx);
      const auto labels = gather_labels(train_set, idx);
      const double loss = net.loss_and_backward(input, labels);
      if (!std::isfinite(loss))
        throw Error(ErrorCode::Diverged, "non-finite training loss in epoch " + std::to_string(epoch + 1));
      loss_sum += loss * static_cast<double>(idx.size());
      opt.step(net.parameters());
      net.round_parameters_to_float();
    }
    const auto ev = evaluate(net, test_set, std::max<std::size_t>(cfg.batch_size, 64));
    if (!std::isfinite(ev.metrics.loss))
      throw Error(ErrorCode::Diverged, "non-finite test loss in epoch " + std::to_string(epoch + 1));
    EpochRecord rec;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    rec.test_loss = ev.metrics.loss;
    rec.accuracy = ev.metrics.accuracy;
    rec.precision = ev.metrics.macro_precision;
    rec.recall = ev.metrics.macro_recall;
    history.push_back(rec);
    if (on_epoch) on_epoch(epoch, rec);
    if (cfg.stop_at_accuracy > 0.0 && rec.accuracy >= cfg.stop_at_accuracy) break;
  }
  return history;
}

}  // namespace scalohar::nn
