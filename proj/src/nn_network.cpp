#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "scalohar/error.hpp"
#include "scalohar/nn.hpp"

namespace scalohar::nn {

namespace {

std::size_t parse_size(std::string_view text, std::string_view context) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw Error(ErrorCode::InvalidArchitecture,
                "bad number '" + std::string(text) + "' in '" + std::string(context) + "'");
  return v;
}

// Splits on commas at bracket depth zero.
std::vector<std::string_view> split_top(std::string_view s) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '[') ++depth;
    if (s[i] == ']') --depth;
    if (depth < 0) throw Error(ErrorCode::InvalidArchitecture, "unbalanced ']'");
    if (s[i] == ',' && depth == 0) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  if (depth != 0) throw Error(ErrorCode::InvalidArchitecture, "unbalanced '['");
  out.push_back(s.substr(start));
  return out;
}

std::vector<std::string_view> split_colon(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == ':') {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  return out;
}

std::unique_ptr<Layer> parse_layer(std::string_view text, Shape& shape, bool inside_residual);

std::vector<std::unique_ptr<Layer>> parse_layers(std::string_view text, Shape& shape,
                                                 bool inside_residual) {
  std::vector<std::unique_ptr<Layer>> layers;
  for (auto part : split_top(text)) layers.push_back(parse_layer(part, shape, inside_residual));
  return layers;
}

std::unique_ptr<Layer> parse_layer(std::string_view text, Shape& shape, bool inside_residual) {
  std::unique_ptr<Layer> layer;
  if (text.starts_with("res[") || text.starts_with("resproj[")) {
    const bool proj = text.starts_with("resproj[");
    if (!text.ends_with("]")) throw Error(ErrorCode::InvalidArchitecture, "unterminated residual block");
    const auto body = text.substr(proj ? 8 : 4, text.size() - (proj ? 9 : 5));
    Shape inner_shape = shape;
    auto inner = parse_layers(body, inner_shape, true);
    try {
      layer = std::make_unique<Residual>(std::move(inner), shape, proj);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ShapeMismatch) throw;
      throw Error(ErrorCode::InvalidArchitecture, e.what());
    }
  } else {
    const auto parts = split_colon(text);
    const auto kind = parts[0];
    if (kind == "conv") {
      if (parts.size() < 3) throw Error(ErrorCode::InvalidArchitecture, "conv needs :<out>:<kh>x<kw>");
      const std::size_t out = parse_size(parts[1], text);
      const auto x = parts[2].find('x');
      if (x == std::string_view::npos)
        throw Error(ErrorCode::InvalidArchitecture, "conv kernel must be <kh>x<kw>");
      const std::size_t kh = parse_size(parts[2].substr(0, x), text);
      const std::size_t kw = parse_size(parts[2].substr(x + 1), text);
      std::size_t stride = 1, pad = 0;
      for (std::size_t i = 3; i < parts.size(); ++i) {
        if (parts[i].starts_with("s"))
          stride = parse_size(parts[i].substr(1), text);
        else if (parts[i].starts_with("p"))
          pad = parse_size(parts[i].substr(1), text);
        else
          throw Error(ErrorCode::InvalidArchitecture, "unknown conv option in '" + std::string(text) + "'");
      }
      layer = std::make_unique<Conv2D>(shape.channels, out, kh, kw, stride, pad);
    } else if (kind == "pool") {
      if (parts.size() < 2 || parts.size() > 3)
        throw Error(ErrorCode::InvalidArchitecture, "pool needs :<size>[:<stride>]");
      const std::size_t size = parse_size(parts[1], text);
      const std::size_t stride = parts.size() == 3 ? parse_size(parts[2], text) : size;
      layer = std::make_unique<MaxPool>(size, stride);
    } else if (kind == "dense") {
      if (parts.size() != 2) throw Error(ErrorCode::InvalidArchitecture, "dense needs :<units>");
      layer = std::make_unique<Dense>(shape.size(), parse_size(parts[1], text));
    } else if (kind == "relu" && parts.size() == 1) {
      layer = std::make_unique<ReLU>();
    } else if (kind == "softmax" && parts.size() == 1) {
      if (inside_residual) throw Error(ErrorCode::InvalidArchitecture, "softmax inside a residual block");
      layer = std::make_unique<Softmax>();
    } else {
      throw Error(ErrorCode::InvalidArchitecture, "unknown layer '" + std::string(text) + "'");
    }
  }
  try {
    shape = layer->output_shape(shape);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidArchitecture, e.what());
  }
  return layer;
}

}  // namespace

Network::Network(const Network& other)
    : input_shape_(other.input_shape_), output_shape_(other.output_shape_) {
  for (const auto& layer : other.layers_) layers_.push_back(layer->clone());
}

Network& Network::operator=(const Network& other) {
  if (this != &other) {
    Network copy(other);
    *this = std::move(copy);
  }
  return *this;
}

Network Network::from_descriptor(std::string_view descriptor, std::uint64_t seed) {
  if (!descriptor.starts_with("in="))
    throw Error(ErrorCode::InvalidArchitecture, "descriptor must start with in=<C>x<H>x<W>;");
  const auto semi = descriptor.find(';');
  if (semi == std::string_view::npos) throw Error(ErrorCode::InvalidArchitecture, "missing ';'");
  const auto dims = descriptor.substr(3, semi - 3);
  const auto x1 = dims.find('x');
  const auto x2 = dims.find('x', x1 == std::string_view::npos ? 0 : x1 + 1);
  if (x1 == std::string_view::npos || x2 == std::string_view::npos)
    throw Error(ErrorCode::InvalidArchitecture, "input shape must be <C>x<H>x<W>");
  Network net;
  net.input_shape_ = {parse_size(dims.substr(0, x1), dims), parse_size(dims.substr(x1 + 1, x2 - x1 - 1), dims),
                      parse_size(dims.substr(x2 + 1), dims)};
  if (net.input_shape_.size() == 0) throw Error(ErrorCode::InvalidArchitecture, "empty input shape");
  Shape shape = net.input_shape_;
  net.layers_ = parse_layers(descriptor.substr(semi + 1), shape, false);
  if (net.layers_.size() < 2 || net.layers_.back()->descriptor() != "softmax")
    throw Error(ErrorCode::InvalidArchitecture, "network must end with softmax");
  for (std::size_t i = 0; i + 1 < net.layers_.size(); ++i)
    if (net.layers_[i]->descriptor() == "softmax")
      throw Error(ErrorCode::InvalidArchitecture, "softmax is only allowed as the final layer");
  net.output_shape_ = shape;

  Rng rng(seed);
  for (auto& p : net.parameters()) {
    if (p.fan_in == 0) {
      std::fill(p.values.begin(), p.values.end(), 0.0);
      continue;
    }
    const double limit = std::sqrt(6.0 / static_cast<double>(p.fan_in));
    for (auto& v : p.values) v = rng.uniform(-limit, limit);
  }
  net.round_parameters_to_float();
  return net;
}

std::string Network::descriptor() const {
  std::string d = "in=" + input_shape_.str() + ";";
  for (std::size_t i = 0; i < layers_.size(); ++i) d += (i ? "," : "") + layers_[i]->descriptor();
  return d;
}

std::vector<ParamRef> Network::parameters() {
  std::vector<ParamRef> refs;
  for (auto& layer : layers_) layer->collect(refs);
  return refs;
}

std::size_t Network::parameter_count() const {
  std::size_t total = 0;
  for (const auto& p : const_cast<Network*>(this)->parameters()) total += p.values.size();
  return total;
}

std::vector<Layer*> Network::layers() {
  std::vector<Layer*> out;
  for (auto& l : layers_) out.push_back(l.get());
  return out;
}

void Network::round_parameters_to_float() {
  for (auto& p : parameters())
    for (auto& v : p.values) v = static_cast<double>(static_cast<float>(v));
}

void Network::check_input(const Batch& input) const {
  if (!(input.shape == input_shape_))
    throw Error(ErrorCode::ShapeMismatch, "network expects " + input_shape_.str() + ", got " +
                                              input.shape.str());
  if (input.data.size() != input.n * input.shape.size())
    throw Error(ErrorCode::ShapeMismatch, "batch buffer size does not match its shape");
}

void Network::run_forward(const Batch& input, std::size_t n_layers) {
  check_input(input);
  acts_.resize(layers_.size());
  for (std::size_t i = 0; i < n_layers; ++i) layers_[i]->forward(i == 0 ? input : acts_[i - 1], acts_[i]);
}

Batch Network::forward(const Batch& input) {
  run_forward(input, layers_.size());
  return acts_.back();
}

Batch Network::logits(const Batch& input) {
  run_forward(input, layers_.size() - 1);
  return acts_[layers_.size() - 2];
}

namespace {

void check_labels(std::span<const int> labels, std::size_t n, std::size_t k) {
  if (labels.size() != n) throw Error(ErrorCode::ShapeMismatch, "label count differs from batch size");
  for (int y : labels)
    if (y < 0 || static_cast<std::size_t>(y) >= k)
      throw Error(ErrorCode::LabelOutOfRange, "label " + std::to_string(y) + " for " +
                                                  std::to_string(k) + " classes");
}

// Per-row log-sum-exp cross entropy; optionally writes (p - onehot) / n.
double softmax_cross_entropy(const Batch& logits, std::span<const int> labels, Batch* grad) {
  const std::size_t k = logits.shape.size();
  double total = 0.0;
  for (std::size_t n = 0; n < logits.n; ++n) {
    const auto z = logits.sample(n);
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - mx);
    const double log_norm = mx + std::log(sum);
    total += log_norm - z[static_cast<std::size_t>(labels[n])];
    if (grad) {
      auto g = grad->sample(n);
      for (std::size_t i = 0; i < k; ++i)
        g[i] = std::exp(z[i] - log_norm) / static_cast<double>(logits.n);
      g[static_cast<std::size_t>(labels[n])] -= 1.0 / static_cast<double>(logits.n);
    }
  }
  return total / static_cast<double>(logits.n);
}

}  // namespace

double Network::loss(const Batch& input, std::span<const int> labels) {
  check_labels(labels, input.n, n_classes());
  run_forward(input, layers_.size() - 1);
  return softmax_cross_entropy(acts_[layers_.size() - 2], labels, nullptr);
}

double Network::loss_and_backward(const Batch& input, std::span<const int> labels) {
  check_labels(labels, input.n, n_classes());
  const std::size_t last = layers_.size() - 1;  // the softmax
  run_forward(input, last);
  Batch grad(input.n, acts_[last - 1].shape);
  const double loss = softmax_cross_entropy(acts_[last - 1], labels, &grad);
  Batch next;
  for (std::size_t i = last; i-- > 0;) {
    layers_[i]->backward(i == 0 ? input : acts_[i - 1], acts_[i], grad, next);
    std::swap(grad, next);
  }
  return loss;
}

double cross_entropy(const Batch& probs, std::span<const int> labels) {
  check_labels(labels, probs.n, probs.shape.size());
  double total = 0.0;
  for (std::size_t n = 0; n < probs.n; ++n)
    total -= std::log(probs.sample(n)[static_cast<std::size_t>(labels[n])]);
  return total / static_cast<double>(probs.n);
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

Prediction predict(Network& net, std::span<const double> image) {
  Batch batch(1, net.input_shape());
  if (image.size() != batch.data.size())
    throw Error(ErrorCode::ShapeMismatch, "image has " + std::to_string(image.size()) +
                                              " values, network expects " +
                                              std::to_string(batch.data.size()));
  std::copy(image.begin(), image.end(), batch.data.begin());
  const Batch probs = net.forward(batch);
  Prediction p;
  p.probabilities.assign(probs.data.begin(), probs.data.end());
  p.label = argmax(p.probabilities);
  return p;
}

namespace {

// Which branch every ReLU and max-pool window takes for this input. A central
// difference straddling a change of this pattern measures a kink, not the
// derivative.
void piecewise_pattern(const std::vector<Layer*>& layers, Batch x, std::vector<char>& bits) {
  for (auto* layer : layers) {
    Batch y;
    if (auto* res = dynamic_cast<Residual*>(layer)) {
      std::vector<Layer*> inner;
      for (auto& l : res->inner()) inner.push_back(l.get());
      piecewise_pattern(inner, x, bits);
    }
    layer->forward(x, y);
    if (dynamic_cast<ReLU*>(layer) || dynamic_cast<MaxPool*>(layer)) {
      Batch ones = y;
      std::fill(ones.data.begin(), ones.data.end(), 1.0);
      Batch routed;
      layer->backward(x, y, ones, routed);
      for (double g : routed.data) bits.push_back(static_cast<char>(g));
    }
    x = std::move(y);
  }
}

std::vector<char> piecewise_pattern(Network& net, const Batch& input) {
  std::vector<char> bits;
  piecewise_pattern(net.layers(), input, bits);
  return bits;
}

}  // namespace

double gradient_check(Network& net, const Batch& input, std::span<const int> labels, double eps,
                      double fraction, std::uint64_t seed) {
  auto params = net.parameters();
  net.loss_and_backward(input, labels);
  struct Site {
    std::size_t block, index;
    double analytic;
  };
  std::vector<Site> sites;
  for (std::size_t b = 0; b < params.size(); ++b)
    for (std::size_t i = 0; i < params[b].values.size(); ++i) sites.push_back({b, i, params[b].grads[i]});
  const std::size_t total = sites.size();
  const auto wanted = std::max<std::size_t>(
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(total))),
      std::min<std::size_t>(total, 16));
  Rng rng(seed);
  // Partial Fisher-Yates: the first `wanted` entries become the sample.
  for (std::size_t i = 0; i < wanted; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(total - i));
    std::swap(sites[i], sites[j]);
  }
  const auto base = piecewise_pattern(net, input);
  double worst = 0.0;
  for (std::size_t s = 0; s < wanted; ++s) {
    auto& value = params[sites[s].block].values[sites[s].index];
    const double original = value;
    // Shrink the step until neither side crosses a kink; a site still
    // straddling one at eps/1000 is skipped.
    bool smooth = false;
    double numeric = 0.0;
    for (double h = eps; h >= eps * 1e-3 && !smooth; h *= 0.1) {
      value = original + h;
      const double plus = net.loss(input, labels);
      smooth = piecewise_pattern(net, input) == base;
      value = original - h;
      const double minus = net.loss(input, labels);
      smooth = smooth && piecewise_pattern(net, input) == base;
      numeric = (plus - minus) / (2.0 * h);
    }
    value = original;
    if (!smooth) continue;
    const double analytic = sites[s].analytic;
    if (std::abs(analytic) + std::abs(numeric) < 1e-10) continue;
    worst = std::max(worst, std::abs(analytic - numeric) /
                                (std::abs(analytic) + std::abs(numeric) + 1e-12));
  }
  return worst;
}

}  // namespace scalohar::nn
