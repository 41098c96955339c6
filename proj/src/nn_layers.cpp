#include <algorithm>
#include <cmath>

#include "scalohar/error.hpp"
#include "scalohar/nn.hpp"

namespace scalohar::nn {

std::string Shape::str() const {
  return std::to_string(channels) + "x" + std::to_string(height) + "x" + std::to_string(width);
}

// ------------------------------------------------------------------ Conv2D

Conv2D::Conv2D(std::size_t in_channels, std::size_t out_channels, std::size_t kernel_h,
               std::size_t kernel_w, std::size_t stride, std::size_t pad)
    : in_channels_(in_channels),
      out_channels_(out_channels),
      kernel_h_(kernel_h),
      kernel_w_(kernel_w),
      stride_(stride),
      pad_(pad) {
  if (!in_channels || !out_channels || !kernel_h || !kernel_w || !stride)
    throw Error(ErrorCode::InvalidArchitecture, "conv dimensions must be positive");
  weights_.assign(out_channels * in_channels * kernel_h * kernel_w, 0.0);
  grad_weights_.assign(weights_.size(), 0.0);
  bias_.assign(out_channels, 0.0);
  grad_bias_.assign(out_channels, 0.0);
}

std::string Conv2D::descriptor() const {
  return "conv:" + std::to_string(out_channels_) + ":" + std::to_string(kernel_h_) + "x" +
         std::to_string(kernel_w_) + ":s" + std::to_string(stride_) + ":p" + std::to_string(pad_);
}

Shape Conv2D::output_shape(const Shape& in) const {
  if (in.channels != in_channels_ || in.height + 2 * pad_ < kernel_h_ ||
      in.width + 2 * pad_ < kernel_w_)
    throw Error(ErrorCode::ShapeMismatch, descriptor() + " cannot take input " + in.str());
  return {out_channels_, (in.height + 2 * pad_ - kernel_h_) / stride_ + 1,
          (in.width + 2 * pad_ - kernel_w_) / stride_ + 1};
}

kernels::ConvGeometry Conv2D::geometry(const Batch& in) const {
  output_shape(in.shape);
  return {in.n,     in_channels_, in.shape.height, in.shape.width, out_channels_,
          kernel_h_, kernel_w_,   stride_,         pad_};
}

void Conv2D::forward(const Batch& in, Batch& out) {
  const auto g = geometry(in);
  out = Batch(in.n, output_shape(in.shape));
  kernels::conv2d_forward(g, in.data, weights_, bias_, out.data);
}

void Conv2D::backward(const Batch& in, const Batch&, const Batch& grad_out, Batch& grad_in) {
  const auto g = geometry(in);
  grad_in = Batch(in.n, in.shape);
  kernels::conv2d_backward(g, in.data, weights_, grad_out.data, grad_weights_, grad_bias_,
                           grad_in.data);
}

void Conv2D::collect(std::vector<ParamRef>& refs) {
  refs.push_back({weights_, grad_weights_, in_channels_ * kernel_h_ * kernel_w_});
  refs.push_back({bias_, grad_bias_, 0});
}

// ----------------------------------------------------------------- MaxPool

MaxPool::MaxPool(std::size_t size, std::size_t stride) : size_(size), stride_(stride) {
  if (!size || !stride) throw Error(ErrorCode::InvalidArchitecture, "pool size and stride must be positive");
}

std::string MaxPool::descriptor() const {
  return "pool:" + std::to_string(size_) + ":" + std::to_string(stride_);
}

Shape MaxPool::output_shape(const Shape& in) const {
  if (in.height < size_ || in.width < size_)
    throw Error(ErrorCode::ShapeMismatch, descriptor() + " cannot take input " + in.str());
  return {in.channels, (in.height - size_) / stride_ + 1, (in.width - size_) / stride_ + 1};
}

void MaxPool::forward(const Batch& in, Batch& out) {
  const Shape os = output_shape(in.shape);
  out = Batch(in.n, os);
  const std::size_t planes = in.n * in.shape.channels;
  const std::size_t w = in.shape.width;
  for (std::size_t p = 0; p < planes; ++p) {
    const double* src = in.data.data() + p * in.shape.height * w;
    double* dst = out.data.data() + p * os.height * os.width;
    for (std::size_t oy = 0; oy < os.height; ++oy)
      for (std::size_t ox = 0; ox < os.width; ++ox) {
        double best = src[oy * stride_ * w + ox * stride_];
        for (std::size_t ky = 0; ky < size_; ++ky)
          for (std::size_t kx = 0; kx < size_; ++kx)
            best = std::max(best, src[(oy * stride_ + ky) * w + ox * stride_ + kx]);
        dst[oy * os.width + ox] = best;
      }
  }
}

void MaxPool::backward(const Batch& in, const Batch&, const Batch& grad_out, Batch& grad_in) {
  const Shape os = output_shape(in.shape);
  grad_in = Batch(in.n, in.shape);
  const std::size_t planes = in.n * in.shape.channels;
  const std::size_t w = in.shape.width;
  for (std::size_t p = 0; p < planes; ++p) {
    const double* src = in.data.data() + p * in.shape.height * w;
    const double* go = grad_out.data.data() + p * os.height * os.width;
    double* gi = grad_in.data.data() + p * in.shape.height * w;
    for (std::size_t oy = 0; oy < os.height; ++oy)
      for (std::size_t ox = 0; ox < os.width; ++ox) {
        std::size_t best = oy * stride_ * w + ox * stride_;
        for (std::size_t ky = 0; ky < size_; ++ky)
          for (std::size_t kx = 0; kx < size_; ++kx) {
            const std::size_t idx = (oy * stride_ + ky) * w + ox * stride_ + kx;
            if (src[idx] > src[best]) best = idx;
          }
        gi[best] += go[oy * os.width + ox];
      }
  }
}

// ------------------------------------------------------------------- Dense

Dense::Dense(std::size_t in_units, std::size_t out_units) : in_units_(in_units), out_units_(out_units) {
  if (!in_units || !out_units) throw Error(ErrorCode::InvalidArchitecture, "dense units must be positive");
  weights_.assign(in_units * out_units, 0.0);
  grad_weights_.assign(weights_.size(), 0.0);
  bias_.assign(out_units, 0.0);
  grad_bias_.assign(out_units, 0.0);
}

std::string Dense::descriptor() const { return "dense:" + std::to_string(out_units_); }

Shape Dense::output_shape(const Shape& in) const {
  if (in.size() != in_units_)
    throw Error(ErrorCode::ShapeMismatch, descriptor() + " expects " + std::to_string(in_units_) +
                                              " inputs, got " + in.str());
  return {out_units_, 1, 1};
}

void Dense::forward(const Batch& in, Batch& out) {
  out = Batch(in.n, output_shape(in.shape));
  kernels::dense_forward(in.n, in_units_, out_units_, in.data, weights_, bias_, out.data);
}

void Dense::backward(const Batch& in, const Batch&, const Batch& grad_out, Batch& grad_in) {
  output_shape(in.shape);
  grad_in = Batch(in.n, in.shape);
  kernels::dense_backward(in.n, in_units_, out_units_, in.data, weights_, grad_out.data,
                          grad_weights_, grad_bias_, grad_in.data);
}

void Dense::collect(std::vector<ParamRef>& refs) {
  refs.push_back({weights_, grad_weights_, in_units_});
  refs.push_back({bias_, grad_bias_, 0});
}

// -------------------------------------------------------- ReLU and Softmax

void ReLU::forward(const Batch& in, Batch& out) {
  out = Batch(in.n, in.shape);
  for (std::size_t i = 0; i < in.data.size(); ++i) out.data[i] = std::max(0.0, in.data[i]);
}

void ReLU::backward(const Batch& in, const Batch&, const Batch& grad_out, Batch& grad_in) {
  grad_in = Batch(in.n, in.shape);
  for (std::size_t i = 0; i < in.data.size(); ++i)
    grad_in.data[i] = in.data[i] > 0.0 ? grad_out.data[i] : 0.0;
}

void Softmax::forward(const Batch& in, Batch& out) {
  out = Batch(in.n, output_shape(in.shape));
  const std::size_t k = in.shape.size();
  for (std::size_t n = 0; n < in.n; ++n) {
    const auto z = in.sample(n);
    auto p = out.sample(n);
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += (p[i] = std::exp(z[i] - mx));
    for (auto& v : p) v /= sum;
  }
}

void Softmax::backward(const Batch& in, const Batch& out, const Batch& grad_out, Batch& grad_in) {
  // dz_i = p_i (g_i - sum_j g_j p_j)
  grad_in = Batch(in.n, in.shape);
  for (std::size_t n = 0; n < in.n; ++n) {
    const auto p = out.sample(n);
    const auto g = grad_out.sample(n);
    double dotp = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) dotp += g[i] * p[i];
    auto d = grad_in.sample(n);
    for (std::size_t i = 0; i < p.size(); ++i) d[i] = p[i] * (g[i] - dotp);
  }
}

// ---------------------------------------------------------------- Residual

Residual::Residual(std::vector<std::unique_ptr<Layer>> inner, const Shape& input, bool projection)
    : inner_(std::move(inner)), input_shape_(input) {
  if (inner_.empty()) throw Error(ErrorCode::InvalidArchitecture, "empty residual block");
  Shape s = input;
  for (const auto& layer : inner_) s = layer->output_shape(s);
  if (s.height != input.height || s.width != input.width)
    throw Error(ErrorCode::ShapeMismatch, "residual branch maps " + input.str() + " to " + s.str());
  if (s.channels != input.channels) {
    if (!projection)
      throw Error(ErrorCode::ShapeMismatch, "residual branch maps " + input.str() + " to " +
                                                s.str() + " and no projection is configured");
  }
  if (projection) projection_ = std::make_unique<Conv2D>(input.channels, s.channels, 1, 1);
}

Residual::Residual(const Residual& other) : input_shape_(other.input_shape_) {
  for (const auto& layer : other.inner_) inner_.push_back(layer->clone());
  if (other.projection_) projection_ = std::make_unique<Conv2D>(*other.projection_);
}

std::string Residual::descriptor() const {
  std::string d = projection_ ? "resproj[" : "res[";
  for (std::size_t i = 0; i < inner_.size(); ++i) d += (i ? "," : "") + inner_[i]->descriptor();
  return d + "]";
}

Shape Residual::output_shape(const Shape& in) const {
  if (!(in == input_shape_))
    throw Error(ErrorCode::ShapeMismatch, descriptor() + " built for " + input_shape_.str() +
                                              ", got " + in.str());
  Shape s = in;
  for (const auto& layer : inner_) s = layer->output_shape(s);
  return s;
}

void Residual::forward(const Batch& in, Batch& out) {
  output_shape(in.shape);
  acts_.resize(inner_.size());
  for (std::size_t i = 0; i < inner_.size(); ++i)
    inner_[i]->forward(i == 0 ? in : acts_[i - 1], acts_[i]);
  out = acts_.back();
  if (projection_) {
    projection_->forward(in, shortcut_);
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += shortcut_.data[i];
  } else {
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += in.data[i];
  }
}

void Residual::backward(const Batch& in, const Batch&, const Batch& grad_out, Batch& grad_in) {
  Batch grad = grad_out;
  Batch next;
  for (std::size_t i = inner_.size(); i-- > 0;) {
    inner_[i]->backward(i == 0 ? in : acts_[i - 1], acts_[i], grad, next);
    std::swap(grad, next);
  }
  grad_in = std::move(grad);
  if (projection_) {
    Batch through;
    projection_->backward(in, shortcut_, grad_out, through);
    for (std::size_t i = 0; i < grad_in.data.size(); ++i) grad_in.data[i] += through.data[i];
  } else {
    for (std::size_t i = 0; i < grad_in.data.size(); ++i) grad_in.data[i] += grad_out.data[i];
  }
}

void Residual::collect(std::vector<ParamRef>& refs) {
  for (auto& layer : inner_) layer->collect(refs);
  if (projection_) projection_->collect(refs);
}

}  // namespace scalohar::nn
