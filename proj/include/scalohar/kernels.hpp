#pragma once

#include <cstddef>
#include <span>

// Hot loops of the network. Every kernel has a plain serial *_reference
// version that follows the defining formula and an OpenMP version that is
// used in training (im2col plus a register-blocked GEMM). Each output element
// of the parallel kernels is owned by one thread and accumulated in a fixed
// order, so results do not depend on the thread count.
namespace scalohar::kernels {

struct ConvGeometry {
  std::size_t batch = 1;
  std::size_t in_channels = 1, in_height = 1, in_width = 1;
  std::size_t out_channels = 1;
  std::size_t kernel_h = 1, kernel_w = 1;
  std::size_t stride = 1, pad = 0;

  std::size_t out_height() const { return (in_height + 2 * pad - kernel_h) / stride + 1; }
  std::size_t out_width() const { return (in_width + 2 * pad - kernel_w) / stride + 1; }
  std::size_t in_size() const { return in_channels * in_height * in_width; }
  std::size_t out_size() const { return out_channels * out_height() * out_width(); }
  std::size_t weight_count() const { return out_channels * in_channels * kernel_h * kernel_w; }
};

/// Valid cross-correlation with zero padding `pad`.
/// weights: [out][in][kh][kw], bias: [out]; tensors are NCHW.
void conv2d_forward(const ConvGeometry& g, std::span<const double> input,
                    std::span<const double> weights, std::span<const double> bias,
                    std::span<double> output);
void conv2d_forward_reference(const ConvGeometry& g, std::span<const double> input,
                              std::span<const double> weights, std::span<const double> bias,
                              std::span<double> output);

/// Overwrites grad_weights, grad_bias and grad_input.
void conv2d_backward(const ConvGeometry& g, std::span<const double> input,
                     std::span<const double> weights, std::span<const double> grad_output,
                     std::span<double> grad_weights, std::span<double> grad_bias,
                     std::span<double> grad_input);
void conv2d_backward_reference(const ConvGeometry& g, std::span<const double> input,
                               std::span<const double> weights,
                               std::span<const double> grad_output,
                               std::span<double> grad_weights, std::span<double> grad_bias,
                               std::span<double> grad_input);

/// output[n][o] = bias[o] + sum_i weights[o][i] * input[n][i]
void dense_forward(std::size_t batch, std::size_t in_units, std::size_t out_units,
                   std::span<const double> input, std::span<const double> weights,
                   std::span<const double> bias, std::span<double> output);
void dense_forward_reference(std::size_t batch, std::size_t in_units, std::size_t out_units,
                             std::span<const double> input, std::span<const double> weights,
                             std::span<const double> bias, std::span<double> output);

void dense_backward(std::size_t batch, std::size_t in_units, std::size_t out_units,
                    std::span<const double> input, std::span<const double> weights,
                    std::span<const double> grad_output, std::span<double> grad_weights,
                    std::span<double> grad_bias, std::span<double> grad_input);
void dense_backward_reference(std::size_t batch, std::size_t in_units, std::size_t out_units,
                              std::span<const double> input, std::span<const double> weights,
                              std::span<const double> grad_output,
                              std::span<double> grad_weights, std::span<double> grad_bias,
                              std::span<double> grad_input);

}  // namespace scalohar::kernels
