#include "scalohar/kernels.hpp"

#include <algorithm>
#include <cstring>
#include <vector>

namespace scalohar::kernels {

namespace {

// Two-lane vector; each lane follows scalar IEEE semantics.
typedef double v2d __attribute__((vector_size(16)));

inline v2d load2(const double* p) {
  v2d v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

// Output positions o in [lo, hi) whose input index o * stride + k - pad lies in [0, extent).
struct Range {
  std::size_t lo, hi;
};

inline Range valid_range(std::size_t k, std::size_t pad, std::size_t stride, std::size_t extent,
                         std::size_t out_extent) {
  // o * stride + k >= pad  and  o * stride + k - pad <= extent - 1
  std::size_t lo = 0;
  if (pad > k) lo = (pad - k + stride - 1) / stride;
  if (extent + pad < k + 1) return {0, 0};
  std::size_t hi = (extent - 1 + pad - k) / stride + 1;
  hi = std::min(hi, out_extent);
  if (lo > hi) lo = hi;
  return {lo, hi};
}

// Column matrix of one sample: row (ci, ky, kx), column (oy, ox). Taps that
// fall into the padding are zero.
void im2col(const ConvGeometry& g, const double* in, double* col) {
  const std::size_t oh = g.out_height(), ow = g.out_width();
  const auto jobs = static_cast<long long>(g.in_channels * g.kernel_h * g.kernel_w);
#pragma omp parallel for schedule(static)
  for (long long job = 0; job < jobs; ++job) {
    const auto r = static_cast<std::size_t>(job);
    const std::size_t kx = r % g.kernel_w, ky = (r / g.kernel_w) % g.kernel_h, ci = r / (g.kernel_w * g.kernel_h);
    const double* plane = in + ci * g.in_height * g.in_width;
    double* dst = col + r * oh * ow;
    std::fill(dst, dst + oh * ow, 0.0);
    const Range ry = valid_range(ky, g.pad, g.stride, g.in_height, oh);
    const Range rx = valid_range(kx, g.pad, g.stride, g.in_width, ow);
    for (std::size_t oy = ry.lo; oy < ry.hi; ++oy) {
      const double* irow = plane + (oy * g.stride + ky - g.pad) * g.in_width;
      for (std::size_t ox = rx.lo; ox < rx.hi; ++ox) dst[oy * ow + ox] = irow[ox * g.stride + kx - g.pad];
    }
  }
}

// Adds every column entry back to its input pixel. Each job owns one input
// channel and visits its taps in row order, so sums are thread-independent.
void col2im(const ConvGeometry& g, const double* col, double* in) {
  const std::size_t oh = g.out_height(), ow = g.out_width();
  const auto jobs = static_cast<long long>(g.in_channels);
#pragma omp parallel for schedule(static)
  for (long long job = 0; job < jobs; ++job) {
    const auto ci = static_cast<std::size_t>(job);
    double* plane = in + ci * g.in_height * g.in_width;
    std::fill(plane, plane + g.in_height * g.in_width, 0.0);
    for (std::size_t ky = 0; ky < g.kernel_h; ++ky)
      for (std::size_t kx = 0; kx < g.kernel_w; ++kx) {
        const double* src = col + ((ci * g.kernel_h + ky) * g.kernel_w + kx) * oh * ow;
        const Range ry = valid_range(ky, g.pad, g.stride, g.in_height, oh);
        const Range rx = valid_range(kx, g.pad, g.stride, g.in_width, ow);
        for (std::size_t oy = ry.lo; oy < ry.hi; ++oy) {
          double* irow = plane + (oy * g.stride + ky - g.pad) * g.in_width;
          for (std::size_t ox = rx.lo; ox < rx.hi; ++ox) irow[ox * g.stride + kx - g.pad] += src[oy * ow + ox];
        }
      }
  }
}

// C[i][j] += sum_k A(i, k) B(k, j) with A(i, k) = a[i * a_row + k * a_col] and
// B(k, j) = b[k * b_row + j * b_col], k ascending for every element. 4x4
// register tiles over a packed B panel.
void gemm_acc(std::size_t m, std::size_t n, std::size_t depth, const double* a, std::size_t a_row,
              std::size_t a_col, const double* b, std::size_t b_row, std::size_t b_col, double* c,
              std::size_t ldc) {
  const auto panels = static_cast<long long>((n + 3) / 4);
#pragma omp parallel
  {
    std::vector<double> packed(depth * 4);
#pragma omp for schedule(static)
    for (long long panel = 0; panel < panels; ++panel) {
      const std::size_t j0 = static_cast<std::size_t>(panel) * 4;
      const std::size_t nr = std::min<std::size_t>(4, n - j0);
      for (std::size_t k = 0; k < depth; ++k)
        for (std::size_t j = 0; j < 4; ++j) packed[k * 4 + j] = j < nr ? b[k * b_row + (j0 + j) * b_col] : 0.0;
      std::size_t i0 = 0;
      for (; i0 + 4 <= m; i0 += 4) {
        v2d acc[4][2];
        for (std::size_t r = 0; r < 4; ++r) {
          double row[4];
          for (std::size_t j = 0; j < 4; ++j) row[j] = j < nr ? c[(i0 + r) * ldc + j0 + j] : 0.0;
          acc[r][0] = load2(row);
          acc[r][1] = load2(row + 2);
        }
        const double* a0 = a + i0 * a_row;
        for (std::size_t k = 0; k < depth; ++k) {
          const v2d b0 = load2(packed.data() + k * 4);
          const v2d b1 = load2(packed.data() + k * 4 + 2);
          const double* ak = a0 + k * a_col;
          for (std::size_t r = 0; r < 4; ++r) {
            const v2d av = {ak[r * a_row], ak[r * a_row]};
            acc[r][0] += av * b0;
            acc[r][1] += av * b1;
          }
        }
        for (std::size_t r = 0; r < 4; ++r) {
          double row[4];
          std::memcpy(row, &acc[r][0], sizeof(v2d));
          std::memcpy(row + 2, &acc[r][1], sizeof(v2d));
          for (std::size_t j = 0; j < nr; ++j) c[(i0 + r) * ldc + j0 + j] = row[j];
        }
      }
      for (; i0 < m; ++i0) {
        double acc[4];
        for (std::size_t j = 0; j < 4; ++j) acc[j] = j < nr ? c[i0 * ldc + j0 + j] : 0.0;
        for (std::size_t k = 0; k < depth; ++k) {
          const double av = a[i0 * a_row + k * a_col];
          for (std::size_t j = 0; j < 4; ++j) acc[j] += av * packed[k * 4 + j];
        }
        for (std::size_t j = 0; j < nr; ++j) c[i0 * ldc + j0 + j] = acc[j];
      }
    }
  }
}

}  // namespace

void conv2d_forward(const ConvGeometry& g, std::span<const double> input,
                    std::span<const double> weights, std::span<const double> bias,
                    std::span<double> output) {
  const std::size_t rows = g.in_channels * g.kernel_h * g.kernel_w;
  const std::size_t cols = g.out_height() * g.out_width();
  std::vector<double> col(rows * cols);
  for (std::size_t n = 0; n < g.batch; ++n) {
    im2col(g, input.data() + n * g.in_size(), col.data());
    double* out = output.data() + n * g.out_channels * cols;
    for (std::size_t co = 0; co < g.out_channels; ++co) std::fill(out + co * cols, out + (co + 1) * cols, bias[co]);
    // out[co][p] += sum_k w[co][k] col[k][p], k ascending
    gemm_acc(g.out_channels, cols, rows, weights.data(), rows, 1, col.data(), cols, 1, out, cols);
  }
}

void conv2d_forward_reference(const ConvGeometry& g, std::span<const double> input,
                              std::span<const double> weights, std::span<const double> bias,
                              std::span<double> output) {
  const std::size_t oh = g.out_height(), ow = g.out_width();
  for (std::size_t n = 0; n < g.batch; ++n)
    for (std::size_t co = 0; co < g.out_channels; ++co)
      for (std::size_t oy = 0; oy < oh; ++oy)
        for (std::size_t ox = 0; ox < ow; ++ox) {
          double acc = bias[co];
          for (std::size_t ci = 0; ci < g.in_channels; ++ci)
            for (std::size_t ky = 0; ky < g.kernel_h; ++ky)
              for (std::size_t kx = 0; kx < g.kernel_w; ++kx) {
                const long long iy = static_cast<long long>(oy * g.stride + ky) - static_cast<long long>(g.pad);
                const long long ix = static_cast<long long>(ox * g.stride + kx) - static_cast<long long>(g.pad);
                if (iy < 0 || ix < 0 || iy >= static_cast<long long>(g.in_height) ||
                    ix >= static_cast<long long>(g.in_width))
                  continue;
                acc += weights[((co * g.in_channels + ci) * g.kernel_h + ky) * g.kernel_w + kx] *
                       input[((n * g.in_channels + ci) * g.in_height + static_cast<std::size_t>(iy)) *
                                 g.in_width +
                             static_cast<std::size_t>(ix)];
              }
          output[((n * g.out_channels + co) * oh + oy) * ow + ox] = acc;
        }
}

void conv2d_backward(const ConvGeometry& g, std::span<const double> input,
                     std::span<const double> weights, std::span<const double> grad_output,
                     std::span<double> grad_weights, std::span<double> grad_bias,
                     std::span<double> grad_input) {
  const std::size_t rows = g.in_channels * g.kernel_h * g.kernel_w;
  const std::size_t cols = g.out_height() * g.out_width();
  std::vector<double> col(rows * cols), dcol(rows * cols);
  std::fill(grad_weights.begin(), grad_weights.end(), 0.0);
  std::fill(grad_bias.begin(), grad_bias.end(), 0.0);
  for (std::size_t n = 0; n < g.batch; ++n) {
    const double* go = grad_output.data() + n * g.out_channels * cols;
    im2col(g, input.data() + n * g.in_size(), col.data());
    // grad_w[co][k] += sum_p go[co][p] col[k][p]
    gemm_acc(g.out_channels, rows, cols, go, cols, 1, col.data(), 1, cols, grad_weights.data(), rows);
    for (std::size_t co = 0; co < g.out_channels; ++co) {
      double acc = 0.0;
      for (std::size_t p = 0; p < cols; ++p) acc += go[p + co * cols];
      grad_bias[co] += acc;
    }
    // dcol[k][p] = sum_co w[co][k] go[co][p]
    std::fill(dcol.begin(), dcol.end(), 0.0);
    gemm_acc(rows, cols, g.out_channels, weights.data(), 1, rows, go, cols, 1, dcol.data(), cols);
    col2im(g, dcol.data(), grad_input.data() + n * g.in_size());
  }
}

void conv2d_backward_reference(const ConvGeometry& g, std::span<const double> input,
                               std::span<const double> weights,
                               std::span<const double> grad_output,
                               std::span<double> grad_weights, std::span<double> grad_bias,
                               std::span<double> grad_input) {
  const std::size_t oh = g.out_height(), ow = g.out_width();
  std::fill(grad_weights.begin(), grad_weights.end(), 0.0);
  std::fill(grad_bias.begin(), grad_bias.end(), 0.0);
  std::fill(grad_input.begin(), grad_input.end(), 0.0);
  for (std::size_t n = 0; n < g.batch; ++n)
    for (std::size_t co = 0; co < g.out_channels; ++co)
      for (std::size_t oy = 0; oy < oh; ++oy)
        for (std::size_t ox = 0; ox < ow; ++ox) {
          const double go = grad_output[((n * g.out_channels + co) * oh + oy) * ow + ox];
          grad_bias[co] += go;
          for (std::size_t ci = 0; ci < g.in_channels; ++ci)
            for (std::size_t ky = 0; ky < g.kernel_h; ++ky)
              for (std::size_t kx = 0; kx < g.kernel_w; ++kx) {
                const long long iy = static_cast<long long>(oy * g.stride + ky) - static_cast<long long>(g.pad);
                const long long ix = static_cast<long long>(ox * g.stride + kx) - static_cast<long long>(g.pad);
                if (iy < 0 || ix < 0 || iy >= static_cast<long long>(g.in_height) ||
                    ix >= static_cast<long long>(g.in_width))
                  continue;
                const std::size_t wi = ((co * g.in_channels + ci) * g.kernel_h + ky) * g.kernel_w + kx;
                const std::size_t ii =
                    ((n * g.in_channels + ci) * g.in_height + static_cast<std::size_t>(iy)) * g.in_width +
                    static_cast<std::size_t>(ix);
                grad_weights[wi] += go * input[ii];
                grad_input[ii] += go * weights[wi];
              }
        }
}

void dense_forward(std::size_t batch, std::size_t in_units, std::size_t out_units,
                   std::span<const double> input, std::span<const double> weights,
                   std::span<const double> bias, std::span<double> output) {
  for (std::size_t n = 0; n < batch; ++n) std::copy(bias.begin(), bias.end(), output.begin() + n * out_units);
  // out[n][o] += sum_i in[n][i] w[o][i]
  gemm_acc(batch, out_units, in_units, input.data(), in_units, 1, weights.data(), 1, in_units, output.data(),
           out_units);
}

void dense_forward_reference(std::size_t batch, std::size_t in_units, std::size_t out_units,
                             std::span<const double> input, std::span<const double> weights,
                             std::span<const double> bias, std::span<double> output) {
  for (std::size_t n = 0; n < batch; ++n)
    for (std::size_t o = 0; o < out_units; ++o) {
      double acc = bias[o];
      for (std::size_t i = 0; i < in_units; ++i) acc += weights[o * in_units + i] * input[n * in_units + i];
      output[n * out_units + o] = acc;
    }
}

void dense_backward(std::size_t batch, std::size_t in_units, std::size_t out_units,
                    std::span<const double> input, std::span<const double> weights,
                    std::span<const double> grad_output, std::span<double> grad_weights,
                    std::span<double> grad_bias, std::span<double> grad_input) {
  std::fill(grad_weights.begin(), grad_weights.end(), 0.0);
  std::fill(grad_input.begin(), grad_input.end(), 0.0);
  for (std::size_t o = 0; o < out_units; ++o) {
    double acc = 0.0;
    for (std::size_t n = 0; n < batch; ++n) acc += grad_output[n * out_units + o];
    grad_bias[o] = acc;
  }
  // grad_w[o][i] = sum_n go[n][o] in[n][i]
  gemm_acc(out_units, in_units, batch, grad_output.data(), 1, out_units, input.data(), in_units, 1,
           grad_weights.data(), in_units);
  // grad_in[n][i] = sum_o go[n][o] w[o][i]
  gemm_acc(batch, in_units, out_units, grad_output.data(), out_units, 1, weights.data(), in_units, 1,
           grad_input.data(), in_units);
}

void dense_backward_reference(std::size_t batch, std::size_t in_units, std::size_t out_units,
                              std::span<const double> input, std::span<const double> weights,
                              std::span<const double> grad_output,
                              std::span<double> grad_weights, std::span<double> grad_bias,
                              std::span<double> grad_input) {
  std::fill(grad_weights.begin(), grad_weights.end(), 0.0);
  std::fill(grad_bias.begin(), grad_bias.end(), 0.0);
  std::fill(grad_input.begin(), grad_input.end(), 0.0);
  for (std::size_t n = 0; n < batch; ++n)
    for (std::size_t o = 0; o < out_units; ++o) {
      const double go = grad_output[n * out_units + o];
      grad_bias[o] += go;
      for (std::size_t i = 0; i < in_units; ++i) {
        grad_weights[o * in_units + i] += go * input[n * in_units + i];
        grad_input[n * in_units + i] += go * weights[o * in_units + i];
      }
    }
}

}  // namespace scalohar::kernels
