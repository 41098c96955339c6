// Serial reference kernels against the OpenMP ones, and the three CWT paths.
#include <benchmark/benchmark.h>

#include <vector>

#include "scalohar/kernels.hpp"
#include "scalohar/rng.hpp"
#include "scalohar/transform.hpp"

using namespace scalohar;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

// First conv of paper-initial on a 3x32x64 image, batch 35.
kernels::ConvGeometry conv_geometry() {
  kernels::ConvGeometry g;
  g.batch = 35;
  g.in_channels = 3;
  g.in_height = 32;
  g.in_width = 64;
  g.out_channels = 32;
  g.kernel_h = g.kernel_w = 5;
  return g;
}

template <bool Reference>
void BM_ConvForward(benchmark::State& state) {
  const auto g = conv_geometry();
  const auto in = random_vec(g.batch * g.in_size(), 1), w = random_vec(g.weight_count(), 2),
             b = random_vec(g.out_channels, 3);
  std::vector<double> out(g.batch * g.out_size());
  for (auto _ : state) {
    if constexpr (Reference)
      kernels::conv2d_forward_reference(g, in, w, b, out);
    else
      kernels::conv2d_forward(g, in, w, b, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Reference>
void BM_ConvBackward(benchmark::State& state) {
  const auto g = conv_geometry();
  const auto in = random_vec(g.batch * g.in_size(), 1), w = random_vec(g.weight_count(), 2),
             go = random_vec(g.batch * g.out_size(), 3);
  std::vector<double> gw(g.weight_count()), gb(g.out_channels), gi(g.batch * g.in_size());
  for (auto _ : state) {
    if constexpr (Reference)
      kernels::conv2d_backward_reference(g, in, w, go, gw, gb, gi);
    else
      kernels::conv2d_backward(g, in, w, go, gw, gb, gi);
    benchmark::DoNotOptimize(gi.data());
  }
}

// Hidden dense layer of paper-initial: 64x5x13 flattened into 1000 units.
constexpr std::size_t kBatch = 35, kIn = 64 * 5 * 13, kOut = 1000;

template <bool Reference>
void BM_DenseForward(benchmark::State& state) {
  const auto in = random_vec(kBatch * kIn, 1), w = random_vec(kIn * kOut, 2), b = random_vec(kOut, 3);
  std::vector<double> out(kBatch * kOut);
  for (auto _ : state) {
    if constexpr (Reference)
      kernels::dense_forward_reference(kBatch, kIn, kOut, in, w, b, out);
    else
      kernels::dense_forward(kBatch, kIn, kOut, in, w, b, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Reference>
void BM_DenseBackward(benchmark::State& state) {
  const auto in = random_vec(kBatch * kIn, 1), w = random_vec(kIn * kOut, 2), go = random_vec(kBatch * kOut, 3);
  std::vector<double> gw(kIn * kOut), gb(kOut), gi(kBatch * kIn);
  for (auto _ : state) {
    if constexpr (Reference)
      kernels::dense_backward_reference(kBatch, kIn, kOut, in, w, go, gw, gb, gi);
    else
      kernels::dense_backward(kBatch, kIn, kOut, in, w, go, gw, gb, gi);
    benchmark::DoNotOptimize(gi.data());
  }
}

Signal window(std::size_t n, std::uint64_t seed) { return Signal::make(random_vec(n, seed), 50.0); }

void BM_CwtDirect(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto s = window(n, 4);
  const auto grid = default_scale_grid(n);
  for (auto _ : state) benchmark::DoNotOptimize(cwt(s, MotherWavelet::mexican_hat(), grid, CwtStrategy::Direct));
}

void BM_CwtFft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto s = window(n, 4);
  const auto grid = default_scale_grid(n);
  for (auto _ : state) benchmark::DoNotOptimize(cwt(s, MotherWavelet::mexican_hat(), grid, CwtStrategy::Fft));
}

// 64 windows per iteration through the parallel batch entry point.
void BM_CwtBatch(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<Signal> signals;
  for (std::uint64_t i = 0; i < 64; ++i) signals.push_back(window(n, 10 + i));
  const auto grid = default_scale_grid(n);
  for (auto _ : state) benchmark::DoNotOptimize(cwt_batch(signals, MotherWavelet::mexican_hat(), grid));
}

}  // namespace

BENCHMARK(BM_ConvForward<true>)->Name("conv_forward/reference")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvForward<false>)->Name("conv_forward/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvBackward<true>)->Name("conv_backward/reference")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvBackward<false>)->Name("conv_backward/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DenseForward<true>)->Name("dense_forward/reference")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DenseForward<false>)->Name("dense_forward/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DenseBackward<true>)->Name("dense_backward/reference")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DenseBackward<false>)->Name("dense_backward/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CwtDirect)->Name("cwt/direct")->Arg(151)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CwtFft)->Name("cwt/fft")->Arg(151)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CwtBatch)->Name("cwt/batch64")->Arg(151)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
