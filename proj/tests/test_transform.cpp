#include <cmath>
#include <numbers>

#include "scalohar/fft.hpp"
#include "scalohar/rng.hpp"
#include "scalohar/transform.hpp"
#include "test_util.hpp"

using namespace scalohar;

namespace {

const double kPi = std::numbers::pi;

Signal random_signal(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return Signal::make(v, 50);
}

// Brute-force zero-padded CWT: full sum, no support cut, trapezoid end weights.
std::vector<std::complex<double>> cwt_oracle(const Signal& s, const MotherWavelet& w, const ScaleGrid& g) {
  const std::size_t n = s.size();
  std::vector<std::complex<double>> out(g.scales.size() * n);
  for (std::size_t j = 0; j < g.scales.size(); ++j) {
    const double a = g.scales[j];
    for (std::size_t b = 0; b < n; ++b) {
      std::complex<double> acc = 0;
      for (std::size_t t = 0; t < n; ++t) {
        const double wt = (t == 0 || t + 1 == n) ? 0.5 : 1.0;
        acc += wt * s.samples[t] * std::conj(w.evaluate((double(t) - double(b)) / a));
      }
      out[j * n + b] = acc / std::sqrt(a);
    }
  }
  return out;
}

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST(ScaleGrid, Examples) {
  EXPECT_EQ(build_scale_grid(2, 1, 3).scales, (std::vector<double>{2, 4, 8}));
  EXPECT_EQ(build_scale_grid(3.5, 0.25, 1).scales, std::vector<double>{3.5});
  EXPECT_SH_ERROR(build_scale_grid(0, 0.25, 4), InvalidScale);
  EXPECT_SH_ERROR(build_scale_grid(2, 0, 4), InvalidScale);
  EXPECT_SH_ERROR(build_scale_grid(2, 0.25, 0), InvalidScale);
}

TEST(ScaleGrid, DefaultFitsHalfWindow) {
  for (std::size_t n : {4, 8, 64, 151, 1000}) {
    const auto g = default_scale_grid(n);
    EXPECT_EQ(g.a0, 2.0);
    EXPECT_EQ(g.dj, 0.25);
    if (n / 2.0 >= 2.0) {
      EXPECT_LE(g.scales.back(), n / 2.0 + 1e-9) << n;
      EXPECT_GT(g.scales.back() * std::exp2(0.25), n / 2.0) << n;
    }
  }
  EXPECT_EQ(default_scale_grid(151).scales.size(), 21u);
}

TEST(ScaleGrid, Spanning) {
  const auto g = scale_grid_spanning(2, 32, 5);
  EXPECT_NEAR(g.scales.back(), 32, 1e-12);
  EXPECT_NEAR(g.scales[2], 8, 1e-12);
}

TEST(Cwt, ZeroSignal) {
  const auto s = Signal::make(std::vector<double>(40, 0.0), 50);
  const auto g = build_scale_grid(2, 0.5, 6);
  for (auto strat : {CwtStrategy::Direct, CwtStrategy::Fft})
    for (const auto& w : {MotherWavelet::mexican_hat(), MotherWavelet::morlet(), MotherWavelet::paul()})
      EXPECT_EQ(max_abs(cwt(s, w, g, strat).coefficients), 0.0);
}

TEST(Cwt, MatchesBruteForceOracle) {
  Rng rng(3);
  const auto g = build_scale_grid(1.5, 0.5, 8);
  for (const auto& w : {MotherWavelet::dog(1), MotherWavelet::mexican_hat(), MotherWavelet::morlet(), MotherWavelet::paul(4)}) {
    const auto s = random_signal(rng, 37);
    const auto oracle = cwt_oracle(s, w, g);
    double scale = 0;
    for (auto c : oracle) scale = std::max(scale, std::abs(c));
    for (auto strat : {CwtStrategy::Direct, CwtStrategy::Fft}) {
      const auto got = cwt_complex(s, w, g, strat);
      double err = 0;
      for (std::size_t i = 0; i < got.size(); ++i) err = std::max(err, std::abs(got[i] - oracle[i]));
      EXPECT_LT(err, 1e-9 * scale) << w.selector();
    }
  }
}

TEST(Cwt, FftMatchesDirectRandomized) {
  Rng rng(21);
  const std::vector<MotherWavelet> ws{MotherWavelet::mexican_hat(), MotherWavelet::dog(3), MotherWavelet::morlet(),
                                      MotherWavelet::paul(4), MotherWavelet::paul(2)};
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 8 + rng.below(249);
    const auto s = random_signal(rng, n);
    const auto g = default_scale_grid(n);
    const auto& w = ws[trial % ws.size()];
    for (auto boundary : {Boundary::ZeroPad, Boundary::Periodic}) {
      const auto d = cwt(s, w, g, CwtStrategy::Direct, boundary).coefficients;
      const auto f = cwt(s, w, g, CwtStrategy::Fft, boundary).coefficients;
      double err = 0;
      for (std::size_t i = 0; i < d.size(); ++i) err = std::max(err, std::abs(d[i] - f[i]));
      EXPECT_LT(err, 1e-6 * max_abs(d)) << w.selector() << " n=" << n;
    }
  }
}

TEST(Cwt, Homogeneity) {
  Rng rng(4);
  const auto s = random_signal(rng, 64);
  auto v = s.samples;
  for (auto& x : v) x *= 2.5;
  const auto g = default_scale_grid(64);
  const auto w = MotherWavelet::mexican_hat();
  const auto a = cwt(s, w, g).coefficients;
  const auto b = cwt(Signal::make(v, 50), w, g).coefficients;
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b[i], 2.5 * a[i], 1e-12 * (1 + std::abs(b[i])));
}

TEST(Cwt, Linearity) {
  Rng rng(6);
  const auto s1 = random_signal(rng, 90), s2 = random_signal(rng, 90);
  const double alpha = 1.7, beta = -0.6;
  std::vector<double> mix(90);
  for (std::size_t i = 0; i < 90; ++i) mix[i] = alpha * s1.samples[i] + beta * s2.samples[i];
  const auto g = default_scale_grid(90);
  for (int m : {1, 2, 4}) {
    const auto w = MotherWavelet::dog(m);
    for (auto strat : {CwtStrategy::Direct, CwtStrategy::Fft}) {
      const auto c1 = cwt(s1, w, g, strat).coefficients, c2 = cwt(s2, w, g, strat).coefficients;
      const auto cm = cwt(Signal::make(mix, 50), w, g, strat).coefficients;
      for (std::size_t i = 0; i < cm.size(); ++i) EXPECT_NEAR(cm[i], alpha * c1[i] + beta * c2[i], 1e-9);
    }
  }
}

TEST(Cwt, CircularShiftCovariance) {
  Rng rng(9);
  const std::size_t n = 60;
  const auto s = random_signal(rng, n);
  const auto g = build_scale_grid(2, 0.5, 7);
  for (const auto& w : {MotherWavelet::mexican_hat(), MotherWavelet::morlet()}) {
    for (auto strat : {CwtStrategy::Direct, CwtStrategy::Fft}) {
      const auto base = cwt(s, w, g, strat, Boundary::Periodic);
      for (std::size_t k : {1u, 7u, 33u}) {
        std::vector<double> shifted(n);
        for (std::size_t t = 0; t < n; ++t) shifted[(t + k) % n] = s.samples[t];
        const auto sh = cwt(Signal::make(shifted, 50), w, g, strat, Boundary::Periodic);
        for (std::size_t j = 0; j < g.scales.size(); ++j)
          for (std::size_t b = 0; b < n; ++b) EXPECT_NEAR(sh.at(j, (b + k) % n), base.at(j, b), 1e-10);
      }
    }
  }
}

TEST(Cwt, SinePeaksAtItsFourierPeriod) {
  const double f = 2.0, rate = 50.0;
  std::vector<double> v(512);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(2 * kPi * f * double(i) / rate);
  const auto s = Signal::make(v, rate);
  const auto w = MotherWavelet::mexican_hat();
  const auto g = build_scale_grid(2, 0.125, 30);
  const auto sc = cwt(s, w, g, CwtStrategy::Direct);
  // Brute-force scan of mean row energy away from the edges.
  std::size_t best = 0;
  double best_e = -1;
  for (std::size_t j = 0; j < sc.n_scales; ++j) {
    double e = 0;
    for (std::size_t b = 100; b < 412; ++b) e += sc.at(j, b) * sc.at(j, b);
    if (e > best_e) {
      best_e = e;
      best = j;
    }
  }
  const auto periods = fourier_periods(g, w, rate);
  std::size_t nearest = 0;
  for (std::size_t j = 0; j < periods.size(); ++j)
    if (std::abs(std::log(periods[j] * f)) < std::abs(std::log(periods[nearest] * f))) nearest = j;
  EXPECT_LE(std::abs(double(best) - double(nearest)), 1.0);
}

TEST(Cwt, ModulusForComplexSignedForReal) {
  Rng rng(10);
  const auto s = random_signal(rng, 50);
  const auto g = build_scale_grid(2, 0.5, 5);
  const auto mexh = cwt(s, MotherWavelet::mexican_hat(), g);
  const auto mc = cwt_complex(s, MotherWavelet::mexican_hat(), g, CwtStrategy::Fft);
  bool negative = false;
  for (std::size_t i = 0; i < mc.size(); ++i) {
    EXPECT_EQ(mexh.coefficients[i], mc[i].real());
    negative |= mexh.coefficients[i] < 0;
  }
  EXPECT_TRUE(negative);
  const auto mor = cwt(s, MotherWavelet::morlet(), g);
  const auto oc = cwt_complex(s, MotherWavelet::morlet(), g, CwtStrategy::Fft);
  for (std::size_t i = 0; i < oc.size(); ++i) EXPECT_EQ(mor.coefficients[i], std::abs(oc[i]));
}

TEST(Cwt, BatchEqualsSingle) {
  Rng rng(12);
  std::vector<Signal> sigs;
  for (int i = 0; i < 9; ++i) sigs.push_back(random_signal(rng, 64));
  const auto g = default_scale_grid(64);
  const auto batch = cwt_batch(sigs, MotherWavelet::paul(), g);
  ASSERT_EQ(batch.size(), sigs.size());
  for (std::size_t i = 0; i < sigs.size(); ++i)
    EXPECT_EQ(batch[i].coefficients, cwt(sigs[i], MotherWavelet::paul(), g).coefficients);
}

TEST(Cwt, InputChecks) {
  const auto s = Signal::make(std::vector<double>(10, 1.0), 50);
  EXPECT_SH_ERROR(cwt(s, MotherWavelet::mexican_hat(), build_scale_grid(64, 1, 1)), ScaleTooLarge);
  EXPECT_SH_ERROR(cwt(Signal::make({1.0}, 50), MotherWavelet::mexican_hat(), build_scale_grid(1, 1, 1)),
                  InvalidArgument);
}

TEST(Dft, ConstantAndCosine) {
  const std::size_t n = 24;
  const auto c = dft_magnitude(std::vector<double>(n, 1.5));
  EXPECT_NEAR(c[0], n * 1.5, 1e-12);
  for (std::size_t k = 1; k < c.size(); ++k) EXPECT_NEAR(c[k], 0.0, 1e-12);
  std::vector<double> v(n);
  for (std::size_t t = 0; t < n; ++t) v[t] = std::cos(2 * kPi * 5 * double(t) / double(n));
  const auto m = dft_magnitude(v);
  for (std::size_t k = 0; k < m.size(); ++k) EXPECT_NEAR(m[k], k == 5 ? n / 2.0 : 0.0, 1e-10) << k;
}

TEST(Dft, Parseval) {
  Rng rng(13);
  for (std::size_t n : {7u, 16u, 100u, 151u, 256u}) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    const auto spec = dft(v);
    double time = 0, freq = 0;
    for (double x : v) time += x * x;
    for (auto z : spec) freq += std::norm(z);
    EXPECT_NEAR(time, freq / double(n), 1e-6 * time);
  }
}

TEST(Dft, MatchesDirectSummation) {
  Rng rng(14);
  for (std::size_t n : {5u, 12u, 64u, 97u}) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    const auto spec = dft(v);
    for (std::size_t k = 0; k < n; ++k) {
      std::complex<double> acc = 0;
      for (std::size_t t = 0; t < n; ++t) acc += v[t] * std::polar(1.0, -2 * kPi * double(k * t % n) / double(n));
      EXPECT_NEAR(std::abs(spec[k] - acc), 0.0, 1e-9);
    }
    const auto back = idft(spec);
    for (std::size_t t = 0; t < n; ++t) EXPECT_NEAR(back[t].real(), v[t], 1e-12);
  }
}

TEST(Stft, ZeroSignal) {
  const auto sg = stft(Signal::make(std::vector<double>(64, 0.0), 50), 16, 8);
  EXPECT_EQ(max_abs(sg.magnitudes), 0.0);
  EXPECT_EQ(sg.n_hops, 7u);
  EXPECT_EQ(sg.n_freqs, 9u);
}

TEST(Stft, ToneBin) {
  const double rate = 64, f = 8;
  const std::size_t win = 32;
  std::vector<double> v(256);
  for (std::size_t t = 0; t < v.size(); ++t) v[t] = std::sin(2 * kPi * f * double(t) / rate + 0.3);
  const auto sg = stft(Signal::make(v, rate), win, 16, WindowKind::Rect);
  const std::size_t expect = static_cast<std::size_t>(f * win / rate);
  // Direct summation at the expected bin of the first frame.
  std::complex<double> acc = 0;
  for (std::size_t t = 0; t < win; ++t) acc += v[t] * std::polar(1.0, -2 * kPi * double(expect * t) / double(win));
  EXPECT_NEAR(sg.at(expect, 0), std::abs(acc), 1e-9);
  for (std::size_t h = 0; h < sg.n_hops; ++h) {
    std::size_t arg = 0;
    for (std::size_t k = 1; k < sg.n_freqs; ++k)
      if (sg.at(k, h) > sg.at(arg, h)) arg = k;
    EXPECT_EQ(arg, expect) << h;
  }
}

TEST(Stft, FullWindowIsWindowedDft) {
  Rng rng(15);
  const auto s = random_signal(rng, 40);
  const auto sg = stft(s, 40, 40);
  ASSERT_EQ(sg.n_hops, 1u);
  const auto win = make_window(WindowKind::Hann, 40);
  std::vector<double> w(40);
  for (std::size_t i = 0; i < 40; ++i) w[i] = s.samples[i] * win[i];
  const auto m = dft_magnitude(w);
  for (std::size_t k = 0; k < m.size(); ++k) EXPECT_EQ(sg.at(k, 0), m[k]);
}

TEST(Stft, HannWindow) {
  const auto w = make_window(WindowKind::Hann, 8);
  EXPECT_EQ(w[0], 0.0);
  EXPECT_NEAR(w[4], 1.0, 1e-15);
  EXPECT_NEAR(w[2], 0.5, 1e-15);
  EXPECT_SH_ERROR(stft(Signal::make({1, 2, 3}, 1), 4, 2), InvalidArgument);
}

TEST(Stft, UncertaintyMonotone) {
  // Long Gaussian-enveloped tone; the window limits both resolutions.
  const std::size_t n = 2048;
  std::vector<double> v(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double u = (double(t) - n / 2.0) / 96.0;
    v[t] = std::exp(-u * u / 2) * std::cos(2 * kPi * 0.2 * double(t));
  }
  const auto s = Signal::make(v, 1.0);
  double prev_dt = 0, prev_df = 1e9;
  for (std::size_t win : {32u, 64u, 128u}) {
    const auto sg = stft(s, win, win / 8);
    double p = 0, mt = 0, mf = 0;
    for (std::size_t k = 0; k < sg.n_freqs; ++k)
      for (std::size_t h = 0; h < sg.n_hops; ++h) {
        const double e = sg.at(k, h) * sg.at(k, h);
        p += e;
        mt += e * (double(h * sg.hop) + win / 2.0);
        mf += e * double(k) / double(win);
      }
    mt /= p;
    mf /= p;
    double vt = 0, vf = 0;
    for (std::size_t k = 0; k < sg.n_freqs; ++k)
      for (std::size_t h = 0; h < sg.n_hops; ++h) {
        const double e = sg.at(k, h) * sg.at(k, h);
        const double dt = double(h * sg.hop) + win / 2.0 - mt, df = double(k) / double(win) - mf;
        vt += e * dt * dt;
        vf += e * df * df;
      }
    const double st = std::sqrt(vt / p), sf = std::sqrt(vf / p);
    EXPECT_GT(st, prev_dt) << win;
    EXPECT_LT(sf, prev_df) << win;
    prev_dt = st;
    prev_df = sf;
  }
}

TEST(FourierSeries, Basics) {
  const std::size_t n = 2001;
  std::vector<double> c(n), s(n), k(n, 3.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = -kPi + 2 * kPi * double(i) / double(n - 1);
    c[i] = std::cos(t);
    s[i] = std::sin(t);
  }
  const auto fc = fourier_series_coeffs(c, 4);
  EXPECT_NEAR(fc.a[0], 1.0, 1e-3);
  EXPECT_NEAR(fc.a0, 0.0, 1e-3);
  for (std::size_t j = 1; j < 4; ++j) EXPECT_NEAR(fc.a[j], 0.0, 1e-3);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(fc.b[j], 0.0, 1e-3);
  const auto fs = fourier_series_coeffs(s, 3);
  EXPECT_NEAR(fs.b[0], 1.0, 1e-3);
  EXPECT_NEAR(fs.a[0], 0.0, 1e-3);
  EXPECT_NEAR(fourier_series_coeffs(k, 2).a0, 6.0, 1e-3);
}

TEST(GeneralizedFourier, Projections) {
  const std::vector<double> p0{0, .5, .5, .5, .5, 0}, p1{0, .5, -.5, .5, -.5, 0};
  const std::vector<std::vector<double>> basis{p0, p1};
  const auto c0 = generalized_fourier_coeffs(p0, basis);
  EXPECT_NEAR(c0[0], 1.0, 1e-12);
  EXPECT_NEAR(c0[1], 0.0, 1e-12);
  const auto c1 = generalized_fourier_coeffs(std::vector<double>{0, 1, 1, -1, -1, 0}, basis);
  EXPECT_NEAR(c1[0], 0.0, 1e-12);
  EXPECT_NEAR(c1[1], 0.0, 1e-12);
  std::vector<double> mix(6);
  for (std::size_t i = 0; i < 6; ++i) mix[i] = 2 * p0[i] - 3 * p1[i];
  const auto c2 = generalized_fourier_coeffs(mix, basis);
  EXPECT_NEAR(c2[0], 2.0, 1e-12);
  EXPECT_NEAR(c2[1], -3.0, 1e-12);
}

TEST(GeneralizedFourier, BasisChecks) {
  const std::vector<double> s{1, 2, 3};
  EXPECT_SH_ERROR(generalized_fourier_coeffs(s, {{0, 1, 0}, {0, 1, 1}}), BasisNotOrthogonal);
  EXPECT_SH_ERROR(generalized_fourier_coeffs(s, {{0, 0, 0}}), BasisNotOrthogonal);
  EXPECT_SH_ERROR(generalized_fourier_coeffs(s, {{0, 1}}), DimensionMismatch);
  EXPECT_NEAR(trapezoid_dot(std::vector<double>{1, 1, 1}, std::vector<double>{2, 2, 2}), 4.0, 1e-15);
}
