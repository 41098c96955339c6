#include <cmath>

#include "scalohar/rng.hpp"
#include "scalohar/scalogram_image.hpp"
#include "test_util.hpp"

using namespace scalohar;

namespace {

Scalogram matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  Scalogram sc;
  sc.n_scales = rows;
  sc.n_times = cols;
  sc.coefficients = std::move(values);
  return sc;
}

ImagePlane plane(std::size_t h, std::size_t w, float fill = 0.0f, Provenance p = {"x", "mexh"}) {
  return ImagePlane{h, w, std::vector<float>(h * w, fill), p};
}

ImageTensor random_tensor(Rng& rng, std::size_t c, std::size_t h, std::size_t w) {
  std::vector<ImagePlane> planes;
  for (std::size_t k = 0; k < c; ++k) {
    auto p = plane(h, w, 0, {std::string(1, "xyz"[k % 3]), k < 3 ? "mexh" : "paul"});
    for (auto& v : p.pixels) v = static_cast<float>(rng.uniform());
    planes.push_back(p);
  }
  auto t = stack_channels(planes);
  t.id = "t";
  return t;
}

}  // namespace

TEST(Grayscale, MinMaxExample) {
  const auto p = to_grayscale(matrix(2, 2, {0, 1, 2, 4}), GrayMode::MinMax);
  EXPECT_EQ(p.pixels, (std::vector<float>{0, 0.25f, 0.5f, 1}));
}

TEST(Grayscale, AbsMaxExample) {
  const auto p = to_grayscale(matrix(2, 2, {-2, 0, 1, 2}), GrayMode::AbsMax);
  EXPECT_EQ(p.pixels, (std::vector<float>{0, 0.5f, 0.75f, 1}));
}

TEST(Grayscale, ConstantIsHalf) {
  for (auto mode : {GrayMode::MinMax, GrayMode::AbsMax}) {
    for (double c : {0.0, 3.0, -1.5}) {
      const auto p = to_grayscale(matrix(3, 2, std::vector<double>(6, c)), mode);
      for (float v : p.pixels) EXPECT_EQ(v, 0.5f);
    }
  }
}

TEST(Grayscale, Monotone) {
  Rng rng(31);
  std::vector<double> v(200);
  for (auto& x : v) x = rng.normal() * 10;
  for (auto mode : {GrayMode::MinMax, GrayMode::AbsMax}) {
    const auto p = to_grayscale(matrix(10, 20, v), mode);
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j)
        if (v[i] < v[j]) {
          EXPECT_LE(p.pixels[i], p.pixels[j]);
        }
    for (float x : p.pixels) {
      EXPECT_GE(x, 0.0f);
      EXPECT_LE(x, 1.0f);
    }
  }
}

TEST(Grayscale, DefaultModes) {
  EXPECT_EQ(default_gray_mode(MotherWavelet::mexican_hat()), GrayMode::AbsMax);
  EXPECT_EQ(default_gray_mode(MotherWavelet::morlet()), GrayMode::MinMax);
  EXPECT_EQ(default_gray_mode(MotherWavelet::paul()), GrayMode::MinMax);
}

TEST(Stack, ChannelCounts) {
  std::vector<ImagePlane> three{plane(64, 151), plane(64, 151), plane(64, 151)};
  EXPECT_EQ(stack_channels(three).n_channels(), 3u);
  std::vector<ImagePlane> six;
  for (const char* w : {"mexh", "paul"})
    for (const char* a : {"x", "y", "z"}) six.push_back(plane(64, 151, 0, {a, w}));
  const auto t = stack_channels(six);
  EXPECT_EQ(t.n_channels(), 6u);
  EXPECT_EQ(t.channels[4].provenance, (Provenance{"y", "paul"}));
  EXPECT_SH_ERROR(stack_channels({plane(64, 151), plane(64, 150)}), DimensionMismatch);
  EXPECT_SH_ERROR(stack_channels({}), DimensionMismatch);
}

TEST(Crops, Examples) {
  const auto img = stack_channels({plane(2, 10)});
  const auto c = sliding_crops(img, {6, 2});
  ASSERT_EQ(c.size(), 3u);
  for (const auto& x : c) EXPECT_EQ(x.width(), 6u);
  const auto centered = sliding_crops(img, {6, 0});
  ASSERT_EQ(centered.size(), 1u);
  EXPECT_SH_ERROR(sliding_crops(img, {11, 1}), CropTooWide);
  EXPECT_SH_ERROR(sliding_crops(img, {0, 1}), InvalidArgument);
}

TEST(Crops, OffsetsAreExactColumns) {
  Rng rng(41);
  const auto img = random_tensor(rng, 2, 3, 10);
  const auto c = sliding_crops(img, {6, 2});
  for (std::size_t k = 0; k < c.size(); ++k)
    for (std::size_t ch = 0; ch < 2; ++ch)
      for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t x = 0; x < 6; ++x) EXPECT_EQ(c[k].channels[ch].at(r, x), img.channels[ch].at(r, x + 2 * k));
  const auto centered = sliding_crops(img, {6, 0}).front();
  EXPECT_EQ(centered.channels[0].at(1, 0), img.channels[0].at(1, 2));
  EXPECT_EQ(centered.channels[1].provenance, img.channels[1].provenance);
}

TEST(Crops, ClosedFormCountProperty) {
  Rng rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t w = 1 + rng.below(60), cw = 1 + rng.below(w), s = 1 + rng.below(12);
    const auto img = random_tensor(rng, 1, 2, w);
    const auto crops = sliding_crops(img, {cw, s});
    ASSERT_EQ(crops.size(), (w - cw) / s + 1);
    for (std::size_t k = 0; k < crops.size(); ++k) {
      EXPECT_EQ(crops[k].width(), cw);
      EXPECT_EQ(crops[k].channels[0].at(1, 0), img.channels[0].at(1, k * s));
    }
  }
}

TEST(Bands, Split) {
  Rng rng(43);
  const auto img = random_tensor(rng, 3, 64, 151);
  const auto halves = split_bands(img, 2);
  ASSERT_EQ(halves.size(), 2u);
  EXPECT_EQ(halves[0].height(), 32u);
  EXPECT_EQ(halves[1].width(), 151u);
  EXPECT_EQ(halves[1].channels[2].at(0, 5), img.channels[2].at(32, 5));
  const auto one = split_bands(img, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].channels[1].pixels, img.channels[1].pixels);
  EXPECT_SH_ERROR(split_bands(img, 3), NotDivisible);
}

TEST(Resize, Examples) {
  Rng rng(44);
  const auto img = random_tensor(rng, 2, 7, 9);
  const auto same = resize(img, 7, 9);
  EXPECT_EQ(same.channels[0].pixels, img.channels[0].pixels);
  auto checker = stack_channels({ImagePlane{2, 2, {0, 1, 1, 0}, {"x", "mexh"}}});
  EXPECT_EQ(resize(checker, 1, 1).channels[0].pixels, std::vector<float>{0.5f});
  const auto flat = stack_channels({plane(5, 6, 0.3f)});
  const auto round = resize(resize(flat, 17, 23), 5, 6);
  for (float v : round.channels[0].pixels) EXPECT_FLOAT_EQ(v, 0.3f);
  EXPECT_SH_ERROR(resize(img, 0, 3), InvalidArgument);
}

TEST(Resize, BilinearOracle) {
  // Half-pixel centers: 1x4 -> 1x2 averages neighbouring pairs. Values
  // outside [0, 1] pass through untouched (raw coefficient tensors).
  auto row = stack_channels({ImagePlane{1, 4, {0, 2, 4, 6}, {"x", "mexh"}}});
  EXPECT_EQ(resize(row, 1, 2).channels[0].pixels, (std::vector<float>{1, 5}));
  // 1x2 -> 1x4: sample points 0.25 and 0.75 of each source pixel, clamped at the borders.
  auto two = stack_channels({ImagePlane{1, 2, {0, 4}, {"x", "mexh"}}});
  EXPECT_EQ(resize(two, 1, 4).channels[0].pixels, (std::vector<float>{0, 1, 3, 4}));
}

TEST(Png, Quantize) {
  EXPECT_EQ(quantize(0.5f), 128);
  EXPECT_EQ(quantize(0.0f), 0);
  EXPECT_EQ(quantize(1.0f), 255);
}

TEST(Png, UniformHalfPlane) {
  testutil::TempDir dir("png");
  write_png(dir / "h.png", plane(4, 5, 0.5f));
  const auto back = read_png(dir / "h.png");
  EXPECT_EQ(back.height, 4u);
  EXPECT_EQ(back.width, 5u);
  for (float v : back.pixels) EXPECT_EQ(v, 128.0f / 255.0f);
}

TEST(Png, RoundTripWithinOneLevel) {
  testutil::TempDir dir("png");
  Rng rng(45);
  auto img = random_tensor(rng, 6, 8, 13);
  img.id = "s9";
  const auto files = export_png(img, dir.path());
  ASSERT_EQ(files.size(), 6u);
  EXPECT_EQ(files[3].filename(), "s9_x_paul.png");
  for (std::size_t c = 0; c < 6; ++c) {
    const auto back = read_png(files[c]);
    for (std::size_t i = 0; i < back.pixels.size(); ++i)
      EXPECT_LE(std::abs(back.pixels[i] - img.channels[c].pixels[i]), 1.0f / 255.0f);
  }
}

TEST(Png, Filename) {
  EXPECT_EQ(png_filename("a1", {"mag", "dog:3"}), "a1_mag_dog-3.png");
}

TEST(Png, UnwritableDirectory) {
  Rng rng(46);
  const auto img = random_tensor(rng, 1, 2, 2);
  EXPECT_SH_ERROR(export_png(img, "/proc/no_such_dir/x"), Io);
  EXPECT_SH_ERROR(write_png("/proc/no_such_dir/x.png", img.channels[0]), Io);
}

TEST(Raw, RoundTripExact) {
  testutil::TempDir dir("raw");
  Rng rng(47);
  auto img = random_tensor(rng, 4, 9, 11);
  img.channels[1].pixels[3] = -123.456f;
  img.channels[2].pixels[0] = 1e-30f;
  export_raw(img, dir / "t.cwts");
  std::vector<Provenance> prov;
  for (const auto& c : img.channels) prov.push_back(c.provenance);
  const auto back = import_raw(dir / "t.cwts", prov);
  ASSERT_EQ(back.n_channels(), 4u);
  for (std::size_t c = 0; c < 4; ++c) {
    EXPECT_EQ(back.channels[c].pixels, img.channels[c].pixels);
    EXPECT_EQ(back.channels[c].provenance, img.channels[c].provenance);
  }
  EXPECT_EQ(to_raw(back), to_raw(img));
  EXPECT_SH_ERROR(from_raw(to_raw(img), {{"x", "mexh"}}), DimensionMismatch);
}

TEST(Raw, CodecLayoutAndErrors) {
  RawTensor t{2, 1, 3, {1, 2, 3, 4, 5, 6}};
  const auto bytes = encode_cwts(t);
  ASSERT_EQ(bytes.size(), 4u + 16u + 24u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "CWTS");
  EXPECT_EQ(bytes[4], 1);  // version, little-endian
  EXPECT_EQ(bytes[8], 1);  // n_scales
  EXPECT_EQ(bytes[12], 3); // n_times
  EXPECT_EQ(bytes[16], 2); // n_channels
  EXPECT_EQ(decode_cwts(bytes), t);
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_SH_ERROR(decode_cwts(bad), BadFormat);
  bad = bytes;
  bad[4] = 2;
  EXPECT_SH_ERROR(decode_cwts(bad), BadFormat);
  bad = bytes;
  bad.pop_back();
  EXPECT_SH_ERROR(decode_cwts(bad), BadFormat);
  EXPECT_SH_ERROR(read_cwts("/nonexistent.cwts"), Io);
}
