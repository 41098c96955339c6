#include "scalohar/scalogram_image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>

#include "scalohar/error.hpp"

namespace scalohar {

GrayMode default_gray_mode(const MotherWavelet& w) {
  return w.is_real() ? GrayMode::AbsMax : GrayMode::MinMax;
}

ImagePlane to_grayscale(const Scalogram& sc, GrayMode mode, Provenance provenance) {
  ImagePlane plane{sc.n_scales, sc.n_times, std::vector<float>(sc.coefficients.size()),
                   std::move(provenance)};
  if (sc.coefficients.empty()) return plane;
  const auto [lo_it, hi_it] = std::minmax_element(sc.coefficients.begin(), sc.coefficients.end());
  const double lo = *lo_it, hi = *hi_it;
  if (lo == hi) {
    std::fill(plane.pixels.begin(), plane.pixels.end(), 0.5f);
    return plane;
  }
  if (mode == GrayMode::MinMax) {
    const double span = hi - lo;
    for (std::size_t i = 0; i < plane.pixels.size(); ++i)
      plane.pixels[i] = static_cast<float>((sc.coefficients[i] - lo) / span);
  } else {
    const double m = std::max(std::abs(lo), std::abs(hi));
    for (std::size_t i = 0; i < plane.pixels.size(); ++i)
      plane.pixels[i] = static_cast<float>(0.5 + 0.5 * sc.coefficients[i] / m);
  }
  for (auto& p : plane.pixels) p = std::clamp(p, 0.0f, 1.0f);
  return plane;
}

ImageTensor stack_channels(std::vector<ImagePlane> planes) {
  if (planes.empty()) throw Error(ErrorCode::DimensionMismatch, "no planes to stack");
  for (const auto& p : planes)
    if (p.height != planes.front().height || p.width != planes.front().width)
      throw Error(ErrorCode::DimensionMismatch,
                  "plane " + std::to_string(p.height) + "x" + std::to_string(p.width) +
                      " differs from " + std::to_string(planes.front().height) + "x" +
                      std::to_string(planes.front().width));
  ImageTensor t;
  t.channels = std::move(planes);
  return t;
}

ImageTensor crop_columns(const ImageTensor& img, std::size_t offset, std::size_t width) {
  if (offset + width > img.width())
    throw Error(ErrorCode::CropTooWide, "crop exceeds image width");
  ImageTensor out{{}, img.label, img.id};
  for (const auto& ch : img.channels) {
    ImagePlane p{ch.height, width, std::vector<float>(ch.height * width), ch.provenance};
    for (std::size_t r = 0; r < ch.height; ++r)
      std::copy_n(ch.pixels.begin() + static_cast<std::ptrdiff_t>(r * ch.width + offset), width,
                  p.pixels.begin() + static_cast<std::ptrdiff_t>(r * width));
    out.channels.push_back(std::move(p));
  }
  return out;
}

std::vector<ImageTensor> sliding_crops(const ImageTensor& img, const CropSpec& spec) {
  if (spec.width == 0) throw Error(ErrorCode::InvalidArgument, "crop width must be >= 1");
  if (spec.width > img.width())
    throw Error(ErrorCode::CropTooWide, "crop width " + std::to_string(spec.width) +
                                            " exceeds image width " + std::to_string(img.width()));
  std::vector<ImageTensor> crops;
  if (spec.stride == 0) {
    crops.push_back(crop_columns(img, (img.width() - spec.width) / 2, spec.width));
    return crops;
  }
  for (std::size_t offset = 0; offset + spec.width <= img.width(); offset += spec.stride)
    crops.push_back(crop_columns(img, offset, spec.width));
  return crops;
}

std::vector<ImageTensor> split_bands(const ImageTensor& img, std::size_t n_bands) {
  if (n_bands == 0 || img.height() % n_bands != 0)
    throw Error(ErrorCode::NotDivisible, "height " + std::to_string(img.height()) +
                                             " is not divisible into " + std::to_string(n_bands) +
                                             " bands");
  const std::size_t band = img.height() / n_bands;
  std::vector<ImageTensor> out;
  for (std::size_t b = 0; b < n_bands; ++b) {
    ImageTensor t{{}, img.label, img.id};
    for (const auto& ch : img.channels) {
      const auto first = ch.pixels.begin() + static_cast<std::ptrdiff_t>(b * band * ch.width);
      t.channels.push_back(ImagePlane{band, ch.width,
                                      std::vector<float>(first, first + static_cast<std::ptrdiff_t>(band * ch.width)),
                                      ch.provenance});
    }
    out.push_back(std::move(t));
  }
  return out;
}

namespace {

struct Tap {
  std::size_t lo, hi;
  double frac;
};

std::vector<Tap> taps(std::size_t in, std::size_t out) {
  std::vector<Tap> result(out);
  const double ratio = static_cast<double>(in) / static_cast<double>(out);
  for (std::size_t i = 0; i < out; ++i) {
    double src = (static_cast<double>(i) + 0.5) * ratio - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in - 1));
    const auto lo = static_cast<std::size_t>(std::floor(src));
    const std::size_t hi = std::min(lo + 1, in - 1);
    result[i] = {lo, hi, src - static_cast<double>(lo)};
  }
  return result;
}

}  // namespace

ImageTensor resize(const ImageTensor& img, std::size_t new_height, std::size_t new_width) {
  if (new_height == 0 || new_width == 0)
    throw Error(ErrorCode::InvalidArgument, "resize targets must be positive");
  if (new_height == img.height() && new_width == img.width()) return img;
  const auto rows = taps(img.height(), new_height);
  const auto cols = taps(img.width(), new_width);
  ImageTensor out{{}, img.label, img.id};
  for (const auto& ch : img.channels) {
    ImagePlane p{new_height, new_width, std::vector<float>(new_height * new_width), ch.provenance};
    for (std::size_t r = 0; r < new_height; ++r) {
      const auto& ry = rows[r];
      for (std::size_t c = 0; c < new_width; ++c) {
        const auto& cx = cols[c];
        const double top = (1.0 - cx.frac) * ch.at(ry.lo, cx.lo) + cx.frac * ch.at(ry.lo, cx.hi);
        const double bottom = (1.0 - cx.frac) * ch.at(ry.hi, cx.lo) + cx.frac * ch.at(ry.hi, cx.hi);
        const double v = (1.0 - ry.frac) * top + ry.frac * bottom;
        p.pixels[r * new_width + c] = static_cast<float>(v);
      }
    }
    out.channels.push_back(std::move(p));
  }
  return out;
}

RawTensor to_raw(const ImageTensor& img) {
  RawTensor raw;
  raw.n_channels = static_cast<std::uint32_t>(img.n_channels());
  raw.n_scales = static_cast<std::uint32_t>(img.height());
  raw.n_times = static_cast<std::uint32_t>(img.width());
  for (const auto& ch : img.channels) raw.data.insert(raw.data.end(), ch.pixels.begin(), ch.pixels.end());
  return raw;
}

ImageTensor from_raw(const RawTensor& raw, const std::vector<Provenance>& provenance) {
  if (!provenance.empty() && provenance.size() != raw.n_channels)
    throw Error(ErrorCode::DimensionMismatch, "provenance count differs from channel count");
  ImageTensor img;
  const std::size_t plane = std::size_t{raw.n_scales} * raw.n_times;
  for (std::uint32_t c = 0; c < raw.n_channels; ++c) {
    const auto first = raw.data.begin() + static_cast<std::ptrdiff_t>(c * plane);
    img.channels.push_back(ImagePlane{raw.n_scales, raw.n_times,
                                      std::vector<float>(first, first + static_cast<std::ptrdiff_t>(plane)),
                                      provenance.empty() ? Provenance{} : provenance[c]});
  }
  return img;
}

void export_raw(const ImageTensor& img, const std::filesystem::path& path) {
  write_cwts(path, to_raw(img));
}

ImageTensor import_raw(const std::filesystem::path& path, const std::vector<Provenance>& provenance) {
  return from_raw(read_cwts(path), provenance);
}

std::string png_filename(const std::string& id, const Provenance& provenance) {
  std::string wavelet = provenance.wavelet;
  std::replace(wavelet.begin(), wavelet.end(), ':', '-');
  return id + "_" + provenance.axis + "_" + wavelet + ".png";
}

std::uint8_t quantize(float value) {
  const double v = std::floor(255.0 * std::clamp(static_cast<double>(value), 0.0, 1.0) + 0.5);
  return static_cast<std::uint8_t>(v);
}

void write_png(const std::filesystem::path& path, const ImagePlane& plane) {
  std::vector<std::uint8_t> bytes(plane.pixels.size());
  std::transform(plane.pixels.begin(), plane.pixels.end(), bytes.begin(), quantize);
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(plane.width);
  image.height = static_cast<png_uint_32>(plane.height);
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::Io, "cannot write " + path.string() + ": " + msg);
  }
}

ImagePlane read_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw Error(ErrorCode::Io, "cannot read " + path.string() + ": " + image.message);
  image.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> bytes(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, bytes.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::Io, "cannot decode " + path.string() + ": " + msg);
  }
  ImagePlane plane{image.height, image.width, std::vector<float>(bytes.size()), {}};
  for (std::size_t i = 0; i < bytes.size(); ++i) plane.pixels[i] = static_cast<float>(bytes[i]) / 255.0f;
  return plane;
}

std::vector<std::filesystem::path> export_png(const ImageTensor& img,
                                              const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  const std::string id = img.id.empty() ? "image" : img.id;
  for (const auto& ch : img.channels) {
    auto path = dir / png_filename(id, ch.provenance);
    write_png(path, ch);
    written.push_back(std::move(path));
  }
  return written;
}

}  // namespace scalohar
