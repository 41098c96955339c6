#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scalohar/cwts.hpp"
#include "scalohar/transform.hpp"

namespace scalohar {

struct Provenance {
  std::string axis;     // "x", "y", "z", "mag"
  std::string wavelet;  // canonical selector, e.g. "mexh"

  bool operator==(const Provenance&) const = default;
};

/// Grayscale plane with pixels in [0, 1], row 0 = smallest scale.
struct ImagePlane {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<float> pixels;
  Provenance provenance;

  float at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
};

struct ImageTensor {
  std::vector<ImagePlane> channels;
  std::optional<int> label;
  std::string id;

  std::size_t n_channels() const { return channels.size(); }
  std::size_t height() const { return channels.empty() ? 0 : channels.front().height; }
  std::size_t width() const { return channels.empty() ? 0 : channels.front().width; }
};

enum class GrayMode {
  MinMax,  // [min, max] -> [0, 1]
  AbsMax,  // [-M, M] -> [0, 1], zero at 0.5
};

/// AbsMax for signed (DOG) scalograms, MinMax for moduli.
GrayMode default_gray_mode(const MotherWavelet& w);

/// A constant scalogram maps to 0.5 everywhere in both modes.
ImagePlane to_grayscale(const Scalogram& sc, GrayMode mode, Provenance provenance = {});

ImageTensor stack_channels(std::vector<ImagePlane> planes);

struct CropSpec {
  std::size_t width = 128;
  std::size_t stride = 0;  // 0: one centered crop
};

/// Column crops at offsets 0, stride, 2*stride, ... (floor((W - w) / s) + 1 of them).
std::vector<ImageTensor> sliding_crops(const ImageTensor& img, const CropSpec& spec);

/// Column crop [offset, offset + width).
ImageTensor crop_columns(const ImageTensor& img, std::size_t offset, std::size_t width);

/// Horizontal bands, top to bottom.
std::vector<ImageTensor> split_bands(const ImageTensor& img, std::size_t n_bands);

/// Bilinear, half-pixel centers, clamped at the borders.
ImageTensor resize(const ImageTensor& img, std::size_t new_height, std::size_t new_width);

RawTensor to_raw(const ImageTensor& img);
/// Provenance is not carried by the raw format; pass it when known.
ImageTensor from_raw(const RawTensor& raw, const std::vector<Provenance>& provenance = {});

void export_raw(const ImageTensor& img, const std::filesystem::path& path);
ImageTensor import_raw(const std::filesystem::path& path,
                       const std::vector<Provenance>& provenance = {});

/// `<id>_<axis>_<wavelet>.png`, with ':' in the selector written as '-'.
std::string png_filename(const std::string& id, const Provenance& provenance);

/// One 8-bit grayscale PNG per channel, pixel = floor(255 v + 0.5).
std::vector<std::filesystem::path> export_png(const ImageTensor& img,
                                              const std::filesystem::path& dir);

/// Writes a single plane; used by the demo figures as well.
void write_png(const std::filesystem::path& path, const ImagePlane& plane);
ImagePlane read_png(const std::filesystem::path& path);

std::uint8_t quantize(float value);

}  // namespace scalohar
