#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace scalohar {

/// One fixed-length window of one sensor axis.
struct Signal {
  std::vector<double> samples;
  double sample_rate_hz = 1.0;

  /// Validating constructor: non-empty, finite, positive rate.
  static Signal make(std::vector<double> samples, double sample_rate_hz);

  std::size_t size() const { return samples.size(); }
};

enum class Axis { X, Y, Z, Magnitude };

std::string_view axis_tag(Axis axis);  // "x", "y", "z", "mag"
std::optional<Axis> parse_axis(std::string_view tag);

/// Parses an axis list such as "xyz", "xyzm", "mag" or "x,y,z".
std::vector<Axis> parse_axis_list(std::string_view spec);

struct MultiAxisSample {
  std::string id;
  int label = 0;
  std::map<Axis, Signal> axes;

  bool has(Axis axis) const { return axes.count(axis) != 0; }
  const Signal& at(Axis axis) const;
};

struct Dataset {
  std::vector<MultiAxisSample> samples;
  std::vector<std::string> class_names;

  std::size_t size() const { return samples.size(); }
  std::size_t n_classes() const { return class_names.size(); }
};

/// Sidecar metadata (`key=value` lines).
struct DatasetMeta {
  double sample_rate_hz = 50.0;
  std::size_t window_len = 151;
  std::vector<std::string> class_names;
};

struct LoadOptions {
  /// Axes every sample must carry. Magnitude is derived when x, y, z exist.
  std::vector<Axis> required_axes;
  /// strict: a sample missing a required axis is an error.
  /// lenient: the sample is kept and its id reported in LoadResult::flagged.
  bool strict = false;
};

struct LoadResult {
  Dataset dataset;
  std::vector<std::string> flagged;
};

/// Default sidecar location: `<csv path>.meta`.
std::filesystem::path meta_path_for(const std::filesystem::path& csv_path);

DatasetMeta read_meta(const std::filesystem::path& path);
void write_meta(const std::filesystem::path& path, const DatasetMeta& meta);

/// Parses the signals CSV. `header,label,axis,s0..s{L-1}`.
LoadResult load_dataset(const std::filesystem::path& csv_path,
                        const DatasetMeta& meta, const LoadOptions& options);

/// Convenience overload reading the sidecar from meta_path_for(csv_path).
LoadResult load_dataset(const std::filesystem::path& csv_path,
                        const LoadOptions& options = {});

/// Writes the CSV and its sidecar. Values are printed with 17 significant
/// digits so the load round-trip reproduces every double.
void save_dataset(const std::filesystem::path& csv_path, const Dataset& ds,
                  double sample_rate_hz);

Signal magnitude(const MultiAxisSample& sample);

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

/// Shuffle (Fisher-Yates over std::mt19937_64) then cut at floor(f * N).
std::pair<Dataset, Dataset> split_train_test(const Dataset& ds,
                                             const SplitSpec& spec);

/// Index form of the same split, shared with tensor-level callers.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, const SplitSpec& spec);

double energy(const Signal& s);

/// Entropy of the per-frame energy distribution. The trailing remainder of
/// an uneven split is folded into the last frame.
double energy_entropy(const Signal& s, std::size_t n_frames);

}  // namespace scalohar
