#include "scalohar/signal_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "scalohar/error.hpp"
#include "scalohar/rng.hpp"

namespace scalohar {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool parse_int(std::string_view text, long long& out) {
  text = trim(text);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Signal Signal::make(std::vector<double> samples, double sample_rate_hz) {
  if (samples.empty())
    throw Error(ErrorCode::InvalidArgument, "signal has no samples");
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz))
    throw Error(ErrorCode::InvalidArgument, "sample rate must be positive");
  for (double v : samples)
    if (!std::isfinite(v))
      throw Error(ErrorCode::InvalidArgument, "signal contains non-finite sample");
  return Signal{std::move(samples), sample_rate_hz};
}

std::string_view axis_tag(Axis axis) {
  switch (axis) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    case Axis::Z: return "z";
    case Axis::Magnitude: return "mag";
  }
  return "?";
}

std::optional<Axis> parse_axis(std::string_view tag) {
  tag = trim(tag);
  if (tag == "x") return Axis::X;
  if (tag == "y") return Axis::Y;
  if (tag == "z") return Axis::Z;
  if (tag == "mag" || tag == "m") return Axis::Magnitude;
  return std::nullopt;
}

std::vector<Axis> parse_axis_list(std::string_view spec) {
  spec = trim(spec);
  std::vector<Axis> axes;
  if (spec.find(',') != std::string_view::npos || spec == "mag") {
    for (auto part : split(spec, ',')) {
      auto axis = parse_axis(part);
      if (!axis) throw Error(ErrorCode::UnknownAxis, std::string(part));
      axes.push_back(*axis);
    }
  } else {
    for (char c : spec) {
      auto axis = parse_axis(std::string_view(&c, 1));
      if (!axis) throw Error(ErrorCode::UnknownAxis, std::string(spec));
      axes.push_back(*axis);
    }
  }
  if (axes.empty()) throw Error(ErrorCode::UnknownAxis, "empty axis list");
  for (std::size_t i = 0; i < axes.size(); ++i)
    for (std::size_t j = i + 1; j < axes.size(); ++j)
      if (axes[i] == axes[j])
        throw Error(ErrorCode::InvalidArgument,
                    "axis listed twice in '" + std::string(spec) + "'");
  return axes;
}

const Signal& MultiAxisSample::at(Axis axis) const {
  auto it = axes.find(axis);
  if (it == axes.end())
    throw Error(ErrorCode::MissingAxis,
                "sample '" + id + "' has no axis " + std::string(axis_tag(axis)));
  return it->second;
}

std::filesystem::path meta_path_for(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p += ".meta";
  return p;
}

DatasetMeta read_meta(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open metadata file " + path.string());
  DatasetMeta meta;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::BadFormat,
                  path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    const auto key = trim(view.substr(0, eq));
    const auto value = trim(view.substr(eq + 1));
    if (key == "sample_rate_hz") {
      if (!parse_double(value, meta.sample_rate_hz) || !(meta.sample_rate_hz > 0))
        throw Error(ErrorCode::BadFormat, "invalid sample_rate_hz");
    } else if (key == "window_len") {
      long long n = 0;
      if (!parse_int(value, n) || n < 0)
        throw Error(ErrorCode::BadFormat, "invalid window_len");
      meta.window_len = static_cast<std::size_t>(n);
    } else if (key == "class_names") {
      meta.class_names.clear();
      if (!value.empty())
        for (auto name : split(value, ';')) meta.class_names.emplace_back(trim(name));
    } else {
      throw Error(ErrorCode::BadFormat, "unknown metadata key '" + std::string(key) + "'");
    }
  }
  return meta;
}

void write_meta(const std::filesystem::path& path, const DatasetMeta& meta) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write metadata file " + path.string());
  out << "sample_rate_hz=" << format_double(meta.sample_rate_hz) << '\n';
  out << "window_len=" << meta.window_len << '\n';
  out << "class_names=";
  for (std::size_t i = 0; i < meta.class_names.size(); ++i)
    out << (i ? ";" : "") << meta.class_names[i];
  out << '\n';
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

LoadResult load_dataset(const std::filesystem::path& csv_path,
                        const DatasetMeta& meta, const LoadOptions& options) {
  std::ifstream in(csv_path);
  if (!in) throw Error(ErrorCode::Io, "cannot open dataset " + csv_path.string());

  std::string line;
  int line_no = 0;
  // Skip leading blank lines; the first content line is the header.
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cols = split(trim(line), ',');
    if (cols.size() < 4 || trim(cols[0]) != "id" || trim(cols[1]) != "label" ||
        trim(cols[2]) != "axis")
      throw Error(ErrorCode::MalformedRow,
                  csv_path.string() + ":" + std::to_string(line_no) +
                      ": header must be id,label,axis,s0,...");
    have_header = true;
    break;
  }
  if (!have_header) throw Error(ErrorCode::EmptyDataset, csv_path.string() + " is empty");

  const bool infer_classes = meta.class_names.empty();
  const std::size_t n_classes = meta.class_names.size();

  Dataset ds;
  ds.class_names = meta.class_names;
  std::unordered_map<std::string, std::size_t> index_of;
  std::size_t window = meta.window_len;
  int max_label = -1;

  while (std::getline(in, line)) {
    ++line_no;
    const auto row = trim(line);
    if (row.empty()) continue;
    const std::string where = csv_path.string() + ":" + std::to_string(line_no);
    auto cols = split(row, ',');
    if (cols.size() < 4) throw Error(ErrorCode::MalformedRow, where + ": too few columns");

    std::string id(trim(cols[0]));
    if (id.empty()) throw Error(ErrorCode::MalformedRow, where + ": empty id");
    long long label = 0;
    if (!parse_int(cols[1], label))
      throw Error(ErrorCode::MalformedRow, where + ": label is not an integer");
    if (label < 0 || (!infer_classes && label >= static_cast<long long>(n_classes)))
      throw Error(ErrorCode::LabelOutOfRange, where + ": label " + std::to_string(label));
    const auto axis = parse_axis(cols[2]);
    if (!axis)
      throw Error(ErrorCode::UnknownAxis, where + ": axis '" + std::string(trim(cols[2])) + "'");

    std::vector<double> values(cols.size() - 3);
    for (std::size_t i = 3; i < cols.size(); ++i)
      if (!parse_double(cols[i], values[i - 3]) || !std::isfinite(values[i - 3]))
        throw Error(ErrorCode::MalformedRow, where + ": bad sample value in column " +
                                                 std::to_string(i + 1));
    if (window == 0) window = values.size();
    if (values.size() != window)
      throw Error(ErrorCode::InconsistentLength,
                  where + ": " + std::to_string(values.size()) + " samples, expected " +
                      std::to_string(window));
    if (*axis == Axis::Magnitude)
      for (double v : values)
        if (v < 0) throw Error(ErrorCode::MalformedRow, where + ": negative magnitude");

    auto [it, inserted] = index_of.emplace(id, ds.samples.size());
    if (inserted) {
      ds.samples.push_back(MultiAxisSample{id, static_cast<int>(label), {}});
    }
    auto& sample = ds.samples[it->second];
    if (sample.label != label)
      throw Error(ErrorCode::MalformedRow, where + ": conflicting label for id '" + id + "'");
    if (sample.has(*axis))
      throw Error(ErrorCode::DuplicateId,
                  where + ": axis " + std::string(axis_tag(*axis)) + " repeated for id '" + id + "'");
    sample.axes.emplace(*axis, Signal{std::move(values), meta.sample_rate_hz});
    max_label = std::max(max_label, static_cast<int>(label));
  }

  if (ds.samples.empty()) throw Error(ErrorCode::EmptyDataset, csv_path.string() + " has no rows");
  if (infer_classes)
    for (int k = 0; k <= max_label; ++k) ds.class_names.push_back(std::to_string(k));

  LoadResult result;
  for (auto& sample : ds.samples) {
    if (!sample.has(Axis::Magnitude) && sample.has(Axis::X) && sample.has(Axis::Y) &&
        sample.has(Axis::Z))
      sample.axes.emplace(Axis::Magnitude, magnitude(sample));
    for (Axis axis : options.required_axes) {
      if (sample.has(axis)) continue;
      if (options.strict)
        throw Error(ErrorCode::MissingAxis, "sample '" + sample.id + "' lacks axis " +
                                                std::string(axis_tag(axis)));
      result.flagged.push_back(sample.id);
      break;
    }
  }
  result.dataset = std::move(ds);
  return result;
}

LoadResult load_dataset(const std::filesystem::path& csv_path, const LoadOptions& options) {
  DatasetMeta meta;
  meta.window_len = 0;
  const auto sidecar = meta_path_for(csv_path);
  if (std::filesystem::exists(sidecar)) meta = read_meta(sidecar);
  return load_dataset(csv_path, meta, options);
}

void save_dataset(const std::filesystem::path& csv_path, const Dataset& ds,
                  double sample_rate_hz) {
  if (ds.samples.empty()) throw Error(ErrorCode::EmptyDataset, "nothing to save");
  const std::size_t len = ds.samples.front().axes.begin()->second.size();
  std::ofstream out(csv_path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + csv_path.string());
  out << "id,label,axis";
  for (std::size_t i = 0; i < len; ++i) out << ",s" << i;
  out << '\n';
  for (const auto& sample : ds.samples) {
    for (const auto& [axis, signal] : sample.axes) {
      if (signal.size() != len)
        throw Error(ErrorCode::InconsistentLength, "sample '" + sample.id + "'");
      out << sample.id << ',' << sample.label << ',' << axis_tag(axis);
      for (double v : signal.samples) out << ',' << format_double(v);
      out << '\n';
    }
  }
  if (!out) throw Error(ErrorCode::Io, "failed writing " + csv_path.string());
  write_meta(meta_path_for(csv_path), DatasetMeta{sample_rate_hz, len, ds.class_names});
}

Signal magnitude(const MultiAxisSample& sample) {
  const Signal& x = sample.at(Axis::X);
  const Signal& y = sample.at(Axis::Y);
  const Signal& z = sample.at(Axis::Z);
  if (x.size() != y.size() || x.size() != z.size())
    throw Error(ErrorCode::InconsistentLength, "axes of '" + sample.id + "' differ in length");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::sqrt(x.samples[i] * x.samples[i] + y.samples[i] * y.samples[i] +
                       z.samples[i] * z.samples[i]);
  return Signal{std::move(out), x.sample_rate_hz};
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw Error(ErrorCode::InvalidFraction,
                "train fraction must lie in (0,1), got " + format_double(spec.train_fraction));
  if (n == 0) throw Error(ErrorCode::EmptyDataset, "cannot split an empty dataset");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(spec.seed);
  rng.shuffle(std::span<std::size_t>(order));
  // The relative nudge keeps 0.8 * 10 from landing on 7.999...
  const auto n_train = static_cast<std::size_t>(
      std::floor(spec.train_fraction * static_cast<double>(n) * (1.0 + 1e-12)));
  std::vector<std::size_t> train(order.begin(), order.begin() + n_train);
  std::vector<std::size_t> test(order.begin() + n_train, order.end());
  return {std::move(train), std::move(test)};
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, const SplitSpec& spec) {
  auto [train_idx, test_idx] = split_indices(ds.size(), spec);
  Dataset train{{}, ds.class_names};
  Dataset test{{}, ds.class_names};
  for (auto i : train_idx) train.samples.push_back(ds.samples[i]);
  for (auto i : test_idx) test.samples.push_back(ds.samples[i]);
  return {std::move(train), std::move(test)};
}

double energy(const Signal& s) {
  double e = 0.0;
  for (double v : s.samples) e += v * v;
  return e;
}

double energy_entropy(const Signal& s, std::size_t n_frames) {
  if (n_frames == 0 || n_frames > s.size())
    throw Error(ErrorCode::InvalidArgument, "n_frames must lie in [1, signal length]");
  const double total = energy(s);
  if (total == 0.0) throw Error(ErrorCode::ZeroEnergy, "signal has zero energy");
  const std::size_t frame = s.size() / n_frames;
  double entropy = 0.0;
  for (std::size_t n = 0; n < n_frames; ++n) {
    const std::size_t begin = n * frame;
    const std::size_t end = (n + 1 == n_frames) ? s.size() : begin + frame;
    double e = 0.0;
    for (std::size_t i = begin; i < end; ++i) e += s.samples[i] * s.samples[i];
    const double p = e / total;
    if (p > 0.0) entropy -= p * std::log(p);
  }
  return entropy;
}

}  // namespace scalohar
