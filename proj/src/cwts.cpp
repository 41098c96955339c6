#include "scalohar/cwts.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "scalohar/error.hpp"

namespace scalohar {

namespace le {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(std::vector<std::uint8_t>& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t& pos) {
  if (pos + 4 > in.size()) throw Error(ErrorCode::BadFormat, "truncated data");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[pos + i]) << (8 * i);
  pos += 4;
  return v;
}

std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t& pos) {
  if (pos + 8 > in.size()) throw Error(ErrorCode::BadFormat, "truncated data");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[pos + i]) << (8 * i);
  pos += 8;
  return v;
}

float get_f32(std::span<const std::uint8_t> in, std::size_t& pos) {
  return std::bit_cast<float>(get_u32(in, pos));
}

}  // namespace le

std::vector<std::uint8_t> encode_cwts(const RawTensor& t) {
  const std::size_t expected = std::size_t{t.n_channels} * t.n_scales * t.n_times;
  if (t.data.size() != expected)
    throw Error(ErrorCode::DimensionMismatch, "tensor data does not match its header");
  std::vector<std::uint8_t> out{'C', 'W', 'T', 'S'};
  out.reserve(20 + 4 * expected);
  le::put_u32(out, kCwtsVersion);
  le::put_u32(out, t.n_scales);
  le::put_u32(out, t.n_times);
  le::put_u32(out, t.n_channels);
  for (float v : t.data) le::put_f32(out, v);
  return out;
}

RawTensor decode_cwts(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 20 || std::memcmp(bytes.data(), "CWTS", 4) != 0)
    throw Error(ErrorCode::BadFormat, "missing CWTS magic");
  std::size_t pos = 4;
  const auto version = le::get_u32(bytes, pos);
  if (version != kCwtsVersion)
    throw Error(ErrorCode::BadFormat, "unsupported CWTS version " + std::to_string(version));
  RawTensor t;
  t.n_scales = le::get_u32(bytes, pos);
  t.n_times = le::get_u32(bytes, pos);
  t.n_channels = le::get_u32(bytes, pos);
  const std::size_t count = std::size_t{t.n_channels} * t.n_scales * t.n_times;
  if (bytes.size() != pos + 4 * count)
    throw Error(ErrorCode::BadFormat, "CWTS payload size does not match header");
  t.data.resize(count);
  for (auto& v : t.data) v = le::get_f32(bytes, pos);
  return t;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

void write_cwts(const std::filesystem::path& path, const RawTensor& t) {
  write_file_bytes(path, encode_cwts(t));
}

RawTensor read_cwts(const std::filesystem::path& path) { return decode_cwts(read_file_bytes(path)); }

}  // namespace scalohar
