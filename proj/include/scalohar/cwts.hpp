#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace scalohar {

/// In-memory form of the `CWTS` file: magic "CWTS", little-endian u32
/// {version = 1, n_scales, n_times, n_channels}, then float32 values in
/// (channel, scale, time) row-major order.
struct RawTensor {
  std::uint32_t n_channels = 0;
  std::uint32_t n_scales = 0;
  std::uint32_t n_times = 0;
  std::vector<float> data;

  bool operator==(const RawTensor&) const = default;
};

inline constexpr std::uint32_t kCwtsVersion = 1;

std::vector<std::uint8_t> encode_cwts(const RawTensor& t);
RawTensor decode_cwts(std::span<const std::uint8_t> bytes);

void write_cwts(const std::filesystem::path& path, const RawTensor& t);
RawTensor read_cwts(const std::filesystem::path& path);

// Little-endian helpers shared with the checkpoint format.
namespace le {
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v);
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v);
void put_f32(std::vector<std::uint8_t>& out, float v);
std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t& pos);
std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t& pos);
float get_f32(std::span<const std::uint8_t> in, std::size_t& pos);
}  // namespace le

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace scalohar
