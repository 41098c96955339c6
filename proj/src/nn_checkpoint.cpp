#include <algorithm>
#include <array>
#include <cstring>

#include "scalohar/cwts.hpp"
#include "scalohar/error.hpp"
#include "scalohar/nn.hpp"

namespace scalohar::nn {

namespace {
constexpr std::array<std::uint8_t, 4> kMagic{'S', 'H', 'N', 'N'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

std::vector<std::uint8_t> encode_checkpoint(Network& net) {
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  le::put_u32(out, kVersion);
  const std::string desc = net.descriptor();
  le::put_u32(out, static_cast<std::uint32_t>(desc.size()));
  out.insert(out.end(), desc.begin(), desc.end());
  for (const auto& p : net.parameters()) {
    le::put_u64(out, p.values.size());
    for (double v : p.values) le::put_f32(out, static_cast<float>(v));
  }
  return out;
}

Network decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin()))
    throw Error(ErrorCode::BadFormat, "not an SHNN checkpoint");
  std::size_t pos = 4;
  try {
    const auto version = le::get_u32(bytes, pos);
    if (version != kVersion)
      throw Error(ErrorCode::BadFormat, "unsupported checkpoint version " + std::to_string(version));
    const auto len = le::get_u32(bytes, pos);
    if (bytes.size() - pos < len) throw Error(ErrorCode::BadFormat, "truncated descriptor");
    const std::string desc(reinterpret_cast<const char*>(bytes.data() + pos), len);
    pos += len;
    Network net;
    try {
      net = Network::from_descriptor(desc, 0);
    } catch (const Error& e) {
      throw Error(ErrorCode::BadFormat, std::string("checkpoint descriptor: ") + e.what());
    }
    for (const auto& p : net.parameters()) {
      const auto count = le::get_u64(bytes, pos);
      if (count != p.values.size())
        throw Error(ErrorCode::BadFormat, "parameter blob of " + std::to_string(count) + " values, expected " +
                                              std::to_string(p.values.size()));
      for (auto& v : p.values) v = le::get_f32(bytes, pos);
    }
    if (pos != bytes.size()) throw Error(ErrorCode::BadFormat, "trailing bytes after parameters");
    return net;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BadFormat) throw;
    throw Error(ErrorCode::BadFormat, e.what());
  }
}

void save_checkpoint(Network& net, const std::filesystem::path& path) {
  write_file_bytes(path, encode_checkpoint(net));
}

Network load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file_bytes(path)); }

}  // namespace scalohar::nn
