#include "scalohar/error.hpp"
#include "scalohar/nn.hpp"

namespace scalohar::nn {

ArchParams preset(std::string_view name) {
  ArchParams a;
  if (name == "paper-initial") return a;
  if (name == "paper-best") {
    a.conv_widths = {32, 128, 128};
    return a;
  }
  if (name == "paper-residual") {
    a.residual = true;
    return a;
  }
  throw Error(ErrorCode::InvalidArchitecture, "unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() { return {"paper-initial", "paper-best", "paper-residual"}; }

std::string arch_descriptor(const Shape& input, std::size_t n_classes, const ArchParams& arch) {
  if (n_classes < 2) throw Error(ErrorCode::InvalidArchitecture, "need at least two classes");
  if (arch.conv_widths.empty() || arch.kernel == 0)
    throw Error(ErrorCode::InvalidArchitecture, "need at least one convolution with a positive kernel");
  std::string d = "in=" + input.str() + ";";
  std::size_t h = input.height, w = input.width;
  const std::string k = std::to_string(arch.kernel);
  for (std::size_t i = 0; i < arch.conv_widths.size(); ++i) {
    if (h < arch.kernel || w < arch.kernel)
      throw Error(ErrorCode::InvalidArchitecture,
                  "input " + input.str() + " is too small for " + std::to_string(arch.conv_widths.size()) +
                      " convolutions of size " + k);
    const std::string c = std::to_string(arch.conv_widths[i]);
    d += (i ? "," : "") + ("conv:" + c + ":" + k + "x" + k + ",relu");
    h -= arch.kernel - 1;
    w -= arch.kernel - 1;
    // Pooling is skipped once a map is too small to halve.
    if (h >= 2 && w >= 2) {
      d += ",pool:2";
      h /= 2;
      w /= 2;
      if (arch.residual) d += ",res[conv:" + c + ":3x3:p1,relu,conv:" + c + ":3x3:p1],relu";
    }
  }
  for (std::size_t i = 0; i < arch.dense_layers; ++i) d += ",dense:" + std::to_string(arch.dense_units) + ",relu";
  d += ",dense:" + std::to_string(n_classes) + ",softmax";
  return d;
}

}  // namespace scalohar::nn
