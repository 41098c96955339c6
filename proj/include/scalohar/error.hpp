#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scalohar {

enum class ErrorCode {
  InvalidArgument,
  Io,
  MalformedRow,
  InconsistentLength,
  UnknownAxis,
  LabelOutOfRange,
  EmptyDataset,
  DuplicateId,
  MissingAxis,
  InvalidFraction,
  ZeroEnergy,
  InvalidWavelet,
  GridTooNarrow,
  InvalidScale,
  ScaleTooLarge,
  BasisNotOrthogonal,
  DimensionMismatch,
  CropTooWide,
  NotDivisible,
  ShapeMismatch,
  InvalidArchitecture,
  BadFormat,
  Diverged,
  EmptySweep,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace scalohar
