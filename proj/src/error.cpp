#include "scalohar/error.hpp"

namespace scalohar {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::InconsistentLength: return "InconsistentLength";
    case ErrorCode::UnknownAxis: return "UnknownAxis";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::MissingAxis: return "MissingAxis";
    case ErrorCode::InvalidFraction: return "InvalidFraction";
    case ErrorCode::ZeroEnergy: return "ZeroEnergy";
    case ErrorCode::InvalidWavelet: return "InvalidWavelet";
    case ErrorCode::GridTooNarrow: return "GridTooNarrow";
    case ErrorCode::InvalidScale: return "InvalidScale";
    case ErrorCode::ScaleTooLarge: return "ScaleTooLarge";
    case ErrorCode::BasisNotOrthogonal: return "BasisNotOrthogonal";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::CropTooWide: return "CropTooWide";
    case ErrorCode::NotDivisible: return "NotDivisible";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidArchitecture: return "InvalidArchitecture";
    case ErrorCode::BadFormat: return "BadFormat";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::EmptySweep: return "EmptySweep";
  }
  return "Unknown";
}

}  // namespace scalohar
