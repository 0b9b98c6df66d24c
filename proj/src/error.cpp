#include "lrshrink/error.hpp"

namespace lrshrink {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveEntry: return "NonPositiveEntry";
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::BadReferenceIndex: return "BadReferenceIndex";
    case ErrorCode::OverflowRisk: return "OverflowRisk";
    case ErrorCode::NotAComposition: return "NotAComposition";
    case ErrorCode::NotACountMatrix: return "NotACountMatrix";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::LambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorCode::ZeroEntry: return "ZeroEntry";
    case ErrorCode::RepresentationMismatch: return "RepresentationMismatch";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NonPositiveAlpha: return "NonPositiveAlpha";
    case ErrorCode::PairRemoved: return "PairRemoved";
    case ErrorCode::EmptyRow: return "EmptyRow";
    case ErrorCode::DeltaOutOfRange: return "DeltaOutOfRange";
    case ErrorCode::RowTotalTooSmall: return "RowTotalTooSmall";
    case ErrorCode::InsufficientZeroFreeRows: return "InsufficientZeroFreeRows";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace lrshrink
