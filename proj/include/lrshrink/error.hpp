#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lrshrink {

enum class ErrorCode {
  NonPositiveEntry,
  DimensionTooSmall,
  BadReferenceIndex,
  OverflowRisk,
  NotAComposition,
  NotACountMatrix,
  TooFewSamples,
  ShapeMismatch,
  NotSymmetric,
  SingularCovariance,
  LambdaOutOfRange,
  ZeroEntry,
  RepresentationMismatch,
  NotPositiveDefinite,
  NonPositiveAlpha,
  PairRemoved,
  EmptyRow,
  DeltaOutOfRange,
  RowTotalTooSmall,
  InsufficientZeroFreeRows,
  InvalidArgument,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// All library failures are reported through this exception; `code()` lets
/// callers and tests distinguish precondition violations.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lrshrink
