#pragma once

#include <stdexcept>
#include <string>

namespace mf {

enum class ErrorCode {
  LengthMismatch,
  NegativeProbability,
  ProbabilitySumOutOfTolerance,
  NonPositiveN,
  UnknownPoint,
  MissingEstimator,
  MissingWeight,
  EstimatorSupportGap,
  EmptySample,
  UnsupportedClass,
  SupportTooLarge,
  AbsoluteContinuityViolation,
  InsufficientAgents,
  ZeroMassCovariate,
  PositivityViolation,
  ParameterOrderViolation,
  EmptyDataset,
  UnknownLevelAtPredictTime,
  SingleClassTarget,
  NonBinaryOutcome,
  WidthMismatch,
  MissingIndicator,
  FileNotFound,
  MalformedRecord,
  ParseError,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

/// Exception carrying a stable error code alongside the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace mf
