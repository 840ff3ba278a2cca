#include "core/errors.hpp"

namespace mf {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NegativeProbability: return "NegativeProbability";
    case ErrorCode::ProbabilitySumOutOfTolerance: return "ProbabilitySumOutOfTolerance";
    case ErrorCode::NonPositiveN: return "NonPositiveN";
    case ErrorCode::UnknownPoint: return "UnknownPoint";
    case ErrorCode::MissingEstimator: return "MissingEstimator";
    case ErrorCode::MissingWeight: return "MissingWeight";
    case ErrorCode::EstimatorSupportGap: return "EstimatorSupportGap";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::UnsupportedClass: return "UnsupportedClass";
    case ErrorCode::SupportTooLarge: return "SupportTooLarge";
    case ErrorCode::AbsoluteContinuityViolation: return "AbsoluteContinuityViolation";
    case ErrorCode::InsufficientAgents: return "InsufficientAgents";
    case ErrorCode::ZeroMassCovariate: return "ZeroMassCovariate";
    case ErrorCode::PositivityViolation: return "PositivityViolation";
    case ErrorCode::ParameterOrderViolation: return "ParameterOrderViolation";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::UnknownLevelAtPredictTime: return "UnknownLevelAtPredictTime";
    case ErrorCode::SingleClassTarget: return "SingleClassTarget";
    case ErrorCode::NonBinaryOutcome: return "NonBinaryOutcome";
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::MissingIndicator: return "MissingIndicator";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace mf
