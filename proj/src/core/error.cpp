#include "core/error.hpp"

namespace meshcount {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::NoConsensus: return "NoConsensus";
    case ErrorCode::PointAtInfinity: return "PointAtInfinity";
    case ErrorCode::DegeneratePolygon: return "DegeneratePolygon";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::TooFewDots: return "TooFewDots";
    case ErrorCode::SigmaZero: return "SigmaZero";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ZeroGroundTruth: return "ZeroGroundTruth";
    case ErrorCode::CalibrationFailed: return "CalibrationFailed";
    case ErrorCode::HeadMismatch: return "HeadMismatch";
    case ErrorCode::UnorderedThetas: return "UnorderedThetas";
    case ErrorCode::BadTuple: return "BadTuple";
    case ErrorCode::EmptyAgreementLevel: return "EmptyAgreementLevel";
    case ErrorCode::ConstantInput: return "ConstantInput";
    case ErrorCode::DegenerateSamples: return "DegenerateSamples";
    case ErrorCode::InfeasibleOverlap: return "InfeasibleOverlap";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ProtocolError: return "ProtocolError";
  }
  return "Unknown";
}

}  // namespace meshcount
