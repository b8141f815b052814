#pragma once

#include <stdexcept>
#include <string>

namespace meshcount {

enum class ErrorCode {
  InvalidArgument,
  TooFewPoints,
  DegenerateConfiguration,
  NoConsensus,
  PointAtInfinity,
  DegeneratePolygon,
  DimensionMismatch,
  IndexOutOfRange,
  OutOfBounds,
  TooFewDots,
  SigmaZero,
  ShapeMismatch,
  TooSmall,
  EmptyInput,
  ZeroGroundTruth,
  CalibrationFailed,
  HeadMismatch,
  UnorderedThetas,
  BadTuple,
  EmptyAgreementLevel,
  ConstantInput,
  DegenerateSamples,
  InfeasibleOverlap,
  ValidationError,
  ParseError,
  IoError,
  ProtocolError,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace meshcount
