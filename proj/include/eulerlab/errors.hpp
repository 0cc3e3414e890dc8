#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eulerlab {

enum class ErrorCode {
  InvalidGrid,
  InvalidArgument,
  NoSubsolution,
  NonConvergence,
  BadTruncation,
  BoxOutsideGrid,
  NotASubsolution,
  NotASupersolution,
  NonConstantWallTrace,
  IncompatibleGrid,
  MissingPressure,
  ParityViolation,
  NonUnitReference,
  RTooLarge,
  NotAStripGrid,
  SeedOutsideDomain,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoSubsolution: return "NoSubsolution";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::BadTruncation: return "BadTruncation";
    case ErrorCode::BoxOutsideGrid: return "BoxOutsideGrid";
    case ErrorCode::NotASubsolution: return "NotASubsolution";
    case ErrorCode::NotASupersolution: return "NotASupersolution";
    case ErrorCode::NonConstantWallTrace: return "NonConstantWallTrace";
    case ErrorCode::IncompatibleGrid: return "IncompatibleGrid";
    case ErrorCode::MissingPressure: return "MissingPressure";
    case ErrorCode::ParityViolation: return "ParityViolation";
    case ErrorCode::NonUnitReference: return "NonUnitReference";
    case ErrorCode::RTooLarge: return "RTooLarge";
    case ErrorCode::NotAStripGrid: return "NotAStripGrid";
    case ErrorCode::SeedOutsideDomain: return "SeedOutsideDomain";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace eulerlab
