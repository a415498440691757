#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pinney {

enum class ErrorCode {
  InvalidArgument,
  NonPositiveFrequency,
  OutOfRange,
  DivisionByZero,
  NoRealConstants,
  NegativeRadicand,
  OffOrbit,
  RhoZeroCrossing,
  NonMonotoneArc,
  NonPositiveMass,
  NonPositiveWidth,
  GridTooCoarse,
  TooFewExtrema,
  StepFailure,
  UnexpectedCollapse,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonPositiveFrequency: return "NonPositiveFrequency";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::NoRealConstants: return "NoRealConstants";
    case ErrorCode::NegativeRadicand: return "NegativeRadicand";
    case ErrorCode::OffOrbit: return "OffOrbit";
    case ErrorCode::RhoZeroCrossing: return "RhoZeroCrossing";
    case ErrorCode::NonMonotoneArc: return "NonMonotoneArc";
    case ErrorCode::NonPositiveMass: return "NonPositiveMass";
    case ErrorCode::NonPositiveWidth: return "NonPositiveWidth";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::TooFewExtrema: return "TooFewExtrema";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::UnexpectedCollapse: return "UnexpectedCollapse";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can dispatch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace pinney
