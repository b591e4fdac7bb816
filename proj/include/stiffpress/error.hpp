#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stiffpress {

enum class ErrorCode {
  InvalidGrid,
  InvalidArgument,
  Domain,
  NonFiniteState,
  DomainViolation,
  BoundaryTouched,
  NegativeUndershoot,
  TimeoutExceeded,
  NonZeroMean,
  MassMismatch,
  Config,
  Io,
};

/// Machine-parsable tag printed by the CLI on stderr.
inline std::string_view tag(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidGrid: return "INVALID_GRID";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::Domain: return "DOMAIN_ERROR";
    case ErrorCode::NonFiniteState: return "NON_FINITE_STATE";
    case ErrorCode::DomainViolation: return "DOMAIN_VIOLATION";
    case ErrorCode::BoundaryTouched: return "BOUNDARY_TOUCHED";
    case ErrorCode::NegativeUndershoot: return "NEGATIVE_UNDERSHOOT";
    case ErrorCode::TimeoutExceeded: return "TIMEOUT_EXCEEDED";
    case ErrorCode::NonZeroMean: return "NON_ZERO_MEAN";
    case ErrorCode::MassMismatch: return "MASS_MISMATCH";
    case ErrorCode::Config: return "CONFIG_ERROR";
    case ErrorCode::Io: return "IO_ERROR";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace stiffpress
