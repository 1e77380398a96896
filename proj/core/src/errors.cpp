#include "pv5/errors.hpp"

namespace pv5 {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::K2OutOfRange: return "K2OutOfRange";
    case ErrorCode::NegativeT: return "NegativeT";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::PoleError: return "PoleError";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::IndexError: return "IndexError";
    case ErrorCode::SingularParams: return "SingularParams";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::PoleHit: return "PoleHit";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_numerical_failure(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NoConvergence:
    case ErrorCode::PrecisionExhausted:
    case ErrorCode::StepUnderflow:
    case ErrorCode::PoleHit:
    case ErrorCode::IoError:
      return true;
    default:
      return false;
  }
}

}  // namespace pv5
