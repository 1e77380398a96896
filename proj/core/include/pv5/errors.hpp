#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pv5 {

enum class ErrorCode {
  AlphaOutOfRange,
  K2OutOfRange,
  NegativeT,
  InvalidArgument,
  DomainError,
  PoleError,
  NoConvergence,
  PrecisionExhausted,
  IndexError,
  SingularParams,
  StepUnderflow,
  PoleHit,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Numerical failures (as opposed to bad input) map to exit code 3 in the CLI.
bool is_numerical_failure(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pv5
