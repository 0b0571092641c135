#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bkl {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kInvariantViolation,
  kNonFiniteState,
  kConnectivity,
  kConfig,
  kIo,
};

std::string_view to_string(ErrorCode code);

/// Structured failure raised by every module. `code()` is stable and is what
/// callers (and the CLI's machine-readable error line) dispatch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bkl
