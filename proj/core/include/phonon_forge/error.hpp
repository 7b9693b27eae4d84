#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phonon_forge {

enum class ErrorCode {
  invalid_dimension,
  unknown_label,
  dimension_mismatch,
  invalid_state,
  no_root,
  calibration,
  constraint_violation,
  validation,
  stiffness,
  non_convergence,
  grid_too_small,
  config,
  io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; the code tells callers (and the
/// CLI exit-code mapping) what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace phonon_forge
