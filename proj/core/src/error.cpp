#include "phonon_forge/error.hpp"

namespace phonon_forge {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_dimension: return "invalid_dimension";
    case ErrorCode::unknown_label: return "unknown_label";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::invalid_state: return "invalid_state";
    case ErrorCode::no_root: return "no_root";
    case ErrorCode::calibration: return "calibration";
    case ErrorCode::constraint_violation: return "constraint_violation";
    case ErrorCode::validation: return "validation";
    case ErrorCode::stiffness: return "stiffness";
    case ErrorCode::non_convergence: return "non_convergence";
    case ErrorCode::grid_too_small: return "grid_too_small";
    case ErrorCode::config: return "config";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

}  // namespace phonon_forge
