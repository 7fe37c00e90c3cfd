#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gaitlab {

enum class ErrorCode {
  kNonFiniteState,
  kNoCrossing,
  kNotArmed,
  kNoConvergence,
  kSingularMatrix,
  kNotOnGuard,
  kInfeasibleEnergy,
  kDegenerateY,
  kInconsistentCoords,
  kSingularDecoupling,
  kStepFailed,
  kLiftInfeasible,
  kConfigParse,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (the hybrid loop, the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonFiniteState: return "NonFiniteState";
    case ErrorCode::kNoCrossing: return "NoCrossing";
    case ErrorCode::kNotArmed: return "NotArmed";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kSingularMatrix: return "SingularMatrix";
    case ErrorCode::kNotOnGuard: return "NotOnGuard";
    case ErrorCode::kInfeasibleEnergy: return "InfeasibleEnergy";
    case ErrorCode::kDegenerateY: return "DegenerateY";
    case ErrorCode::kInconsistentCoords: return "InconsistentCoords";
    case ErrorCode::kSingularDecoupling: return "SingularDecoupling";
    case ErrorCode::kStepFailed: return "StepFailed";
    case ErrorCode::kLiftInfeasible: return "LiftInfeasible";
    case ErrorCode::kConfigParse: return "ConfigParse";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace gaitlab
