#pragma once
#include <stdexcept>
#include <string>

namespace curvlab {

enum class ErrorKind {
  Domain,
  Regularity,
  Precondition,
  Solvability,
  InternalConsistency,
  NonConvergence,
  TTooLarge,
  EtaTooLarge,
  Obstruction,
  Infeasible,
  Parse,
  Mode,
  GridMismatch,
  Invalid,
};

const char* error_kind_name(ErrorKind k);

class CurvError : public std::runtime_error {
 public:
  CurvError(ErrorKind kind, const std::string& what, double value = 0.0)
      : std::runtime_error(what), kind_(kind), value_(value) {}
  ErrorKind kind() const { return kind_; }
  // numeric witness attached to the error (eigenvalue, largest admissible t, ...)
  double value() const { return value_; }

 private:
  ErrorKind kind_;
  double value_;
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Regularity: return "regularity";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Solvability: return "solvability";
    case ErrorKind::InternalConsistency: return "internal-consistency";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::TTooLarge: return "t-too-large";
    case ErrorKind::EtaTooLarge: return "eta-too-large";
    case ErrorKind::Obstruction: return "obstruction";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Mode: return "mode";
    case ErrorKind::GridMismatch: return "grid-mismatch";
    case ErrorKind::Invalid: return "invalid";
  }
  return "unknown";
}

}  // namespace curvlab
