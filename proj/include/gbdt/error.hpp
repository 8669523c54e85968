#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gbdt {

enum class ErrorKind {
  ShapeMismatch,
  InvalidArgument,
  NonFinite,
  SingularMatrix,
  NotNilpotent,
  SpectralCollision,
  StepTooLarge,
  IdentityViolated,
  SymmetryViolated,
  DomainViolation,
  ConventionMismatch,
  SpectrumNotSingleton,
  LambdaNotReal,
  OrderingViolated,
  SignatureViolated,
  NotRealReducible,
  GridTooSmall,
  InvalidConfig,
  UnknownDemo,
};

inline constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::NotNilpotent: return "NotNilpotent";
    case ErrorKind::SpectralCollision: return "SpectralCollision";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::IdentityViolated: return "IdentityViolated";
    case ErrorKind::SymmetryViolated: return "SymmetryViolated";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::ConventionMismatch: return "ConventionMismatch";
    case ErrorKind::SpectrumNotSingleton: return "SpectrumNotSingleton";
    case ErrorKind::LambdaNotReal: return "LambdaNotReal";
    case ErrorKind::OrderingViolated: return "OrderingViolated";
    case ErrorKind::SignatureViolated: return "SignatureViolated";
    case ErrorKind::NotRealReducible: return "NotRealReducible";
    case ErrorKind::GridTooSmall: return "GridTooSmall";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::UnknownDemo: return "UnknownDemo";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind so the
/// CLI can emit structured error records.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace gbdt
