#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hwd {

enum class ErrorKind {
  InvalidMatrix,
  NotPsd,
  DimensionError,
  ConvergenceError,
  InvalidCost,
  SizeError,
  InvalidTrim,
  InsufficientData,
  InvalidParam,
  SubsampleError,
  ReferenceMismatch,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. The kind is stable and tests match on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by iterative solvers; carries the residual reached at the last iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(ErrorKind::ConvergenceError, what), last_residual_(last_residual) {}

  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidMatrix: return "InvalidMatrix";
    case ErrorKind::NotPsd: return "NotPsd";
    case ErrorKind::DimensionError: return "DimensionError";
    case ErrorKind::ConvergenceError: return "ConvergenceError";
    case ErrorKind::InvalidCost: return "InvalidCost";
    case ErrorKind::SizeError: return "SizeError";
    case ErrorKind::InvalidTrim: return "InvalidTrim";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::InvalidParam: return "InvalidParam";
    case ErrorKind::SubsampleError: return "SubsampleError";
    case ErrorKind::ReferenceMismatch: return "ReferenceMismatch";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace hwd
