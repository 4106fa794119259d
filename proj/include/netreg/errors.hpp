#pragma once

#include <stdexcept>
#include <string>

namespace netreg {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of an operation (u outside [0,1], n < 2, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent model or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The operation does not support this input variant.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

enum class ValidationKind {
  Parse,
  Asymmetric,
  NonzeroDiagonal,
  NonBinary,
  DimensionMismatch,
  IndexOutOfRange,
};

const char* to_string(ValidationKind kind);

/// Ingested data failed to parse or violates an adjacency/outcome invariant.
class ValidationError : public Error {
 public:
  ValidationError(ValidationKind kind, const std::string& what)
      : Error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ValidationKind kind() const noexcept { return kind_; }

 private:
  ValidationKind kind_;
};

/// Base of numerical failures (exit code 3 in the CLI).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The kernel-weighted design matrix is singular: the bandwidth leaves too
/// little matched variation in the covariates.
class SingularSystemError : public NumericalError {
 public:
  SingularSystemError(const std::string& what, double reciprocal_condition)
      : NumericalError(what), rcond_(reciprocal_condition) {}

  double reciprocal_condition() const noexcept { return rcond_; }

 private:
  double rcond_;
};

/// The peer-effect fixed point did not converge.
class ContractionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// No bandwidth on the search grid reaches the requested effective share.
class TargetUnreachableError : public NumericalError {
 public:
  TargetUnreachableError(const std::string& what, double achieved)
      : NumericalError(what), achieved_(achieved) {}

  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace netreg
