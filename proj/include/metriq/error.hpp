#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace metriq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: non-square matrices, overlapping blocks, non-injective maps.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// The requested quantity is not defined for this input (e.g. aspect ratio of one point).
class UndefinedInputError : public Error {
 public:
  using Error::Error;
};

/// A numeric parameter lies outside the range the construction supports.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Exact enumeration requested beyond its supported size.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition on the input space does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A construction that only succeeds with positive probability ran out of attempts.
class ProbabilisticFailure : public Error {
 public:
  ProbabilisticFailure(const std::string& what, std::size_t attempts, std::string diagnostics)
      : Error(what + " after " + std::to_string(attempts) + " attempts (" + diagnostics + ")"),
        attempts_(attempts),
        diagnostics_(std::move(diagnostics)) {}

  std::size_t attempts() const noexcept { return attempts_; }
  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::size_t attempts_;
  std::string diagnostics_;
};

/// A deterministic construction fell short of the size it was supposed to reach.
class ConstructionFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace metriq

namespace metriq {

/// The requested r-band contains fewer than two points.
class InsufficientBand : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// No point of the space is an m-center for the requested m.
class NoMCenter : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

}  // namespace metriq
