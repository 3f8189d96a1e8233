#pragma once

#include <stdexcept>
#include <string>

namespace kornlab {

/// Base class of every exception thrown by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Form degree outside the valid range for the requested operation.
struct DegreeError : Error {
  explicit DegreeError(const std::string& msg) : Error(msg) {}
};

/// Two objects that must live on the same mask / have the same degree do not.
struct IncompatibleError : Error {
  explicit IncompatibleError(const std::string& msg) : Error(msg) {}
};

/// Degenerate or unsupported domain geometry.
struct DomainError : Error {
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// Iterative solver breakdown (NaN/Inf) or non-convergence in strict mode.
struct SolverError : Error {
  explicit SolverError(const std::string& msg) : Error(msg) {}
};

/// Dense-path request above the configured degrees-of-freedom cap.
struct DofLimitError : Error {
  explicit DofLimitError(const std::string& msg) : Error(msg) {}
};

/// Deflation basis is numerically rank deficient.
struct DeflationError : Error {
  explicit DeflationError(const std::string& msg) : Error(msg) {}
};

/// Invalid experiment configuration (CLI or config file).
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Malformed snapshot file or filesystem failure.
struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(msg) {}
};

} // namespace kornlab
