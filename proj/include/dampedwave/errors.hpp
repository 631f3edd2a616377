#pragma once

#include <stdexcept>
#include <string>

namespace dampedwave {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Invalid run configuration; the message lists every violated invariant.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Spectral parameter outside the disk where the half-line problem is uniformly solvable.
class AdmissibilityError : public Error {
public:
  using Error::Error;
};

/// Truncated half-line solution failed to decay; the truncation length is too small.
class TruncationError : public Error {
public:
  using Error::Error;
};

/// Grid too coarse for the oscillation or boundary-layer scale of the problem.
class ResolutionError : public Error {
public:
  using Error::Error;
};

/// Iterative method failed to converge or left its trust region.
class ConvergenceError : public Error {
public:
  using Error::Error;
};

/// Discretization produced a result contradicting a known structural property.
class DiscretizationError : public Error {
public:
  using Error::Error;
};

/// Compatibility (gluing) equations violated beyond tolerance.
class InconsistencyError : public Error {
public:
  using Error::Error;
};

/// Time stepping increased the energy of a dissipative system.
class InstabilityError : public Error {
public:
  using Error::Error;
};

} // namespace dampedwave
