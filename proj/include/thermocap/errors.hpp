#pragma once

#include <stdexcept>
#include <string>

namespace thermocap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (negative photon
/// number, sub-vacuum covariance matrix, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input: wrong dimensions, non-symmetric matrices, bad specs.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed (eigen-solver, pairing of conjugate eigenvalues).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// An equality constraint on the probe state (fixed energy) is violated.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

/// A scan found no sign change to bracket.
class NoRootError : public Error {
 public:
  using Error::Error;
};

/// Quadrature of the channel integral lost more trace than allowed.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// A series did not converge to the requested tolerance.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Perturbation amplitude drives an eigenvalue negative.
class EpsilonTooLarge : public Error {
 public:
  using Error::Error;
};

}  // namespace thermocap
