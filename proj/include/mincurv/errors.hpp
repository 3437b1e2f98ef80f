#pragma once

#include <stdexcept>
#include <string>

namespace mincurv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A set that must be nonempty (Hausdorff operand, obstacle boundary) was empty.
class EmptySetError : public Error {
 public:
  using Error::Error;
};

class EmptyObstacleError : public EmptySetError {
 public:
  using EmptySetError::EmptySetError;
};

/// The grid does not cover a region it is required to contain.
class CoverageError : public Error {
 public:
  using Error::Error;
};

/// Explicit time step violates the stability bound.
class StabilityError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Configuration could not be parsed.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Configuration parsed but violates a modelling invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace mincurv
