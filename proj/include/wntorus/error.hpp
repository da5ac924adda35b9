#pragma once

#include <stdexcept>
#include <string>

namespace wntorus {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A circular statistic is undefined for the given data (zero resultant, zero spread).
class DegenerateStatistic : public Error {
 public:
  using Error::Error;
};

/// Initial values cannot be formed; usually fixed by jittering the data.
class DegenerateInitialization : public Error {
 public:
  using Error::Error;
};

/// An estimator cannot proceed with the data it was given.
class DegenerateEstimate : public Error {
 public:
  using Error::Error;
};

class SingularCovariance : public Error {
 public:
  using Error::Error;
};

class LatticeTooLarge : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

/// Raised by the direct optimizer when the dimension exceeds its guard.
class DimensionGuard : public Error {
 public:
  using Error::Error;
};

}  // namespace wntorus
