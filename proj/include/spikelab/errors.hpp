#pragma once

#include <stdexcept>
#include <string>

namespace spikelab {

/// Base class for all spikelab errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument to a sampling or evaluation routine (bad n, sigma2, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: eigensolver non-convergence, overflow, non-finite
/// kernel values, ill-conditioned resolvent.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Root bracketing / saddle-point geometry failure.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration (JSON schema violations, invalid contours).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A caller combined objects that do not belong together
/// (e.g. rescaling a sample with geometry solved for another spec).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or empty data fed to a statistics routine.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace spikelab
