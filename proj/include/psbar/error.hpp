#pragma once

#include <stdexcept>
#include <string>

namespace psbar {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Gamma function evaluated at a non-positive integer.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// An iterative evaluation failed to reach its tolerance.
class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Integration point on the negative eikonal axis where r + z vanishes.
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

/// Final-channel kinetic energy is not positive.
class BelowThresholdError : public Error {
 public:
  BelowThresholdError(const std::string& what, double excess_energy_au)
      : Error(what), excess_energy_au_(excess_energy_au) {}

  /// E1 in hartree (<= 0).
  double excess_energy_au() const noexcept { return excess_energy_au_; }

 private:
  double excess_energy_au_;
};

/// Monte Carlo error above the requested relative target.
class AccuracyNotReachedError : public Error {
 public:
  using Error::Error;
};

/// Malformed run configuration; the message carries line/field context.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace psbar
