#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace klsc {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the domain where an operation is defined (e.g. the angular
/// score gradient at the origin).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A hard threshold with zero event mass under the prior.
class InfeasibleThresholdError : public Error {
 public:
  using Error::Error;
};

/// A calibration bracket that does not straddle the target.
class CalibrationInfeasibleError : public Error {
 public:
  CalibrationInfeasibleError(const std::string& what, double low_value, double high_value)
      : Error(what), low_value_(low_value), high_value_(high_value) {}
  double low_value() const noexcept { return low_value_; }
  double high_value() const noexcept { return high_value_; }

 private:
  double low_value_;
  double high_value_;
};

class GridMismatchError : public Error {
 public:
  using Error::Error;
};

class EmptySampleError : public Error {
 public:
  using Error::Error;
};

/// A sampler ran out of budget; carries the number of draws produced so far.
class PartialResultError : public Error {
 public:
  PartialResultError(const std::string& what, std::size_t produced)
      : Error(what), produced_(produced) {}
  std::size_t produced() const noexcept { return produced_; }

 private:
  std::size_t produced_;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

/// A reverse-diffusion trajectory left the finite region.
class TrajectoryAbortError : public Error {
 public:
  TrajectoryAbortError(const std::string& what, std::size_t trajectory, std::size_t step)
      : Error(what), trajectory_(trajectory), step_(step) {}
  std::size_t trajectory() const noexcept { return trajectory_; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t trajectory_;
  std::size_t step_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace klsc
