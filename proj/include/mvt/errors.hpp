#pragma once

#include <stdexcept>
#include <string>

namespace mvt {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A constructor or operation argument violates a documented precondition.
struct InvalidParameter : Error {
  using Error::Error;
};

// A push-forward map produced a value outside [0,1] beyond round-off
// tolerance; usually means a broken flow integrator.
struct MapOutOfRange : Error {
  using Error::Error;
};

struct NonFiniteVelocity : Error {
  using Error::Error;
};

struct NonFiniteGating : Error {
  using Error::Error;
};

// The dense simplex exceeded its iteration budget.
struct LpNotConverged : Error {
  using Error::Error;
};

// Two trajectories cover different time ranges.
struct IncompatibleTrajectories : Error {
  using Error::Error;
};

// A config file or measure file could not be parsed; message carries the
// offending key or token.
struct BadSpec : Error {
  using Error::Error;
};

// Generic guard for integration loops that fail to make progress.
struct NumericalError : Error {
  using Error::Error;
};

}  // namespace mvt
