#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace parastab {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Precondition violation: bad sizes, unknown names, out-of-range values.
struct InvalidArgument : Error {
  using Error::Error;
};

/// An actuator rectangle contains no mesh node, so its indicator column is zero.
struct DegenerateActuator : Error {
  using Error::Error;
};

/// The coupling matrix between auxiliary functions and actuators is singular.
struct ObliqueProjectionUndefined : Error {
  using Error::Error;
};

/// Cholesky factorization failed; the matrix is not positive definite.
/// Callers in the Riccati sweep treat this as a control-flow signal.
struct NotPositiveDefinite : Error {
  using Error::Error;
};

/// The coefficient matrix of a Lyapunov equation has an eigenvalue with
/// nonnegative real part.
struct NotStable : Error {
  using Error::Error;
};

/// The initial guess handed to the Newton iteration does not stabilize
/// the closed loop.
struct NotStabilizingGuess : Error {
  using Error::Error;
};

/// An iteration hit its cap before meeting its tolerance. `history` holds
/// the per-iteration error norms observed so far.
struct NoConvergence : Error {
  NoConvergence(const std::string& what, std::vector<double> hist = {})
      : Error(what), history(std::move(hist)) {}
  std::vector<double> history;
};

/// Repeated step halving in the Riccati sweep drove the step below the
/// collapse threshold.
struct StepCollapse : Error {
  using Error::Error;
};

/// A numerical routine produced a result outside its contract
/// (failed decomposition, residual above tolerance, indefinite output).
struct NumericalError : Error {
  using Error::Error;
};

/// File read/write failure.
struct IoError : Error {
  using Error::Error;
};

} // namespace parastab
