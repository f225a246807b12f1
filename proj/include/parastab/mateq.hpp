#pragma once

#include <optional>
#include <vector>

#include "parastab/types.hpp"

namespace parastab {

/// Upper-triangular Cholesky factor R with Z = R^T R. Throws
/// NotPositiveDefinite when Z is not positive definite.
Matrix cholesky_factor(const Matrix& Z);

/// Non-throwing variant; empty optional when Z is not positive definite.
/// The Riccati sweep uses the failure as its step-halving trigger.
std::optional<Matrix> try_cholesky_factor(const Matrix& Z);

/// Largest real part over the eigenvalues of A.
double spectral_abscissa(const Matrix& A);

/// Largest singular value; uses a symmetric eigensolve when A is symmetric.
double spectral_norm(const Matrix& A);

/// Solves A^T X + X A + Q = 0 for symmetric Q and stable A via Schur
/// back-substitution. The result is symmetrized; the relative residual
/// |A^T X + X A + Q| / max(1, |X|) is checked against sqrt(N * eps).
Matrix solve_lyapunov(const Matrix& A, const Matrix& Q);

/// Data of the algebraic Riccati equation
///   X^T Pi + Pi X - Pi B B^T Pi + Csq = 0.
struct AreProblem {
  Matrix X;
  Matrix B;
  Matrix Csq;                  // symmetric positive semidefinite
  std::optional<Matrix> guess; // symmetric PSD, stabilizing; zero when absent
};

struct AreSolution {
  Matrix Pi;
  double residual = 0.0;  // relative residual at return
  int newton_steps = 0;
  std::vector<double> residual_history;  // residual after each Newton update
};

/// Kleinman's Newton iteration. Each step solves one Lyapunov equation with
/// the current closed-loop matrix; iterates are symmetrized. Stops when
/// |T(Pi)| / max(1, |Pi|) < tol in the spectral norm (tol <= 0 selects
/// sqrt(N * eps)). A guess whose residual already meets tol is returned
/// unchanged with newton_steps = 0.
AreSolution newton_kleinman(const AreProblem& prob, double tol = 0.0, int max_iter = 50);

/// Continuation grid {0, delta_s, 2 delta_s, ...} clipped to [0, 1], with 1
/// appended when the grid does not land on it.
std::vector<double> homotopy_schedule(double delta_s);

/// Continuation from the pure-diffusion equation to the target one: solves
/// the ARE chain for X_s = -A_diffusion - s R, R = -A_diffusion - X_target,
/// feeding each solution to the next solve as its guess (zero at s = 0).
AreSolution homotopy_are(const Matrix& X_target, const Matrix& B, const Matrix& Csq,
                         double delta_s, const Matrix& A_diffusion);

} // namespace parastab
