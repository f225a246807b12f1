#include "parastab/mateq.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "parastab/errors.hpp"

namespace parastab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double default_tol(Index n) { return std::sqrt(static_cast<double>(n) * kEps); }

void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols()) throw InvalidArgument(std::string(what) + ": matrix must be square");
}

Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

} // namespace

std::optional<Matrix> try_cholesky_factor(const Matrix& Z) {
  require_square(Z, "cholesky_factor");
  Eigen::LLT<Matrix> llt(Z);
  if (llt.info() != Eigen::Success) return std::nullopt;
  return Matrix(llt.matrixU());
}

Matrix cholesky_factor(const Matrix& Z) {
  auto r = try_cholesky_factor(Z);
  if (!r) throw NotPositiveDefinite("cholesky_factor: matrix is not positive definite");
  return std::move(*r);
}

double spectral_abscissa(const Matrix& A) {
  require_square(A, "spectral_abscissa");
  Eigen::EigenSolver<Matrix> es(A, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw NumericalError("spectral_abscissa: eigenvalue iteration failed");
  return es.eigenvalues().real().maxCoeff();
}

double spectral_norm(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  if (A.rows() == A.cols() && A.isApprox(A.transpose())) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(A, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<Matrix> svd(A);
  return svd.singularValues()(0);
}

Matrix solve_lyapunov(const Matrix& A, const Matrix& Q) {
  require_square(A, "solve_lyapunov");
  require_square(Q, "solve_lyapunov");
  if (A.rows() != Q.rows()) throw InvalidArgument("solve_lyapunov: dimension mismatch");
  const Index n = A.rows();

  // Schur form of A^T turns the equation into T Y + Y T* + F = 0 with T
  // upper triangular, solvable column by column from the last one.
  Eigen::ComplexSchur<Matrix> schur(A.transpose());
  if (schur.info() != Eigen::Success)
    throw NumericalError("solve_lyapunov: Schur decomposition failed");
  Eigen::MatrixXcd T = schur.matrixT();
  const Eigen::MatrixXcd& U = schur.matrixU();
  if (T.diagonal().real().maxCoeff() >= 0.0)
    throw NotStable("solve_lyapunov: coefficient matrix is not stable");

  Eigen::MatrixXcd F = U.adjoint() * Q * U;
  Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(n, n);
  for (Index k = n - 1; k >= 0; --k) {
    Eigen::VectorXcd rhs = F.col(k);
    if (k < n - 1)
      rhs.noalias() += Y.rightCols(n - 1 - k) * T.row(k).tail(n - 1 - k).adjoint();
    const std::complex<double> shift = std::conj(T(k, k));
    T.diagonal().array() += shift;
    Y.col(k) = T.triangularView<Eigen::Upper>().solve(-rhs);
    T.diagonal().array() -= shift;
  }

  Matrix X = symmetrized((U * Y * U.adjoint()).real());
  const double res = (A.transpose() * X + X * A + Q).norm() / std::max(1.0, X.norm());
  if (!(res <= default_tol(n)))
    throw NumericalError("solve_lyapunov: residual " + std::to_string(res) +
                         " above tolerance");
  return X;
}

AreSolution newton_kleinman(const AreProblem& prob, double tol, int max_iter) {
  require_square(prob.X, "newton_kleinman");
  require_square(prob.Csq, "newton_kleinman");
  const Index n = prob.X.rows();
  if (prob.Csq.rows() != n || prob.B.rows() != n)
    throw InvalidArgument("newton_kleinman: dimension mismatch");
  if (!prob.Csq.isApprox(prob.Csq.transpose(), 1e-12))
    throw InvalidArgument("newton_kleinman: Csq must be symmetric");
  if (max_iter < 1) throw InvalidArgument("newton_kleinman: max_iter must be >= 1");
  if (tol <= 0.0) tol = default_tol(n);

  Matrix pi = prob.guess ? symmetrized(*prob.guess) : Matrix::Zero(n, n);
  if (prob.guess && prob.guess->rows() != n)
    throw InvalidArgument("newton_kleinman: guess dimension mismatch");

  AreSolution sol;
  for (int step = 0;; ++step) {
    const Matrix pib = pi * prob.B;
    const Matrix residual_mat = symmetrized(prob.X.transpose() * pi + pi * prob.X) -
                                pib * pib.transpose() + prob.Csq;
    const double res = spectral_norm(residual_mat) / std::max(1.0, spectral_norm(pi));
    if (step > 0) sol.residual_history.push_back(res);
    if (res < tol) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(pi, Eigen::EigenvaluesOnly);
      const double min_eig = es.eigenvalues().minCoeff();
      const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
      if (min_eig < -1e-8 * std::max(1.0, scale))
        throw NumericalError("newton_kleinman: solution is not positive semidefinite");
      sol.Pi = std::move(pi);
      sol.residual = res;
      sol.newton_steps = step;
      return sol;
    }
    if (step == max_iter)
      throw NoConvergence("newton_kleinman: no convergence after " +
                              std::to_string(max_iter) + " steps",
                          sol.residual_history);

    const Matrix closed_loop = prob.X - prob.B * pib.transpose();
    const Matrix rhs = pib * pib.transpose() + prob.Csq;
    try {
      pi = solve_lyapunov(closed_loop, rhs);
    } catch (const NotStable&) {
      if (step == 0)
        throw NotStabilizingGuess("newton_kleinman: initial guess does not stabilize");
      throw NumericalError("newton_kleinman: closed loop lost stability at step " +
                           std::to_string(step));
    }
  }
}

std::vector<double> homotopy_schedule(double delta_s) {
  if (!(delta_s > 0.0) || delta_s > 1.0)
    throw InvalidArgument("homotopy_schedule: delta_s must lie in (0, 1]");
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double s = i * delta_s;
    if (s > 1.0 + 1e-12) break;
    grid.push_back(std::min(s, 1.0));
  }
  if (grid.back() < 1.0 - 1e-12) grid.push_back(1.0);
  return grid;
}

AreSolution homotopy_are(const Matrix& X_target, const Matrix& B, const Matrix& Csq,
                         double delta_s, const Matrix& A_diffusion) {
  require_square(X_target, "homotopy_are");
  require_square(A_diffusion, "homotopy_are");
  if (A_diffusion.rows() != X_target.rows())
    throw InvalidArgument("homotopy_are: dimension mismatch");

  const Matrix R = -A_diffusion - X_target;
  AreSolution sol;
  Matrix guess = Matrix::Zero(X_target.rows(), X_target.cols());
  for (double s : homotopy_schedule(delta_s)) {
    AreProblem prob;
    prob.X = -A_diffusion - s * R;
    prob.B = B;
    prob.Csq = Csq;
    prob.guess = guess;
    try {
      sol = newton_kleinman(prob);
    } catch (const NoConvergence& e) {
      throw NoConvergence("homotopy_are: solve at s = " + std::to_string(s) +
                              " did not converge: " + e.what(),
                          e.history);
    } catch (const Error& e) {
      throw NumericalError("homotopy_are: solve at s = " + std::to_string(s) +
                           " failed: " + e.what());
    }
    guess = sol.Pi;
  }
  return sol;
}

} // namespace parastab
