#pragma once

#include <functional>
#include <string>
#include <vector>

#include "parastab/fem.hpp"
#include "parastab/mateq.hpp"
#include "parastab/types.hpp"

namespace parastab {

/// Dense system matrix X(t) = -M^{-1} (S_nu + L0 + L1) + mu_bar I for the
/// shifted dynamics used by the Riccati solver.
Matrix system_matrix(const FemOperators& ops, const SparseMatrix& L0,
                     const SparseMatrix& L1, double mu_bar);

/// One backward pass of the differential Riccati equation over [tau, tau + varpi].
/// `times` ascend from tau to tau + varpi; Pi_list[r] belongs to times[r].
struct DreSweep {
  std::vector<double> times;
  std::vector<Matrix> Pi_list;
  double k_requested = 0.0;  // step the caller asked for
  double k_base = 0.0;       // varpi / floor(varpi / k_requested)
  int halvings = 0;          // rejected-step count over the whole sweep
};

/// Implicit backward sweep: every accepted step solves one algebraic Riccati
/// equation whose constant term bundles the previous iterate. A step is
/// rejected (and halved, without moving the current time) whenever that
/// constant term fails its Cholesky test; after an accepted step the size
/// resets to k_base. Halving below k_base * 2^-20 throws StepCollapse.
DreSweep dre_backward(const std::function<Matrix(double)>& Xfun, const Matrix& B,
                      const Matrix& Csq, const Matrix& Pi_end, double tau,
                      double varpi, double k_ric);

/// Feedback gains K(t) = -beta^{-1} U^T Pi(t) sampled on a sweep's time mesh,
/// plus the cost-to-go matrix at tau. Gains are m0 x coarse_node_count.
struct RiccatiGainTable {
  std::vector<double> times;
  std::vector<Matrix> gains;
  Matrix Pi_tau;
  double tau = 0.0;
  double period = 0.0;
  double beta = 1.0;
  int coarse_node_count = 0;

  int m0() const { return gains.empty() ? 0 : static_cast<int>(gains.front().rows()); }
};

RiccatiGainTable gain_table(const DreSweep& sweep, const Matrix& U, double beta);

struct PeriodicRiccatiResult {
  RiccatiGainTable table;
  std::vector<double> error_history;  // |Pi_n(tau) - Pi_n(tau + varpi)| per pass
  int halvings = 0;
};

/// Periodic Riccati solver: seeds the terminal condition with the homotopy
/// ARE solution at t = tau + varpi, then repeats backward sweeps, feeding
/// each pass's value at tau back in as the next terminal condition, until
/// consecutive passes differ by at most epsilon in the spectral norm.
/// Throws NoConvergence (with the error history) after n_max passes.
PeriodicRiccatiResult periodic_riccati(const std::function<Matrix(double)>& Xfun,
                                       const Matrix& U, double beta, const Matrix& Csq,
                                       double tau, double varpi, double k_ric,
                                       double epsilon, int n_max, double delta_s,
                                       const Matrix& A_diffusion);

/// Single-file persistence: one JSON header line carrying dimensions and a
/// format-version string, followed by raw little-endian float64 blocks
/// (times, gains row-major, Pi_tau row-major). Round-trips bit-exactly.
void save_gain_table(const RiccatiGainTable& table, const std::string& path);
RiccatiGainTable load_gain_table(const std::string& path);

} // namespace parastab
