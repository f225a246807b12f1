#pragma once

#include <vector>

#include "parastab/coefficients.hpp"
#include "parastab/feedback.hpp"
#include "parastab/fem.hpp"
#include "parastab/mesh.hpp"
#include "parastab/types.hpp"

namespace parastab {

/// Closed-loop trajectory record on the uniform grid t_j = (j - 1) k.
/// `inputs` is (number of nodes) x m0 and has zero columns for free dynamics;
/// `cost` is the running trapezoidal cost, starting at 0. States are kept
/// only on request.
struct SimulationTrace {
  std::vector<double> times;
  std::vector<double> norms;   // |y(t_j)| in the mass-matrix inner product
  std::vector<double> cost;
  Matrix inputs;
  std::vector<Vector> states;
};

/// One step of the implicit-explicit scheme: diffusion and reaction are
/// treated by the trapezoidal rule, convection and forcing by two-step
/// extrapolation:
///   (2M + k S_nu + k L0_next) y_next =
///     (2M - k S_nu - k L0_cur) y_cur - k (3 L1_cur y_cur - L1_prev y_prev)
///     + k (3 F_cur - F_prev).
/// F_cur and F_prev arrive pre-multiplied, i.e. as M U u vectors.
Vector imex_step(const SparseMatrix& M, const SparseMatrix& S_nu,
                 const SparseMatrix& L0_next, const SparseMatrix& L0_cur,
                 const SparseMatrix& L1_cur, const SparseMatrix& L1_prev,
                 const Vector& F_cur, const Vector& F_prev, const Vector& y_cur,
                 const Vector& y_prev, double k);

/// Closed-loop (or free) simulation over [0, horizon]. Startup uses the ghost
/// rules y_0 = y(0) and u_0 = u_1. `beta` enters only the recorded cost.
SimulationTrace run_simulation(const CoefficientSet& coeffs, const Triangulation& mesh,
                               const FemOperators& ops, const FeedbackLaw& law,
                               double horizon, double k, double beta = 1.0,
                               bool keep_states = false);

/// Trapezoidal value of the truncated quadratic cost
/// integral of (|y|^2 + beta |u|^2) / 2 over the trace's grid.
double truncated_cost(const SimulationTrace& trace, double beta);

/// Least-squares fit of log |y(t)| ~ log rho - mu t over the trailing
/// `window` fraction of the horizon. `residual` is the RMS misfit.
struct DecayFit {
  double rho = 0.0;
  double mu = 0.0;
  double window = 0.0;
  double residual = 0.0;
};

DecayFit fit_decay_rate(const SimulationTrace& trace, double window = 0.5);

/// Law choice for the uncontrollable-mode experiment.
enum class ModeCheckLaw { zero, oblique };

/// Runs the constant-reaction system from y0 = cos(pi x1) cos(pi x2) with a
/// single centered actuator of coverage r and returns the fitted exponential
/// rate of the mass-orthogonal projection of the state onto that mode
/// (positive = growth). The projection is invisible to the actuator, so the
/// rate is the same with and without feedback.
double uncontrollable_mode_check(double c, double r, const Triangulation& mesh, double nu,
                                 double horizon, double k,
                                 ModeCheckLaw law_kind = ModeCheckLaw::zero,
                                 double lambda = 1.0);

} // namespace parastab
