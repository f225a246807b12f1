#include "parastab/simulate.hpp"

#include <cmath>
#include <utility>

#include "parastab/errors.hpp"

namespace parastab {

namespace {

// Shared by imex_step and the simulation loop so both factor the identical
// left-hand matrix.
SparseMatrix imex_lhs(const SparseMatrix& M, const SparseMatrix& S_nu,
                      const SparseMatrix& L0_next, double k) {
  SparseMatrix lhs = 2.0 * M + k * S_nu;
  lhs += SparseMatrix(k * L0_next);
  lhs.makeCompressed();
  return lhs;
}

Vector imex_rhs(const SparseMatrix& M, const SparseMatrix& S_nu,
                const SparseMatrix& L0_cur, const SparseMatrix& L1_cur,
                const SparseMatrix& L1_prev, const Vector& F_cur, const Vector& F_prev,
                const Vector& y_cur, const Vector& y_prev, double k) {
  Vector rhs = 2.0 * (M * y_cur);
  rhs -= k * (S_nu * y_cur);
  rhs -= k * (L0_cur * y_cur);
  rhs -= k * (3.0 * (L1_cur * y_cur) - L1_prev * y_prev);
  rhs += k * (3.0 * F_cur - F_prev);
  return rhs;
}

} // namespace

Vector imex_step(const SparseMatrix& M, const SparseMatrix& S_nu,
                 const SparseMatrix& L0_next, const SparseMatrix& L0_cur,
                 const SparseMatrix& L1_cur, const SparseMatrix& L1_prev,
                 const Vector& F_cur, const Vector& F_prev, const Vector& y_cur,
                 const Vector& y_prev, double k) {
  if (!(k > 0.0)) throw InvalidArgument("imex_step: k must be positive");
  if (y_cur.size() != M.rows() || y_prev.size() != M.rows() ||
      F_cur.size() != M.rows() || F_prev.size() != M.rows())
    throw InvalidArgument("imex_step: vector length mismatch");

  Eigen::SimplicialLLT<SparseMatrix> solver(imex_lhs(M, S_nu, L0_next, k));
  if (solver.info() != Eigen::Success)
    throw NumericalError("imex_step: left-hand matrix is not positive definite");
  return solver.solve(
      imex_rhs(M, S_nu, L0_cur, L1_cur, L1_prev, F_cur, F_prev, y_cur, y_prev, k));
}

SimulationTrace run_simulation(const CoefficientSet& coeffs, const Triangulation& mesh,
                               const FemOperators& ops, const FeedbackLaw& law,
                               double horizon, double k, double beta,
                               bool keep_states) {
  if (!(horizon > 0.0)) throw InvalidArgument("run_simulation: horizon must be positive");
  if (!(k > 0.0) || k > horizon)
    throw InvalidArgument("run_simulation: k must lie in (0, horizon]");
  if (!(beta > 0.0)) throw InvalidArgument("run_simulation: beta must be positive");
  if (ops.mass.rows() != mesh.node_count())
    throw InvalidArgument("run_simulation: operators do not match the mesh");

  const Index n = ops.mass.rows();
  const auto nsteps = static_cast<std::size_t>(std::llround(horizon / k));
  const std::size_t nnodes = std::max<std::size_t>(nsteps, 1) + 1;
  const int m0 = law_input_count(law);
  const bool autonomous = coeffs.period == 0.0;

  const auto l0_at = [&](double t) {
    return reaction_matrix(ops.mass, evaluate_coefficient(coeffs, "a", mesh, t));
  };
  const auto l1_at = [&](double t) {
    return convection_matrix(ops.g_x1, ops.g_x2,
                             evaluate_coefficient(coeffs, "b1", mesh, t),
                             evaluate_coefficient(coeffs, "b2", mesh, t));
  };

  const auto input_at = [&](double t, const Vector& y) -> Vector {
    if (const auto* ob = std::get_if<ObliqueLaw>(&law))
      return oblique_input(ob->basis, ops, l0_at(t), l1_at(t), ob->lambda, y);
    if (const auto* rc = std::get_if<RiccatiLaw>(&law))
      return riccati_input(rc->table, rc->xi, y, t);
    return Vector::Zero(0);
  };
  const auto forcing_of = [&](const Vector& u) -> Vector {
    if (const auto* ob = std::get_if<ObliqueLaw>(&law))
      return control_to_forcing(ob->basis.U, ops.mass, u);
    if (const auto* rc = std::get_if<RiccatiLaw>(&law))
      return control_to_forcing(rc->U, ops.mass, u);
    return Vector::Zero(n);
  };

  SimulationTrace trace;
  trace.times.resize(nnodes);
  trace.norms.resize(nnodes);
  trace.cost.resize(nnodes);
  trace.inputs.resize(static_cast<Index>(nnodes), m0);
  if (keep_states) trace.states.reserve(nnodes);

  Vector y = evaluate_coefficient(coeffs, "y0", mesh, 0.0);
  Vector y_prev = y;  // ghost state equals the initial state
  Vector u = input_at(0.0, y);
  Vector f = forcing_of(u);
  Vector f_prev = f;  // ghost input equals the first input

  SparseMatrix l0_cur = l0_at(0.0);
  SparseMatrix l1_cur = l1_at(0.0);
  SparseMatrix l1_prev = l1_cur;

  // For autonomous coefficients the left-hand matrix never changes, so it is
  // factored exactly once.
  Eigen::SimplicialLLT<SparseMatrix> cached_solver;
  if (autonomous) {
    cached_solver.compute(imex_lhs(ops.mass, ops.s_nu, l0_cur, k));
    if (cached_solver.info() != Eigen::Success)
      throw NumericalError("run_simulation: left-hand matrix is not positive definite");
  }

  const auto record = [&](std::size_t j, double t) {
    trace.times[j] = t;
    trace.norms[j] = std::sqrt(y.dot(ops.mass * y));
    trace.inputs.row(static_cast<Index>(j)) = u.transpose();
    const double g = 0.5 * (trace.norms[j] * trace.norms[j] + beta * u.squaredNorm());
    if (j == 0) {
      trace.cost[j] = 0.0;
    } else {
      const double g_prev =
          0.5 * (trace.norms[j - 1] * trace.norms[j - 1] +
                 beta * trace.inputs.row(static_cast<Index>(j - 1)).squaredNorm());
      trace.cost[j] = trace.cost[j - 1] + 0.5 * (trace.times[j] - trace.times[j - 1]) * (g + g_prev);
    }
    if (keep_states) trace.states.push_back(y);
  };

  record(0, 0.0);
  for (std::size_t j = 1; j < nnodes; ++j) {
    const double t_cur = static_cast<double>(j - 1) * k;
    const double t_next = static_cast<double>(j) * k;
    const SparseMatrix l0_next = autonomous ? l0_cur : l0_at(t_next);

    Vector y_next;
    const Vector rhs = imex_rhs(ops.mass, ops.s_nu, l0_cur, l1_cur, l1_prev, f, f_prev,
                                y, y_prev, k);
    if (autonomous) {
      y_next = cached_solver.solve(rhs);
    } else {
      Eigen::SimplicialLLT<SparseMatrix> solver(imex_lhs(ops.mass, ops.s_nu, l0_next, k));
      if (solver.info() != Eigen::Success)
        throw NumericalError("run_simulation: left-hand matrix is not positive definite at t = " +
                             std::to_string(t_next));
      y_next = solver.solve(rhs);
    }

    y_prev = std::move(y);
    y = std::move(y_next);
    if (!autonomous) {
      l0_cur = l0_next;
      l1_prev = std::move(l1_cur);
      l1_cur = l1_at(t_next);
    }
    f_prev = std::move(f);
    u = input_at(t_next, y);
    f = forcing_of(u);
    record(j, t_next);
  }
  return trace;
}

double truncated_cost(const SimulationTrace& trace, double beta) {
  if (trace.times.size() < 2) throw InvalidArgument("truncated_cost: trace too short");
  if (!(beta > 0.0)) throw InvalidArgument("truncated_cost: beta must be positive");
  double total = 0.0;
  double g_prev = 0.0;
  for (std::size_t j = 0; j < trace.times.size(); ++j) {
    const double u2 = trace.inputs.cols() > 0
                          ? trace.inputs.row(static_cast<Index>(j)).squaredNorm()
                          : 0.0;
    const double g = 0.5 * (trace.norms[j] * trace.norms[j] + beta * u2);
    if (j > 0) total += 0.5 * (trace.times[j] - trace.times[j - 1]) * (g + g_prev);
    g_prev = g;
  }
  return total;
}

DecayFit fit_decay_rate(const SimulationTrace& trace, double window) {
  if (!(window > 0.0) || window > 1.0)
    throw InvalidArgument("fit_decay_rate: window must lie in (0, 1]");
  if (trace.times.size() < 2) throw InvalidArgument("fit_decay_rate: trace too short");

  const double t_end = trace.times.back();
  const double t_start = t_end - window * (t_end - trace.times.front());
  std::vector<double> ts, logs;
  for (std::size_t j = 0; j < trace.times.size(); ++j) {
    if (trace.times[j] < t_start - 1e-12) continue;
    if (!(trace.norms[j] > 0.0))
      throw InvalidArgument("fit_decay_rate: nonpositive norm inside the fit window");
    ts.push_back(trace.times[j]);
    logs.push_back(std::log(trace.norms[j]));
  }
  if (ts.size() < 2) throw InvalidArgument("fit_decay_rate: fewer than two samples in window");

  const auto np = static_cast<double>(ts.size());
  double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sl += logs[i];
    stt += ts[i] * ts[i];
    stl += ts[i] * logs[i];
  }
  const double denom = np * stt - st * st;
  if (denom == 0.0) throw InvalidArgument("fit_decay_rate: degenerate time samples");
  const double slope = (np * stl - st * sl) / denom;
  const double intercept = (sl - slope * st) / np;

  DecayFit fit;
  fit.mu = -slope;
  fit.rho = std::exp(intercept);
  fit.window = window;
  double ss = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = logs[i] - (intercept + slope * ts[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / np);
  return fit;
}

double uncontrollable_mode_check(double c, double r, const Triangulation& mesh, double nu,
                                 double horizon, double k, ModeCheckLaw law_kind,
                                 double lambda) {
  const CoefficientSet coeffs = constant_reaction(c);
  const FemOperators ops = assemble_fem_operators(mesh, nu);
  const ActuatorLayout layout = actuator_layout(1, r);

  FeedbackLaw law = NoLaw{};
  if (law_kind == ModeCheckLaw::oblique)
    law = ObliqueLaw{build_actuator_basis(mesh, layout, ops.mass, 1.0), lambda};

  SimulationTrace trace =
      run_simulation(coeffs, mesh, ops, law, horizon, k, 1.0, /*keep_states=*/true);

  // The initial state is the mode itself, so its projection coefficient is
  // the trajectory of interest.
  const Vector z0 = evaluate_coefficient(coeffs, "y0", mesh, 0.0);
  const Vector mz0 = ops.mass * z0;
  const double denom = z0.dot(mz0);

  SimulationTrace proj;
  proj.times = trace.times;
  proj.norms.resize(trace.times.size());
  for (std::size_t j = 0; j < trace.states.size(); ++j)
    proj.norms[j] = std::abs(trace.states[j].dot(mz0)) / denom;
  const DecayFit fit = fit_decay_rate(proj, 0.5);
  return -fit.mu;  // positive = growth
}

} // namespace parastab
