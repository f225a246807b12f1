#pragma once

#include <variant>

#include "parastab/actuators.hpp"
#include "parastab/fem.hpp"
#include "parastab/mesh.hpp"
#include "parastab/riccati.hpp"
#include "parastab/types.hpp"

namespace parastab {

/// Free dynamics, no input.
struct NoLaw {};

/// Explicit oblique-projection feedback with exponent lambda, computed
/// online from the current operators. The basis lives on the simulation mesh.
struct ObliqueLaw {
  ActuatorBasis basis;
  double lambda = 1.0;
};

/// Gain-table feedback. `xi` restricts simulation-mesh states to the coarse
/// nodes the table was computed on; `U` is the actuator matrix on the
/// simulation mesh (used for the forcing term).
struct RiccatiLaw {
  RiccatiGainTable table;
  RestrictionMap xi;
  Matrix U;
};

using FeedbackLaw = std::variant<NoLaw, ObliqueLaw, RiccatiLaw>;

/// Number of control inputs the law produces (0 for NoLaw).
int law_input_count(const FeedbackLaw& law);

/// u = V~^{-1} E^T (S_nu + L0 + L1 - lambda M) y.
Vector oblique_input(const ActuatorBasis& basis, const FemOperators& ops,
                     const SparseMatrix& L0, const SparseMatrix& L1, double lambda,
                     const Vector& y);

/// Periodic-in-time gain lookup: wraps t into the table's period, brackets it
/// on the stored time mesh, linearly interpolates the two gains, and applies
/// the result to the restricted state. Requires t >= 0.
Vector riccati_input(const RiccatiGainTable& table, const RestrictionMap& xi,
                     const Vector& y, double t);

/// Forcing vector M U u of an input through the actuator indicators.
Vector control_to_forcing(const Matrix& U, const SparseMatrix& mass, const Vector& u);

} // namespace parastab
