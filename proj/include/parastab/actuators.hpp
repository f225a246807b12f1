#pragma once

#include <vector>

#include "parastab/mesh.hpp"
#include "parastab/types.hpp"

namespace parastab {

/// Closed axis-aligned rectangle [x1_lo, x1_hi] x [x2_lo, x2_hi].
struct Box {
  double x1_lo, x1_hi, x2_lo, x2_hi;

  bool contains(double x1, double x2) const {
    return x1 >= x1_lo && x1 <= x1_hi && x2 >= x2_lo && x2 <= x2_hi;
  }
};

/// m^2 equal rectangles centered at ((2 j1 - 1) / (2 m), (2 j2 - 1) / (2 m))
/// with half-width r / (2 m) per axis, ordered lexicographically in (j1, j2).
/// Total covered area is r^2.
struct ActuatorLayout {
  int m = 0;
  double r = 0.0;
  std::vector<Box> rectangles;

  int count() const { return static_cast<int>(rectangles.size()); }
};

ActuatorLayout actuator_layout(int m, double r);

/// N x m^2 matrix of indicator columns: entry (i, j) is 1 when node i lies in
/// the closed rectangle j. Throws DegenerateActuator when a column is all
/// zero (the rectangle captured no node).
Matrix actuator_matrix(const Triangulation& mesh, const ActuatorLayout& layout);

/// N x m^2 matrix of nodal values of cos((j1-1) pi x1) cos((j2-1) pi x2) for
/// (j1, j2) in {1..m}^2, ordered lexicographically; the first column is the
/// constant 1.
Matrix eigenfunction_matrix(const Triangulation& mesh, int m);

/// Coupling matrix V~ = E^T M U between auxiliary functions and actuator
/// indicators. Throws ObliqueProjectionUndefined when V~ is numerically
/// singular (reciprocal condition below sqrt(eps)).
Matrix oblique_coupling(const Matrix& E, const SparseMatrix& mass, const Matrix& U);

/// Everything the oblique feedback needs on one mesh.
struct ActuatorBasis {
  Matrix U;    // indicator columns
  Matrix E;    // auxiliary eigenfunction columns
  Matrix Vt;   // E^T M U
  double beta = 1.0;

  int m0() const { return static_cast<int>(U.cols()); }
};

ActuatorBasis build_actuator_basis(const Triangulation& mesh, const ActuatorLayout& layout,
                                   const SparseMatrix& mass, double beta);

/// Oblique projection onto span(U) along the M-orthogonal complement of
/// span(E): P y = U V~^{-1} E^T M y.
Vector oblique_project(const ActuatorBasis& basis, const SparseMatrix& mass, const Vector& y);

/// Dense M-orthogonal projector onto span(Ef): Ef (Ef^T M Ef)^{-1} Ef^T M.
Matrix orthogonal_projection_matrix(const Matrix& Ef, const SparseMatrix& mass);

} // namespace parastab
