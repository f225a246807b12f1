#pragma once

#include "parastab/mesh.hpp"
#include "parastab/types.hpp"

namespace parastab {

/// Consistent P1 mass matrix. Entries sum to the domain area.
SparseMatrix assemble_mass(const Triangulation& mesh);

/// P1 stiffness matrix of the Laplacian with natural (Neumann) boundary
/// conditions; no rows are modified at the boundary. Row sums vanish.
SparseMatrix assemble_stiffness(const Triangulation& mesh);

/// Directional first-order matrix for axis `axis` (1 or 2), entry (m, n) =
/// integral of (d h_n / d x_axis) * h_m. Rows sum to zero.
SparseMatrix assemble_directional(const Triangulation& mesh, int axis);

/// Time-independent operator bundle for one mesh.
struct FemOperators {
  SparseMatrix mass;
  SparseMatrix stiffness;
  SparseMatrix s_nu;  // nu * stiffness + mass
  SparseMatrix g_x1;
  SparseMatrix g_x2;
  double nu = 0.0;
};

FemOperators assemble_fem_operators(const Triangulation& mesh, double nu);

/// Symmetrized lumped-coefficient reaction matrix (M D_a + D_a M) / 2, where
/// D_a is the diagonal of nodal reaction values. The coefficient enters only
/// through its nodal values.
SparseMatrix reaction_matrix(const SparseMatrix& mass, const Vector& a_nodal);

/// Convection matrix D_{b1} G_x1 + D_{b2} G_x2 built from nodal values of the
/// two convection components.
SparseMatrix convection_matrix(const SparseMatrix& g_x1, const SparseMatrix& g_x2,
                               const Vector& b1_nodal, const Vector& b2_nodal);

} // namespace parastab
