#include "parastab/fem.hpp"

#include <array>
#include <vector>

#include "parastab/errors.hpp"

namespace parastab {

namespace {

using Triplet = Eigen::Triplet<double>;

// Per-triangle geometry used by every assembler: vertex ids, signed area,
// and the gradient coefficients of the three hat functions,
//   grad h_i = (bg[i], cg[i]) / (2 A).
struct ElementGeometry {
  std::array<int, 3> v;
  double area;
  std::array<double, 3> bg;
  std::array<double, 3> cg;
};

ElementGeometry element_geometry(const Triangulation& mesh, int t) {
  ElementGeometry g;
  g.v = mesh.triangles[static_cast<std::size_t>(t)];
  const double x[3] = {mesh.nodes(g.v[0], 0), mesh.nodes(g.v[1], 0), mesh.nodes(g.v[2], 0)};
  const double y[3] = {mesh.nodes(g.v[0], 1), mesh.nodes(g.v[1], 1), mesh.nodes(g.v[2], 1)};
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    g.bg[i] = y[j] - y[k];
    g.cg[i] = x[k] - x[j];
  }
  g.area = 0.5 * ((x[1] - x[0]) * (y[2] - y[0]) - (x[2] - x[0]) * (y[1] - y[0]));
  if (!(g.area > 0.0)) throw InvalidArgument("assembly: degenerate or misoriented triangle");
  return g;
}

SparseMatrix from_triplets(int n, const std::vector<Triplet>& trips) {
  SparseMatrix a(n, n);
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();
  return a;
}

} // namespace

SparseMatrix assemble_mass(const Triangulation& mesh) {
  const int n = mesh.node_count();
  std::vector<Triplet> trips;
  trips.reserve(mesh.triangles.size() * 9);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto g = element_geometry(mesh, t);
    const double diag = g.area / 6.0, off = g.area / 12.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trips.emplace_back(g.v[i], g.v[j], i == j ? diag : off);
  }
  return from_triplets(n, trips);
}

SparseMatrix assemble_stiffness(const Triangulation& mesh) {
  const int n = mesh.node_count();
  std::vector<Triplet> trips;
  trips.reserve(mesh.triangles.size() * 9);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto g = element_geometry(mesh, t);
    const double scale = 1.0 / (4.0 * g.area);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trips.emplace_back(g.v[i], g.v[j], scale * (g.bg[i] * g.bg[j] + g.cg[i] * g.cg[j]));
  }
  return from_triplets(n, trips);
}

SparseMatrix assemble_directional(const Triangulation& mesh, int axis) {
  if (axis != 1 && axis != 2)
    throw InvalidArgument("assemble_directional: axis must be 1 or 2");
  const int n = mesh.node_count();
  std::vector<Triplet> trips;
  trips.reserve(mesh.triangles.size() * 9);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto g = element_geometry(mesh, t);
    // d h_j / d x_axis is constant on the element and integral of h_i is A/3,
    // so the entry is independent of which row it lands in.
    for (int j = 0; j < 3; ++j) {
      const double val = (axis == 1 ? g.bg[j] : g.cg[j]) / 6.0;
      for (int i = 0; i < 3; ++i) trips.emplace_back(g.v[i], g.v[j], val);
    }
  }
  return from_triplets(n, trips);
}

FemOperators assemble_fem_operators(const Triangulation& mesh, double nu) {
  if (!(nu > 0.0)) throw InvalidArgument("assemble_fem_operators: nu must be positive");
  FemOperators ops;
  ops.nu = nu;
  ops.mass = assemble_mass(mesh);
  ops.stiffness = assemble_stiffness(mesh);
  ops.s_nu = nu * ops.stiffness + ops.mass;
  ops.g_x1 = assemble_directional(mesh, 1);
  ops.g_x2 = assemble_directional(mesh, 2);
  return ops;
}

SparseMatrix reaction_matrix(const SparseMatrix& mass, const Vector& a_nodal) {
  if (a_nodal.size() != mass.rows())
    throw InvalidArgument("reaction_matrix: nodal vector length mismatch");
  SparseMatrix l0(mass.rows(), mass.cols());
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(mass.nonZeros()));
  for (int k = 0; k < mass.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(mass, k); it; ++it)
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                         0.5 * it.value() * (a_nodal(it.col()) + a_nodal(it.row())));
  l0.setFromTriplets(trips.begin(), trips.end());
  l0.makeCompressed();
  return l0;
}

SparseMatrix convection_matrix(const SparseMatrix& g_x1, const SparseMatrix& g_x2,
                               const Vector& b1_nodal, const Vector& b2_nodal) {
  if (b1_nodal.size() != g_x1.rows() || b2_nodal.size() != g_x2.rows())
    throw InvalidArgument("convection_matrix: nodal vector length mismatch");
  SparseMatrix l1 = b1_nodal.asDiagonal() * g_x1;
  l1 += SparseMatrix(b2_nodal.asDiagonal() * g_x2);
  l1.makeCompressed();
  return l1;
}

} // namespace parastab
