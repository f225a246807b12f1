#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "parastab/types.hpp"

namespace parastab {

/// Conforming triangulation of the unit square. Triangles are
/// counterclockwise index triples into `nodes`.
struct Triangulation {
  Eigen::Matrix<double, Eigen::Dynamic, 2> nodes;
  std::vector<std::array<int, 3>> triangles;
  int level = 0;              // number of regular refinements applied
  int parent_node_count = 0;  // node count of the mesh this one refines (0 at level 0)

  int node_count() const { return static_cast<int>(nodes.rows()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
};

/// Uniform mesh with (n+1)^2 grid nodes and 2 n^2 triangles; every grid cell
/// is split along its lower-left to upper-right diagonal.
Triangulation build_unit_square_mesh(int n);

/// Regular (red) refinement: each triangle is replaced by the four congruent
/// children obtained by connecting edge midpoints. Parent nodes keep their
/// indices; midpoint nodes are appended in first-encounter order.
Triangulation refine_regular(const Triangulation& mesh);

/// Selection of coarse-node values out of a nested fine mesh. Because
/// refinement appends nodes, the map is simply "take the first coarse_n
/// entries"; `matrix()` materializes the [I | 0] block when a dense
/// operator is convenient.
struct RestrictionMap {
  int coarse_n = 0;
  int fine_n = 0;

  Vector apply(const Vector& fine) const;
  Matrix matrix() const;
};

/// Builds the restriction from `coarse` to `fine`. `fine` must have been
/// produced from `coarse` by zero or more regular refinements.
RestrictionMap coarse_to_fine_restriction(const Triangulation& coarse,
                                          const Triangulation& fine);

double triangle_area(const Triangulation& mesh, int t);

/// Plain-text export: a node table ("index x1 x2") followed by a triangle
/// table ("index v0 v1 v2").
void write_mesh_text(const Triangulation& mesh, std::ostream& out);

} // namespace parastab
