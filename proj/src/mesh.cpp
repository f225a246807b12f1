#include "parastab/mesh.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <utility>

#include "parastab/errors.hpp"

namespace parastab {

Triangulation build_unit_square_mesh(int n) {
  if (n < 1) throw InvalidArgument("build_unit_square_mesh: n must be >= 1");
  const int npx = n + 1;
  Triangulation mesh;
  mesh.nodes.resize(static_cast<Index>(npx) * npx, 2);
  for (int j = 0; j < npx; ++j) {
    for (int i = 0; i < npx; ++i) {
      const Index id = static_cast<Index>(j) * npx + i;
      mesh.nodes(id, 0) = static_cast<double>(i) / n;
      mesh.nodes(id, 1) = static_cast<double>(j) / n;
    }
  }
  mesh.triangles.reserve(static_cast<std::size_t>(2) * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = j * npx + i;
      const int v10 = j * npx + i + 1;
      const int v01 = (j + 1) * npx + i;
      const int v11 = (j + 1) * npx + i + 1;
      // Both triangles share the v00-v11 diagonal and are counterclockwise.
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }
  mesh.level = 0;
  mesh.parent_node_count = 0;
  return mesh;
}

Triangulation refine_regular(const Triangulation& mesh) {
  if (mesh.node_count() == 0 || mesh.triangle_count() == 0)
    throw InvalidArgument("refine_regular: empty mesh");

  Triangulation fine;
  const int coarse_nodes = mesh.node_count();
  std::vector<std::array<double, 2>> new_nodes;
  std::map<std::pair<int, int>, int> midpoint;

  auto midpoint_id = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int id = coarse_nodes + static_cast<int>(new_nodes.size());
    new_nodes.push_back({0.5 * (mesh.nodes(a, 0) + mesh.nodes(b, 0)),
                         0.5 * (mesh.nodes(a, 1) + mesh.nodes(b, 1))});
    midpoint.emplace(key, id);
    return id;
  };

  fine.triangles.reserve(mesh.triangles.size() * 4);
  for (const auto& tri : mesh.triangles) {
    const int a = tri[0], b = tri[1], c = tri[2];
    const int ab = midpoint_id(a, b);
    const int bc = midpoint_id(b, c);
    const int ca = midpoint_id(c, a);
    fine.triangles.push_back({a, ab, ca});
    fine.triangles.push_back({ab, b, bc});
    fine.triangles.push_back({ca, bc, c});
    fine.triangles.push_back({ab, bc, ca});
  }

  fine.nodes.resize(coarse_nodes + static_cast<Index>(new_nodes.size()), 2);
  fine.nodes.topRows(coarse_nodes) = mesh.nodes;
  for (std::size_t i = 0; i < new_nodes.size(); ++i) {
    fine.nodes(coarse_nodes + static_cast<Index>(i), 0) = new_nodes[i][0];
    fine.nodes(coarse_nodes + static_cast<Index>(i), 1) = new_nodes[i][1];
  }
  fine.level = mesh.level + 1;
  fine.parent_node_count = coarse_nodes;
  return fine;
}

Vector RestrictionMap::apply(const Vector& fine) const {
  if (fine.size() != fine_n)
    throw InvalidArgument("RestrictionMap::apply: vector length mismatch");
  return fine.head(coarse_n);
}

Matrix RestrictionMap::matrix() const {
  Matrix xi = Matrix::Zero(coarse_n, fine_n);
  xi.leftCols(coarse_n).setIdentity();
  return xi;
}

RestrictionMap coarse_to_fine_restriction(const Triangulation& coarse,
                                          const Triangulation& fine) {
  if (fine.level < coarse.level)
    throw InvalidArgument("coarse_to_fine_restriction: fine mesh is coarser");
  const int gap = fine.level - coarse.level;
  const auto expected_tris =
      static_cast<std::int64_t>(coarse.triangle_count()) * (std::int64_t{1} << (2 * gap));
  if (fine.triangle_count() != expected_tris ||
      fine.node_count() < coarse.node_count())
    throw InvalidArgument("coarse_to_fine_restriction: meshes are not nested");
  // Nesting means coarse nodes survive verbatim as the leading fine nodes.
  if (!fine.nodes.topRows(coarse.node_count()).isApprox(coarse.nodes, 0.0))
    throw InvalidArgument("coarse_to_fine_restriction: meshes are not nested");
  return RestrictionMap{coarse.node_count(), fine.node_count()};
}

double triangle_area(const Triangulation& mesh, int t) {
  const auto& tri = mesh.triangles.at(static_cast<std::size_t>(t));
  const double x0 = mesh.nodes(tri[0], 0), y0 = mesh.nodes(tri[0], 1);
  const double x1 = mesh.nodes(tri[1], 0), y1 = mesh.nodes(tri[1], 1);
  const double x2 = mesh.nodes(tri[2], 0), y2 = mesh.nodes(tri[2], 1);
  return 0.5 * ((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0));
}

void write_mesh_text(const Triangulation& mesh, std::ostream& out) {
  out << "nodes " << mesh.node_count() << "\n";
  out.precision(17);
  for (Index i = 0; i < mesh.nodes.rows(); ++i)
    out << i << " " << mesh.nodes(i, 0) << " " << mesh.nodes(i, 1) << "\n";
  out << "triangles " << mesh.triangle_count() << "\n";
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    out << t << " " << mesh.triangles[t][0] << " " << mesh.triangles[t][1]
        << " " << mesh.triangles[t][2] << "\n";
}

} // namespace parastab
