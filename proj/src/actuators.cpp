#include "parastab/actuators.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/SVD>

#include "parastab/errors.hpp"

namespace parastab {

ActuatorLayout actuator_layout(int m, double r) {
  if (m < 1) throw InvalidArgument("actuator_layout: m must be >= 1");
  if (!(r > 0.0) || r > 1.0) throw InvalidArgument("actuator_layout: r must lie in (0, 1]");
  ActuatorLayout layout;
  layout.m = m;
  layout.r = r;
  layout.rectangles.reserve(static_cast<std::size_t>(m) * m);
  const double half = r / (2.0 * m);
  for (int j1 = 1; j1 <= m; ++j1) {
    const double c1 = (2.0 * j1 - 1.0) / (2.0 * m);
    for (int j2 = 1; j2 <= m; ++j2) {
      const double c2 = (2.0 * j2 - 1.0) / (2.0 * m);
      layout.rectangles.push_back(Box{c1 - half, c1 + half, c2 - half, c2 + half});
    }
  }
  return layout;
}

Matrix actuator_matrix(const Triangulation& mesh, const ActuatorLayout& layout) {
  const Index n = mesh.nodes.rows();
  const int m0 = layout.count();
  Matrix u = Matrix::Zero(n, m0);
  for (int j = 0; j < m0; ++j) {
    const Box& box = layout.rectangles[static_cast<std::size_t>(j)];
    int hits = 0;
    for (Index i = 0; i < n; ++i) {
      if (box.contains(mesh.nodes(i, 0), mesh.nodes(i, 1))) {
        u(i, j) = 1.0;
        ++hits;
      }
    }
    if (hits == 0)
      throw DegenerateActuator("actuator_matrix: rectangle " + std::to_string(j) +
                               " contains no mesh node");
  }
  return u;
}

Matrix eigenfunction_matrix(const Triangulation& mesh, int m) {
  if (m < 1) throw InvalidArgument("eigenfunction_matrix: m must be >= 1");
  const Index n = mesh.nodes.rows();
  Matrix e(n, static_cast<Index>(m) * m);
  Index col = 0;
  for (int j1 = 1; j1 <= m; ++j1) {
    for (int j2 = 1; j2 <= m; ++j2, ++col) {
      for (Index i = 0; i < n; ++i) {
        e(i, col) = std::cos((j1 - 1) * std::numbers::pi * mesh.nodes(i, 0)) *
                    std::cos((j2 - 1) * std::numbers::pi * mesh.nodes(i, 1));
      }
    }
  }
  return e;
}

Matrix oblique_coupling(const Matrix& E, const SparseMatrix& mass, const Matrix& U) {
  if (E.rows() != mass.rows() || U.rows() != mass.rows() || E.cols() != U.cols())
    throw InvalidArgument("oblique_coupling: dimension mismatch");
  Matrix vt = E.transpose() * (mass * U);
  Eigen::JacobiSVD<Matrix> svd(vt);
  const auto& sv = svd.singularValues();
  const double tol = std::sqrt(std::numeric_limits<double>::epsilon());
  if (sv(sv.size() - 1) <= sv(0) * tol)
    throw ObliqueProjectionUndefined("oblique_coupling: coupling matrix is singular");
  return vt;
}

ActuatorBasis build_actuator_basis(const Triangulation& mesh, const ActuatorLayout& layout,
                                   const SparseMatrix& mass, double beta) {
  if (!(beta > 0.0)) throw InvalidArgument("build_actuator_basis: beta must be positive");
  ActuatorBasis basis;
  basis.U = actuator_matrix(mesh, layout);
  basis.E = eigenfunction_matrix(mesh, layout.m);
  basis.Vt = oblique_coupling(basis.E, mass, basis.U);
  basis.beta = beta;
  return basis;
}

Vector oblique_project(const ActuatorBasis& basis, const SparseMatrix& mass, const Vector& y) {
  if (y.size() != mass.rows())
    throw InvalidArgument("oblique_project: vector length mismatch");
  const Vector rhs = basis.E.transpose() * (mass * y);
  return basis.U * basis.Vt.partialPivLu().solve(rhs);
}

Matrix orthogonal_projection_matrix(const Matrix& Ef, const SparseMatrix& mass) {
  if (Ef.rows() != mass.rows())
    throw InvalidArgument("orthogonal_projection_matrix: dimension mismatch");
  const Matrix v = Ef.transpose() * (mass * Ef);
  Eigen::JacobiSVD<Matrix> svd(v);
  const auto& sv = svd.singularValues();
  const double tol = std::sqrt(std::numeric_limits<double>::epsilon());
  if (sv(sv.size() - 1) <= sv(0) * tol)
    throw InvalidArgument("orthogonal_projection_matrix: basis is numerically dependent");
  return Ef * v.ldlt().solve(Ef.transpose() * Matrix(mass));
}

} // namespace parastab
