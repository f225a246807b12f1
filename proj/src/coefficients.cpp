#include "parastab/coefficients.hpp"

#include <cmath>
#include <numbers>

#include "parastab/errors.hpp"

namespace parastab {

CoefficientSet paper_coefficients() {
  CoefficientSet c;
  c.name = "paper2d";
  c.a = [](double x1, double, double t) {
    return -2.5 + x1 - std::abs(std::sin(6.0 * t + x1));
  };
  c.b = [](double x1, double x2, double t) {
    return std::array<double, 2>{x1 + x2, std::abs(std::cos(6.0 * t) * x1 * x2)};
  };
  c.y0 = [](double x1, double x2) { return 1.0 - 2.0 * x1 * x2; };
  c.period = std::numbers::pi / 6.0;
  return c;
}

CoefficientSet constant_reaction(double cval) {
  CoefficientSet c;
  c.name = "autonomous_const";
  c.a = [cval](double, double, double) { return cval; };
  c.b = [](double, double, double) { return std::array<double, 2>{0.0, 0.0}; };
  c.y0 = [](double x1, double x2) {
    return std::cos(std::numbers::pi * x1) * std::cos(std::numbers::pi * x2);
  };
  c.period = 0.0;
  return c;
}

CoefficientSet pure_diffusion_coefficients() {
  CoefficientSet c;
  c.name = "pure_diffusion";
  c.a = [](double, double, double) { return 0.0; };
  c.b = [](double, double, double) { return std::array<double, 2>{0.0, 0.0}; };
  c.y0 = [](double, double) { return 1.0; };
  c.period = 0.0;
  return c;
}

CoefficientSet coefficients_by_name(const std::string& name, double c) {
  if (name == "paper2d") return paper_coefficients();
  if (name == "autonomous_const") return constant_reaction(c);
  if (name == "pure_diffusion") return pure_diffusion_coefficients();
  throw InvalidArgument("unknown coefficient family: " + name);
}

Vector evaluate_coefficient(const CoefficientSet& coeffs, std::string_view field,
                            const Triangulation& mesh, double t) {
  const Index n = mesh.nodes.rows();
  Vector out(n);
  if (field == "a") {
    for (Index i = 0; i < n; ++i) out(i) = coeffs.a(mesh.nodes(i, 0), mesh.nodes(i, 1), t);
  } else if (field == "b1" || field == "b2") {
    const int comp = field == "b1" ? 0 : 1;
    for (Index i = 0; i < n; ++i) out(i) = coeffs.b(mesh.nodes(i, 0), mesh.nodes(i, 1), t)[comp];
  } else if (field == "y0") {
    for (Index i = 0; i < n; ++i) out(i) = coeffs.y0(mesh.nodes(i, 0), mesh.nodes(i, 1));
  } else {
    throw InvalidArgument("evaluate_coefficient: unknown field '" + std::string(field) + "'");
  }
  return out;
}

} // namespace parastab
