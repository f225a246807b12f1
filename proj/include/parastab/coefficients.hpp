#pragma once

#include <array>
#include <functional>
#include <string>
#include <string_view>

#include "parastab/mesh.hpp"
#include "parastab/types.hpp"

namespace parastab {

/// Reaction coefficient, convection field, and initial state of one
/// experiment, all given pointwise. `period == 0` marks an autonomous set;
/// otherwise a(., t) and b(., t) are `period`-periodic in t.
struct CoefficientSet {
  std::string name;
  std::function<double(double, double, double)> a;                  // (x1, x2, t)
  std::function<std::array<double, 2>(double, double, double)> b;   // (x1, x2, t)
  std::function<double(double, double)> y0;                         // (x1, x2)
  double period = 0.0;
};

/// Time-periodic benchmark data: a = -5/2 + x1 - |sin(6t + x1)|,
/// b = (x1 + x2, |cos(6t) x1 x2|), y0 = 1 - 2 x1 x2, period pi/6.
CoefficientSet paper_coefficients();

/// Constant reaction c, no convection, y0 = cos(pi x1) cos(pi x2).
CoefficientSet constant_reaction(double c);

/// a = 0, b = 0, y0 = 1.
CoefficientSet pure_diffusion_coefficients();

/// Lookup by family name ("paper2d", "autonomous_const", "pure_diffusion");
/// `c` only feeds autonomous_const.
CoefficientSet coefficients_by_name(const std::string& name, double c = 0.0);

/// Nodal values of one field ("a", "b1", "b2", "y0") at time t.
Vector evaluate_coefficient(const CoefficientSet& coeffs, std::string_view field,
                            const Triangulation& mesh, double t);

} // namespace parastab
