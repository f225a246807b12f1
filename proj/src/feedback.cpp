#include "parastab/feedback.hpp"

#include <algorithm>
#include <cmath>

#include "parastab/errors.hpp"

namespace parastab {

int law_input_count(const FeedbackLaw& law) {
  if (std::holds_alternative<NoLaw>(law)) return 0;
  if (const auto* ob = std::get_if<ObliqueLaw>(&law)) return ob->basis.m0();
  return std::get<RiccatiLaw>(law).table.m0();
}

Vector oblique_input(const ActuatorBasis& basis, const FemOperators& ops,
                     const SparseMatrix& L0, const SparseMatrix& L1, double lambda,
                     const Vector& y) {
  if (y.size() != ops.mass.rows())
    throw InvalidArgument("oblique_input: state length mismatch");
  Vector w = ops.s_nu * y;
  w += L0 * y;
  w += L1 * y;
  w -= lambda * (ops.mass * y);
  return basis.Vt.partialPivLu().solve(basis.E.transpose() * w);
}

Vector riccati_input(const RiccatiGainTable& table, const RestrictionMap& xi,
                     const Vector& y, double t) {
  if (t < 0.0) throw InvalidArgument("riccati_input: t must be nonnegative");
  if (table.times.size() < 2) throw InvalidArgument("riccati_input: table too short");
  if (xi.coarse_n != table.coarse_node_count)
    throw InvalidArgument("riccati_input: restriction does not match the table");

  const double tau = table.tau;
  const double end = tau + table.period;
  double s = t - table.period * std::floor((t - tau) / table.period);
  s = std::clamp(s, tau, end);

  const auto& tm = table.times;
  auto it = std::upper_bound(tm.begin(), tm.end(), s);
  auto r = static_cast<std::size_t>(std::distance(tm.begin(), it));
  r = std::clamp<std::size_t>(r, 1, tm.size() - 1) - 1;  // bracket [t_r, t_{r+1}]
  const double theta = (s - tm[r]) / (tm[r + 1] - tm[r]);

  const Vector yc = xi.apply(y);
  return (1.0 - theta) * (table.gains[r] * yc) + theta * (table.gains[r + 1] * yc);
}

Vector control_to_forcing(const Matrix& U, const SparseMatrix& mass, const Vector& u) {
  if (u.size() != U.cols())
    throw InvalidArgument("control_to_forcing: input length mismatch");
  return mass * (U * u);
}

} // namespace parastab
