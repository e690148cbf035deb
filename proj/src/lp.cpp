#include "semibwk/lp.hpp"

namespace semibwk {

LinearProgram<double> build_atom_lp(const Eigen::Ref<const Eigen::VectorXd>& reward,
                                    const Eigen::Ref<const Eigen::MatrixXd>& consumption,
                                    const MatroidConstraint& m, double budget_rate) {
  const int n = m.atoms();
  if (reward.size() != n || consumption.rows() != n)
    throw ContractViolation("atom LP: dimension mismatch with matroid");

  const PolytopeDescription polytope = m.polytope_constraints();
  LinearProgram<double> lp(n);
  lp.objective = reward;
  lp.upper = polytope.upper;
  for (Eigen::Index j = 0; j < consumption.cols(); ++j) lp.add_row(consumption.col(j), budget_rate);
  for (const auto& row : polytope.rows) lp.add_row(row.coefficients, row.rhs);
  return lp;
}

LinearProgram<double> build_lp_alg(const ConfidenceBounds& bounds, const MatroidConstraint& m,
                                   double budget, int horizon, double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw ConfigError("eps must lie in [0, 1)");
  if (horizon < 1) throw ContractViolation("horizon must be >= 1");
  return build_atom_lp(bounds.mu_plus, bounds.c_minus, m, (1.0 - eps) * budget / horizon);
}

}  // namespace semibwk
