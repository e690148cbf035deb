#include "semibwk/confidence.hpp"

#include <algorithm>

namespace semibwk {

namespace {
double project_unit(double v) { return std::clamp(v, 0.0, 1.0); }
}  // namespace

double theory_alpha(int n, int d, int horizon, double factor) {
  return factor * std::log(static_cast<double>(n) * d * horizon);
}

ConfidenceState::ConfidenceState(int atoms, int resources, double alpha)
    : alpha_(alpha),
      pulls_(Eigen::VectorXi::Zero(atoms)),
      reward_sum_(Eigen::VectorXd::Zero(atoms)),
      consumption_sum_(Eigen::MatrixXd::Zero(atoms, resources)) {
  if (!(alpha > 0.0)) throw ContractViolation("confidence alpha must be positive");
  if (atoms < 1 || resources < 1) throw ContractViolation("confidence state needs n, d >= 1");
}

void ConfidenceState::update(const ActionVector& action, const SemiBanditFeedback& feedback) {
  if (action.size() != atoms()) throw ContractViolation("action size mismatch");
  if (feedback.atoms != action.atoms())
    throw ContractViolation("feedback must cover exactly the chosen atoms");
  const auto k = static_cast<Eigen::Index>(feedback.atoms.size());
  if (feedback.rewards.size() != k || feedback.consumption.rows() != k ||
      (k > 0 && feedback.consumption.cols() != resources()))
    throw ContractViolation("feedback dimension mismatch");

  for (Eigen::Index i = 0; i < k; ++i) {
    const int a = feedback.atoms[static_cast<std::size_t>(i)];
    pulls_(a) += 1;
    reward_sum_(a) += feedback.rewards(i);
    consumption_sum_.row(a) += feedback.consumption.row(i);
  }
}

ConfidenceBounds ConfidenceState::bounds() const {
  const int n = atoms();
  const int d = resources();
  ConfidenceBounds b{Eigen::VectorXd::Ones(n), Eigen::VectorXd::Zero(n),
                     Eigen::MatrixXd::Ones(n, d), Eigen::MatrixXd::Zero(n, d)};
  for (int a = 0; a < n; ++a) {
    const long long m = pulls_(a);
    if (m == 0) continue;
    const double mean = reward_sum_(a) / static_cast<double>(m);
    const double r = confidence_radius(alpha_, std::max(mean, 0.0), m);
    b.mu_plus(a) = project_unit(mean + r);
    b.mu_minus(a) = project_unit(mean - r);
    for (int j = 0; j < d; ++j) {
      const double cm = consumption_sum_(a, j) / static_cast<double>(m);
      const double cr = confidence_radius(alpha_, std::max(cm, 0.0), m);
      b.c_plus(a, j) = project_unit(cm + cr);
      b.c_minus(a, j) = project_unit(cm - cr);
    }
  }
  return b;
}

}  // namespace semibwk
