#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "semibwk/core.hpp"

namespace semibwk {

/// Confidence radius sqrt(alpha * x / m) + alpha / m.
/// Requires alpha > 0, x >= 0 and m >= 1; unpulled atoms are handled by
/// ConfidenceState::bounds() instead.
template <typename Scalar>
Scalar confidence_radius(Scalar alpha, Scalar x, long long m) {
  if (m < 1) throw ContractViolation("confidence_radius: m must be >= 1");
  if (!(alpha > Scalar(0)) || !(x >= Scalar(0)))
    throw ContractViolation("confidence_radius: need alpha > 0 and x >= 0");
  using std::sqrt;
  const Scalar mm = static_cast<Scalar>(m);
  return sqrt(alpha * x / mm) + alpha / mm;
}

/// alpha = factor * log(n d T); factor 3 is the default theory setting.
double theory_alpha(int n, int d, int horizon, double factor = 3.0);

struct ConfidenceBounds {
  Eigen::VectorXd mu_plus;
  Eigen::VectorXd mu_minus;
  Eigen::MatrixXd c_plus;   // n x d
  Eigen::MatrixXd c_minus;  // n x d
};

/// Running per-atom statistics under semi-bandit feedback.
class ConfidenceState {
 public:
  ConfidenceState(int atoms, int resources, double alpha);

  int atoms() const { return static_cast<int>(pulls_.size()); }
  int resources() const { return static_cast<int>(consumption_sum_.cols()); }
  double alpha() const { return alpha_; }

  const Eigen::VectorXi& pulls() const { return pulls_; }
  const Eigen::VectorXd& reward_sum() const { return reward_sum_; }
  const Eigen::MatrixXd& consumption_sum() const { return consumption_sum_; }

  /// Adds one observation per chosen atom. Feedback must cover exactly the
  /// atoms of `action`.
  void update(const ActionVector& action, const SemiBanditFeedback& feedback);

  /// Projected UCB/LCB per atom. Atoms never pulled get [0, 1].
  ConfidenceBounds bounds() const;

 private:
  double alpha_;
  Eigen::VectorXi pulls_;
  Eigen::VectorXd reward_sum_;
  Eigen::MatrixXd consumption_sum_;
};

}  // namespace semibwk
