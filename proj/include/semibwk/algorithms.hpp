#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "semibwk/confidence.hpp"
#include "semibwk/core.hpp"
#include "semibwk/matroid.hpp"

namespace semibwk {

/// Online policy under semi-bandit feedback.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string name() const = 0;
  /// Emits a feasible action for `round` (1-based).
  virtual ActionVector select(int round, Rng& rng) = 0;
  virtual void observe(const ActionVector& action, const SemiBanditFeedback& feedback) = 0;
  /// The fractional point behind the last action, for LP-based policies.
  virtual std::optional<Eigen::VectorXd> last_fractional() const { return std::nullopt; }
};

struct Theorem2Eps {
  double eps = 0.0;
  double threshold = 0.0;  // 3 (alpha n + sqrt(alpha n T))
  bool precondition_met = false;  // B > threshold
  bool usable() const { return eps < 1.0; }
};

/// eps = sqrt(alpha n / B) + alpha n / B + sqrt(alpha n T) / B. Requires B > 0.
Theorem2Eps compute_eps_theorem2(double alpha, int n, double budget, int horizon);

enum class EpsMode { Explicit, Theorem2 };

struct SemiBwkConfig {
  double alpha = 5.0;
  double eps = 0.0;
  EpsMode eps_mode = EpsMode::Explicit;

  /// The eps actually used for an instance; throws ConfigError if it is >= 1.
  double resolve_eps(int n, double budget, int horizon) const;
};

/// Optimistic LP over the matroid polytope followed by dependent rounding.
class SemiBwkPolicy : public Policy {
 public:
  SemiBwkPolicy(MatroidConstraint constraint, const InstanceSpec& instance, SemiBwkConfig config);

  std::string name() const override { return "semibwk"; }
  ActionVector select(int round, Rng& rng) override;
  void observe(const ActionVector& action, const SemiBanditFeedback& feedback) override;
  std::optional<Eigen::VectorXd> last_fractional() const override { return last_x_; }

  double eps() const { return eps_; }
  ConfidenceState& confidence() { return confidence_; }
  const ConfidenceState& confidence() const { return confidence_; }

 private:
  MatroidConstraint constraint_;
  InstanceSpec instance_;
  double eps_;
  ConfidenceState confidence_;
  std::optional<Eigen::VectorXd> last_x_;
};

/// Budget-oblivious greedy on upper confidence bounds.
class OmmPolicy : public Policy {
 public:
  OmmPolicy(MatroidConstraint constraint, const InstanceSpec& instance, double alpha);

  std::string name() const override { return "omm"; }
  ActionVector select(int round, Rng& rng) override;
  void observe(const ActionVector& action, const SemiBanditFeedback& feedback) override;

  ConfidenceState& confidence() { return confidence_; }

 private:
  MatroidConstraint constraint_;
  ConfidenceState confidence_;
};

/// Primal-dual BwK over the explicit list of feasible subsets. Each subset is
/// an arm; its UCB reward and LCB consumption are sums of per-atom bounds.
/// Plays argmax UCB / (weights . LCB + B/T) and updates resource weights
/// multiplicatively with rate sqrt(ln d / B).
class PdBwkPolicy : public Policy {
 public:
  PdBwkPolicy(const MatroidConstraint& constraint, const InstanceSpec& instance, double alpha,
              std::size_t arm_cap = 100000);

  std::string name() const override { return "pdbwk"; }
  ActionVector select(int round, Rng& rng) override;
  void observe(const ActionVector& action, const SemiBanditFeedback& feedback) override;

  const std::vector<ActionVector>& arms() const { return arms_; }
  const Eigen::VectorXd& resource_weights() const { return weights_; }
  double learning_rate() const { return learning_rate_; }

 private:
  std::vector<ActionVector> arms_;
  Eigen::MatrixXd incidence_;  // arms x atoms
  InstanceSpec instance_;
  ConfidenceState confidence_;
  Eigen::VectorXd weights_;
  double learning_rate_;
};

/// Plays a fixed action every round.
class FixedPolicy : public Policy {
 public:
  explicit FixedPolicy(ActionVector action, std::string name = "fixed")
      : action_(std::move(action)), name_(std::move(name)) {}
  std::string name() const override { return name_; }
  ActionVector select(int, Rng&) override { return action_; }
  void observe(const ActionVector&, const SemiBanditFeedback&) override {}

 private:
  ActionVector action_;
  std::string name_;
};

enum class PolicyKind { SemiBwk, PdBwk, Omm };

PolicyKind parse_policy_kind(const std::string& name);
std::string to_string(PolicyKind kind);

std::unique_ptr<Policy> make_policy(PolicyKind kind, const MatroidConstraint& constraint,
                                    const InstanceSpec& instance, const SemiBwkConfig& config);

struct RunOptions {
  bool record_rounds = true;
};

/// Runs `policy` against `env` for up to T rounds. Environment draws and the
/// policy's randomness come from independent streams derived from `seed`.
Trajectory run_policy(Policy& policy, const Environment& env, const InstanceSpec& instance,
                      std::uint64_t seed, RunOptions options = {});

/// A trajectory plus the wall-clock time spent inside the policy's select/observe.
struct TimedTrajectory {
  Trajectory trajectory;
  double policy_seconds = 0.0;
  std::vector<double> step_seconds;  // select + observe time per executed round
  int steps = 0;
};

TimedTrajectory run_policy_timed(Policy& policy, const Environment& env,
                                 const InstanceSpec& instance, std::uint64_t seed,
                                 RunOptions options = {});

}  // namespace semibwk
