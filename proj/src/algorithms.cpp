#include "semibwk/algorithms.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "semibwk/lp.hpp"
#include "semibwk/rounding.hpp"

namespace semibwk {

Theorem2Eps compute_eps_theorem2(double alpha, int n, double budget, int horizon) {
  if (!(budget > 0.0)) throw ConfigError("theorem-2 eps requires B > 0");
  const double an = alpha * n;
  const double ant = std::sqrt(an * horizon);
  Theorem2Eps out;
  out.eps = std::sqrt(an / budget) + an / budget + ant / budget;
  out.threshold = 3.0 * (an + ant);
  out.precondition_met = budget > out.threshold;
  return out;
}

double SemiBwkConfig::resolve_eps(int n, double budget, int horizon) const {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  double value = eps;
  if (eps_mode == EpsMode::Theorem2) value = compute_eps_theorem2(alpha, n, budget, horizon).eps;
  if (!(value >= 0.0 && value < 1.0)) {
    std::ostringstream os;
    os << "eps = " << value << " is outside [0, 1)";
    throw ConfigError(os.str());
  }
  return value;
}

// ---------------------------------------------------------------------------

SemiBwkPolicy::SemiBwkPolicy(MatroidConstraint constraint, const InstanceSpec& instance,
                             SemiBwkConfig config)
    : constraint_(std::move(constraint)),
      instance_(instance),
      eps_(config.resolve_eps(instance.atoms, instance.budget, instance.horizon)),
      confidence_(instance.atoms, instance.resources, config.alpha) {
  instance_.validate();
  if (constraint_.atoms() != instance.atoms) throw ContractViolation("matroid/instance size mismatch");
}

ActionVector SemiBwkPolicy::select(int /*round*/, Rng& rng) {
  const ConfidenceBounds bounds = confidence_.bounds();
  const auto lp = build_lp_alg(bounds, constraint_, instance_.budget, instance_.horizon, eps_);
  const auto sol = solve_lp(lp);
  // x = 0 is always feasible and the box keeps the LP bounded.
  if (!sol.optimal()) throw std::logic_error(std::string("LP_ALG not optimal: ") + to_string(sol.status));
  last_x_ = sol.x;
  return dependent_round(sol.x, constraint_, rng);
}

void SemiBwkPolicy::observe(const ActionVector& action, const SemiBanditFeedback& feedback) {
  confidence_.update(action, feedback);
}

// ---------------------------------------------------------------------------

OmmPolicy::OmmPolicy(MatroidConstraint constraint, const InstanceSpec& instance, double alpha)
    : constraint_(std::move(constraint)), confidence_(instance.atoms, instance.resources, alpha) {}

ActionVector OmmPolicy::select(int /*round*/, Rng& /*rng*/) {
  return greedy_max_weight(constraint_, confidence_.bounds().mu_plus);
}

void OmmPolicy::observe(const ActionVector& action, const SemiBanditFeedback& feedback) {
  confidence_.update(action, feedback);
}

// ---------------------------------------------------------------------------

PdBwkPolicy::PdBwkPolicy(const MatroidConstraint& constraint, const InstanceSpec& instance,
                         double alpha, std::size_t arm_cap)
    : arms_(constraint.enumerate_feasible(arm_cap)),
      instance_(instance),
      confidence_(instance.atoms, instance.resources, alpha),
      weights_(Eigen::VectorXd::Constant(instance.resources, 1.0 / instance.resources)),
      learning_rate_(instance.budget > 0.0
                         ? std::sqrt(std::log(static_cast<double>(instance.resources)) / instance.budget)
                         : 0.0) {
  incidence_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(arms_.size()), instance.atoms);
  for (std::size_t k = 0; k < arms_.size(); ++k)
    for (int a : arms_[k].atoms()) incidence_(static_cast<Eigen::Index>(k), a) = 1.0;
}

ActionVector PdBwkPolicy::select(int /*round*/, Rng& /*rng*/) {
  const ConfidenceBounds b = confidence_.bounds();
  const Eigen::VectorXd ucb = incidence_ * b.mu_plus;
  const Eigen::VectorXd cost = incidence_ * (b.c_minus * weights_);
  const double time_cost = instance_.budget / instance_.horizon;

  Eigen::Index best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < ucb.size(); ++k) {
    const double denom = cost(k) + time_cost;
    const double score = denom > 0.0 ? ucb(k) / denom
                                     : (ucb(k) > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (score > best_score) {
      best_score = score;
      best = k;
    }
  }
  return arms_[static_cast<std::size_t>(best)];
}

void PdBwkPolicy::observe(const ActionVector& action, const SemiBanditFeedback& feedback) {
  confidence_.update(action, feedback);
  if (feedback.atoms.empty()) return;
  const Eigen::VectorXd used = feedback.consumption.colwise().sum().transpose();
  weights_ = (weights_.array() * (std::log1p(learning_rate_) * used.array()).exp()).matrix();
  weights_ /= weights_.sum();
}

// ---------------------------------------------------------------------------

PolicyKind parse_policy_kind(const std::string& name) {
  if (name == "semibwk" || name == "semibwk-rrs") return PolicyKind::SemiBwk;
  if (name == "pdbwk") return PolicyKind::PdBwk;
  if (name == "omm") return PolicyKind::Omm;
  throw ConfigError("unknown policy '" + name + "'");
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::SemiBwk: return "semibwk";
    case PolicyKind::PdBwk: return "pdbwk";
    case PolicyKind::Omm: return "omm";
  }
  return "?";
}

std::unique_ptr<Policy> make_policy(PolicyKind kind, const MatroidConstraint& constraint,
                                    const InstanceSpec& instance, const SemiBwkConfig& config) {
  switch (kind) {
    case PolicyKind::SemiBwk: return std::make_unique<SemiBwkPolicy>(constraint, instance, config);
    case PolicyKind::PdBwk: return std::make_unique<PdBwkPolicy>(constraint, instance, config.alpha);
    case PolicyKind::Omm: return std::make_unique<OmmPolicy>(constraint, instance, config.alpha);
  }
  throw ConfigError("unknown policy kind");
}

// ---------------------------------------------------------------------------

TimedTrajectory run_policy_timed(Policy& policy, const Environment& env,
                                 const InstanceSpec& instance, std::uint64_t seed,
                                 RunOptions options) {
  using Clock = std::chrono::steady_clock;
  const int n = env.atoms();
  const int d = env.resources();
  if (n != instance.atoms || d != instance.resources)
    throw ContractViolation("environment/instance dimension mismatch");

  Rng env_rng(derive_seed(seed, std::string_view("environment")));
  Rng policy_rng(derive_seed(seed, std::string_view("rounding")));

  TimedTrajectory out;
  Trajectory& traj = out.trajectory;
  BudgetState budget = BudgetState::initial(instance);
  Clock::duration in_policy{0};

  for (int t = 1; t <= instance.horizon; ++t) {
    auto start = Clock::now();
    ActionVector action = policy.select(t, policy_rng);
    Clock::duration step = Clock::now() - start;
    if (action.size() != n) throw ContractViolation("policy emitted an action of wrong size");

    const OutcomeMatrix outcome = env.sample(t, env_rng);
    outcome.validate(n, d);
    const RoundSettlement settled = settle_round(budget, t, action, outcome);
    SemiBanditFeedback feedback = observe(action, outcome);
    ++out.steps;

    if (options.record_rounds) {
      traj.rounds.push_back(RoundRecord{t, action, feedback, settled.reward, settled.consumption,
                                        policy.last_fractional()});
    }
    if (settled.stopped) {
      traj.stop_round = t;
      in_policy += step;
      out.step_seconds.push_back(std::chrono::duration<double>(step).count());
      break;
    }
    traj.total_reward += settled.reward;

    start = Clock::now();
    policy.observe(action, feedback);
    step += Clock::now() - start;
    in_policy += step;
    out.step_seconds.push_back(std::chrono::duration<double>(step).count());
  }
  traj.remaining = budget.remaining;
  out.policy_seconds = std::chrono::duration<double>(in_policy).count();
  return out;
}

Trajectory run_policy(Policy& policy, const Environment& env, const InstanceSpec& instance,
                      std::uint64_t seed, RunOptions options) {
  return run_policy_timed(policy, env, instance, seed, options).trajectory;
}

}  // namespace semibwk
