#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "semibwk/algorithms.hpp"
#include "semibwk/environments.hpp"
#include "semibwk/lp.hpp"

using namespace semibwk;

namespace {

/// Deterministic outcomes: every atom returns its configured reward and consumption.
class ConstantEnv : public Environment {
 public:
  ConstantEnv(Eigen::VectorXd r, Eigen::MatrixXd c) : r_(std::move(r)), c_(std::move(c)) {}
  std::string name() const override { return "constant"; }
  int atoms() const override { return static_cast<int>(r_.size()); }
  int resources() const override { return static_cast<int>(c_.cols()); }
  OutcomeMatrix sample(int, Rng&) const override { return {r_, c_}; }
  std::optional<Eigen::VectorXd> mean_rewards() const override { return r_; }
  std::optional<Eigen::MatrixXd> mean_consumption() const override { return c_; }

 private:
  Eigen::VectorXd r_;
  Eigen::MatrixXd c_;
};

SemiBanditFeedback feedback(const ActionVector& a, const Eigen::VectorXd& r, const Eigen::MatrixXd& c) {
  return observe(a, OutcomeMatrix{r, c});
}

}  // namespace

TEST_CASE("theorem-2 eps spot values") {
  const auto e = compute_eps_theorem2(5.0, 4, 1000.0, 1000);
  CHECK(e.eps == doctest::Approx(std::sqrt(0.02) + 0.02 + std::sqrt(20000.0) / 1000.0));
  CHECK(e.eps == doctest::Approx(0.302843).epsilon(1e-6));
  CHECK(e.threshold == doctest::Approx(3.0 * (20.0 + std::sqrt(20000.0))));
  CHECK(e.threshold == doctest::Approx(484.26).epsilon(1e-4));
  CHECK(e.precondition_met);
  CHECK(compute_eps_theorem2(5.0, 4, 1e12, 1000).eps < 1e-4);
  CHECK_FALSE(compute_eps_theorem2(5.0, 4, 100.0, 1000).precondition_met);
  CHECK_THROWS_AS(compute_eps_theorem2(5.0, 4, 0.0, 1000), ConfigError);
}

TEST_CASE("eps resolution") {
  SemiBwkConfig cfg;
  CHECK(cfg.resolve_eps(4, 100.0, 100) == 0.0);
  cfg.eps = 1.0;
  CHECK_THROWS_AS(cfg.resolve_eps(4, 100.0, 100), ConfigError);
  cfg.eps_mode = EpsMode::Theorem2;
  CHECK(cfg.resolve_eps(4, 1000.0, 1000) == doctest::Approx(0.302843).epsilon(1e-6));
  CHECK_THROWS_AS(cfg.resolve_eps(4, 10.0, 1000), ConfigError);
}

TEST_CASE("semibwk round 1 saturates the matroid") {
  const auto m = MatroidConstraint::uniform(5, 2);
  SemiBwkPolicy p(m, InstanceSpec{5, 1, 50.0, 100}, SemiBwkConfig{});
  Rng rng(1);
  const auto a = p.select(1, rng);
  REQUIRE(p.last_fractional());
  CHECK(p.last_fractional()->sum() == doctest::Approx(2.0));
  CHECK(a.cardinality() == 2);
  CHECK(m.is_feasible(a));
}

TEST_CASE("semibwk with exact data follows the true-means LP") {
  // Feed many exact observations so the bounds collapse onto the means.
  const int n = 3;
  const Eigen::Vector3d mu(0.9, 0.5, 0.1);
  Eigen::MatrixXd c(3, 1);
  c << 1.0, 0.0, 0.2;
  const auto m = MatroidConstraint::uniform(n, 1);
  SemiBwkPolicy p(m, InstanceSpec{n, 1, 400.0, 1000}, SemiBwkConfig{1e-6, 0.0, EpsMode::Explicit});
  const auto all = ActionVector::from_atoms(n, {0, 1, 2});
  for (int i = 0; i < 2000; ++i) p.confidence().update(all, feedback(all, mu, c));
  Rng rng(2);
  Eigen::Vector3d counts = Eigen::Vector3d::Zero();
  const int rounds = 20000;
  for (int t = 0; t < rounds; ++t) counts += p.select(t + 1, rng).indicator();
  const auto x = *p.last_fractional();
  const auto ref = solve_lp(build_atom_lp(mu, c, m, 0.4));
  CHECK((x - ref.x).cwiseAbs().maxCoeff() < 1e-4);
  for (int a = 0; a < n; ++a)
    CHECK(std::abs(counts(a) / rounds - ref.x(a)) < 4.0 * std::sqrt(0.25 / rounds) + 1e-4);
}

TEST_CASE("semibwk with zero budget plays only free atoms") {
  const auto m = MatroidConstraint::uniform(3, 2);
  SemiBwkPolicy p(m, InstanceSpec{3, 1, 0.0, 100}, SemiBwkConfig{1e-6, 0.0, EpsMode::Explicit});
  Eigen::MatrixXd c(3, 1);
  c << 1.0, 0.0, 0.5;
  const auto all = ActionVector::from_atoms(3, {0, 1});
  const auto one = ActionVector::from_atoms(3, {2});
  for (int i = 0; i < 1000; ++i) {
    p.confidence().update(all, feedback(all, Eigen::Vector3d(0.9, 0.3, 0.8), c));
    p.confidence().update(one, feedback(one, Eigen::Vector3d(0.9, 0.3, 0.8), c));
  }
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto a = p.select(t + 1, rng);
    CHECK_FALSE(a.contains(0));
    CHECK_FALSE(a.contains(2));
  }
}

TEST_CASE("pdbwk arm enumeration") {
  const auto m = MatroidConstraint::uniform(4, 1);
  PdBwkPolicy p(m, InstanceSpec{4, 2, 50.0, 100}, 5.0);
  CHECK(p.arms().size() == 5);
  CHECK(p.arms().size() == static_cast<std::size_t>(oracle::binomial(4, 0) + oracle::binomial(4, 1)));
  const auto big = MatroidConstraint::uniform(26, 2);
  PdBwkPolicy q(big, InstanceSpec{26, 26, 500.0, 1000}, 5.0);
  CHECK(q.arms().size() == 352);
  CHECK(q.learning_rate() == doctest::Approx(std::sqrt(std::log(26.0) / 500.0)));
  CHECK_THROWS_AS(PdBwkPolicy(big, InstanceSpec{26, 1, 500.0, 1000}, 5.0, 100), InstanceTooLarge);
}

TEST_CASE("pdbwk converges to a dominant free arm and keeps weights normalized") {
  const int n = 3;
  const auto m = MatroidConstraint::uniform(n, 1);
  Eigen::MatrixXd c(3, 2);
  c << 0.8, 0.1, 0.0, 0.0, 0.6, 0.9;
  ConstantEnv env(Eigen::Vector3d(0.3, 0.9, 0.4), c);
  const InstanceSpec spec{n, 2, 200.0, 400};
  PdBwkPolicy p(m, spec, 5.0);
  Rng rng(4);
  int picks = 0;
  for (int t = 1; t <= 300; ++t) {
    const auto a = p.select(t, rng);
    if (t > 100) picks += a.contains(1);
    p.observe(a, observe(a, env.sample(t, rng)));
    REQUIRE((p.resource_weights().array() > 0.0).all());
    REQUIRE(p.resource_weights().sum() == doctest::Approx(1.0));
  }
  CHECK(picks == 200);
}

TEST_CASE("omm examples") {
  const auto part = MatroidConstraint::partition(3, {{0, 1}, {2}}, {1, 1});
  OmmPolicy fresh(MatroidConstraint::uniform(4, 2), InstanceSpec{4, 1, 10.0, 10}, 5.0);
  Rng rng(5);
  CHECK(fresh.select(1, rng).atoms() == std::vector<int>{0, 1});

  OmmPolicy p(part, InstanceSpec{3, 1, 10.0, 10}, 1e-9);
  const auto all = ActionVector::from_atoms(3, {0, 1, 2});
  for (int i = 0; i < 100; ++i)
    p.confidence().update(all, feedback(all, Eigen::Vector3d(0.9, 0.8, 0.7), Eigen::MatrixXd::Zero(3, 1)));
  CHECK(p.select(1, rng).atoms() == std::vector<int>{0, 2});
}

TEST_CASE("omm after heavy sampling matches greedy on true means") {
  const auto inst = make_assortment(8, EnvMode::Standard, MatroidChoice::Uniform, 3);
  OmmPolicy p(inst.constraint, InstanceSpec{8, 8, 1e9, 10}, 5.0);
  Rng rng(6);
  const auto all = ActionVector::from_atoms(8, {0, 1, 2, 3, 4, 5, 6, 7});
  for (int i = 0; i < 50000; ++i) p.confidence().update(all, observe(all, inst.env->sample(i, rng)));
  const auto b = p.confidence().bounds();
  const Eigen::VectorXd mu = *inst.env->mean_rewards();
  const auto chosen = p.select(1, rng);
  const auto best = greedy_max_weight(inst.constraint, mu);
  const double width = (b.mu_plus - b.mu_minus).maxCoeff();
  CHECK(chosen.indicator().dot(mu) >= best.indicator().dot(mu) - 2.0 * width);
}

TEST_CASE("run_policy: trivial horizons and empty plays") {
  ConstantEnv env(Eigen::Vector2d(1.0, 0.5), Eigen::MatrixXd::Ones(2, 1));
  FixedPolicy empty(ActionVector(2), "empty");
  const auto t0 = run_policy(empty, env, InstanceSpec{2, 1, 5.0, 0}, 1);
  CHECK(t0.rounds.empty());
  CHECK(t0.total_reward == 0.0);
  const auto t = run_policy(empty, env, InstanceSpec{2, 1, 5.0, 100}, 1);
  CHECK(t.rounds.size() == 100);
  CHECK_FALSE(t.stop_round);
  CHECK(t.total_reward == 0.0);
  CHECK(t.remaining(0) == 5.0);
}

TEST_CASE("run_policy: the overspending round is excluded") {
  ConstantEnv env(Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Ones(1, 1));
  FixedPolicy always(ActionVector::from_atoms(1, {0}));
  const auto t = run_policy(always, env, InstanceSpec{1, 1, 10.0, 100}, 1);
  REQUIRE(t.stop_round);
  CHECK(*t.stop_round == 11);
  CHECK(t.total_reward == 10.0);
  CHECK(t.remaining(0) == -1.0);
  CHECK(t.rounds.size() == 11);
  CHECK(t.replayed_reward() == 10.0);
}

TEST_CASE("run_policy: every action is feasible and budgets never go negative before the stop") {
  for (auto choice : {MatroidChoice::Uniform, MatroidChoice::Partition}) {
    const auto inst = make_pricing(6, EnvMode::Standard, choice, 9);
    const InstanceSpec spec{6, 2, 60.0, 300};
    for (PolicyKind kind : {PolicyKind::SemiBwk, PolicyKind::PdBwk, PolicyKind::Omm}) {
      auto policy = make_policy(kind, inst.constraint, spec, SemiBwkConfig{});
      const auto t = run_policy(*policy, *inst.env, spec, 12);
      Eigen::VectorXd remaining = Eigen::VectorXd::Constant(2, 60.0);
      double reward = 0.0;
      for (const auto& r : t.rounds) {
        REQUIRE(inst.constraint.is_feasible(r.action));
        remaining -= r.consumption;
        if (t.stop_round && r.round == *t.stop_round) {
          CHECK(remaining.minCoeff() < 0.0);
        } else {
          REQUIRE(remaining.minCoeff() >= 0.0);
          reward += r.reward;
        }
      }
      CHECK(t.total_reward == doctest::Approx(reward));
      CHECK(t.replayed_reward() == doctest::Approx(t.total_reward));
    }
  }
}

TEST_CASE("run_policy is deterministic per seed") {
  const auto inst = make_assortment(6, EnvMode::Modified, MatroidChoice::Partition, 4);
  const InstanceSpec spec{6, 6, 100.0, 200};
  auto run = [&](std::uint64_t seed) {
    auto p = make_policy(PolicyKind::SemiBwk, inst.constraint, spec, SemiBwkConfig{});
    return run_policy(*p, *inst.env, spec, seed);
  };
  const auto a = run(5), b = run(5), c = run(6);
  CHECK(a.total_reward == b.total_reward);
  REQUIRE(a.rounds.size() == b.rounds.size());
  for (std::size_t i = 0; i < a.rounds.size(); ++i) CHECK(a.rounds[i].action == b.rounds[i].action);
  CHECK(a.total_reward != c.total_reward);
}

TEST_CASE("policy kinds parse") {
  CHECK(parse_policy_kind("semibwk") == PolicyKind::SemiBwk);
  CHECK(parse_policy_kind("semibwk-rrs") == PolicyKind::SemiBwk);
  CHECK(parse_policy_kind("pdbwk") == PolicyKind::PdBwk);
  CHECK(parse_policy_kind("omm") == PolicyKind::Omm);
  CHECK_THROWS_AS(parse_policy_kind("ucb"), ConfigError);
  CHECK(to_string(PolicyKind::PdBwk) == "pdbwk");
}

TEST_CASE("timed runs report per-step times") {
  const auto inst = make_assortment(6, EnvMode::Standard, MatroidChoice::Uniform, 1);
  const InstanceSpec spec{6, 6, 50.0, 50};
  auto p = make_policy(PolicyKind::Omm, inst.constraint, spec, SemiBwkConfig{});
  const auto t = run_policy_timed(*p, *inst.env, spec, 3, RunOptions{false});
  CHECK(t.steps == 50);
  CHECK(t.step_seconds.size() == 50);
  CHECK(t.trajectory.rounds.empty());
  double sum = 0.0;
  for (double s : t.step_seconds) sum += s;
  CHECK(sum == doctest::Approx(t.policy_seconds));
}
