#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "semibwk/environments.hpp"

using namespace semibwk;

namespace {

/// Sample means of rewards and consumption against the exact means, within 4 sigma
/// (outcomes lie in [0,1], so sigma <= 1/2).
void check_means(const Environment& env, int samples, std::uint64_t seed) {
  Rng rng(seed);
  const int n = env.atoms();
  const int d = env.resources();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, d);
  Eigen::VectorXd r2 = Eigen::VectorXd::Zero(n);
  for (int s = 0; s < samples; ++s) {
    const auto o = env.sample(s + 1, rng);
    REQUIRE_NOTHROW(o.validate(n, d));
    r += o.rewards;
    r2 += o.rewards.cwiseProduct(o.rewards);
    c += o.consumption;
  }
  r /= samples;
  c /= samples;
  const Eigen::VectorXd mu = *env.mean_rewards();
  const Eigen::MatrixXd cm = *env.mean_consumption();
  const double tol = 4.0 * 0.5 / std::sqrt(static_cast<double>(samples));
  for (int a = 0; a < n; ++a) {
    CHECK(std::abs(r(a) - mu(a)) <= tol);
    for (int j = 0; j < d; ++j) CHECK(std::abs(c(a, j) - cm(a, j)) <= tol);
  }
}

double truncated_normal_tail_by_quadrature(double v0, double p) {
  // Midpoint rule on the density restricted to [0,1].
  const int steps = 200000;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double v = (i + 0.5) / steps;
    const double f = std::exp(-0.5 * (v - v0) * (v - v0));
    den += f;
    if (v >= p) num += f;
  }
  return num / den;
}

}  // namespace

TEST_CASE("assortment: single atom at p = 1/2") {
  AssortmentEnv env((Eigen::VectorXd(1) << 0.5).finished(), EnvMode::Standard);
  CHECK((*env.mean_rewards())(0) == doctest::Approx(0.25));
  CHECK((*env.mean_consumption())(0, 0) == doctest::Approx(0.5));
  AssortmentEnv mod((Eigen::VectorXd(1) << 0.5).finished(), EnvMode::Modified);
  // Sale: p (1 - p); no sale: E[v; v < p] = p^2 / 2.
  CHECK((*mod.mean_rewards())(0) == doctest::Approx(0.25 + 0.125));
  CHECK((*mod.mean_consumption())(0, 0) == doctest::Approx(0.5 + 0.125));
}

TEST_CASE("assortment: modified mode only changes the no-sale branch") {
  AssortmentEnv std_env(Eigen::Vector3d(0.2, 0.5, 0.8), EnvMode::Standard);
  AssortmentEnv mod_env(Eigen::Vector3d(0.2, 0.5, 0.8), EnvMode::Modified);
  Rng a(3), b(3);
  for (int t = 0; t < 2000; ++t) {
    const auto s = std_env.sample(t, a);
    const auto m = mod_env.sample(t, b);
    for (int i = 0; i < 3; ++i) {
      if (s.consumption(i, i) == 1.0) {
        CHECK(m.rewards(i) == s.rewards(i));
        CHECK(m.consumption(i, i) == 1.0);
      } else {
        CHECK(s.rewards(i) == 0.0);
        CHECK(m.rewards(i) == m.consumption(i, i));
        CHECK(m.rewards(i) < std_env.prices()(i));
      }
    }
  }
}

TEST_CASE("assortment: Monte-Carlo means") {
  const auto s = make_assortment(5, EnvMode::Standard, MatroidChoice::Uniform, 11);
  check_means(*s.env, 40000, 1);
  const auto m = make_assortment(5, EnvMode::Modified, MatroidChoice::Partition, 11);
  check_means(*m.env, 40000, 2);
}

TEST_CASE("assortment: seeds fix the prices; matroids as configured") {
  const auto a = make_assortment(6, EnvMode::Standard, MatroidChoice::Uniform, 5);
  const auto b = make_assortment(6, EnvMode::Standard, MatroidChoice::Partition, 5);
  const auto c = make_assortment(6, EnvMode::Standard, MatroidChoice::Uniform, 6);
  const auto& pa = dynamic_cast<const AssortmentEnv&>(*a.env).prices();
  const auto& pb = dynamic_cast<const AssortmentEnv&>(*b.env).prices();
  const auto& pc = dynamic_cast<const AssortmentEnv&>(*c.env).prices();
  CHECK(pa == pb);
  CHECK(pa != pc);
  CHECK(a.env->resources() == 6);
  CHECK(a.constraint.is_uniform());
  CHECK(a.constraint.rank({0, 1, 2, 3, 4, 5}) == 2);
  CHECK(b.constraint.is_partition());
  CHECK(b.constraint.is_feasible(std::vector<int>{0, 5}));
  CHECK_FALSE(b.constraint.is_feasible(std::vector<int>{0, 1}));
}

TEST_CASE("pricing: grid and atoms") {
  CHECK(PricingEnv::price_grid(3) == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(PricingEnv::price_grid(1) == std::vector<double>{0.5});
  const auto inst = make_pricing(6, EnvMode::Standard, MatroidChoice::Partition, 3);
  const auto& env = dynamic_cast<const PricingEnv&>(*inst.env);
  CHECK(env.prices_per_product() == 3);
  CHECK(env.resources() == 2);
  CHECK(env.product_of(4) == 1);
  CHECK(env.price_of(4) == 0.5);
  CHECK(inst.constraint.is_feasible(std::vector<int>{0, 5}));
  CHECK_FALSE(inst.constraint.is_feasible(std::vector<int>{0, 1}));
  CHECK_THROWS_AS(make_pricing(5, EnvMode::Standard, MatroidChoice::Uniform, 1), ConfigError);
}

TEST_CASE("pricing: sale probability") {
  for (double v0 : {0.0, 0.3, 0.9}) {
    CHECK(PricingEnv::sale_probability(v0, 0.0) == 1.0);
    CHECK(PricingEnv::sale_probability(v0, 1.0) == doctest::Approx(0.0));
    for (double p : {0.2, 0.5, 0.75})
      CHECK(PricingEnv::sale_probability(v0, p) == doctest::Approx(truncated_normal_tail_by_quadrature(v0, p)).epsilon(1e-4));
  }
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double v = PricingEnv::sample_valuation(0.4, rng);
    REQUIRE(v >= 0.0);
    REQUIRE(v <= 1.0);
  }
}

TEST_CASE("pricing: Monte-Carlo means") {
  const auto s = make_pricing(8, EnvMode::Standard, MatroidChoice::Uniform, 21);
  check_means(*s.env, 40000, 3);
  const auto m = make_pricing(8, EnvMode::Modified, MatroidChoice::Uniform, 21);
  check_means(*m.env, 40000, 4);
}

TEST_CASE("pricing: modified no-sale costs 0.3 and earns nothing") {
  const auto inst = make_pricing(6, EnvMode::Modified, MatroidChoice::Uniform, 2);
  const auto& env = dynamic_cast<const PricingEnv&>(*inst.env);
  Rng rng(9);
  for (int t = 0; t < 500; ++t) {
    const auto o = env.sample(t, rng);
    for (int a = 0; a < 6; ++a) {
      const int i = env.product_of(a);
      if (o.rewards(a) == 0.0 && env.price_of(a) > 0.0) CHECK(o.consumption(a, i) == doctest::Approx(0.3));
      CHECK(o.consumption(a, 1 - i) == 0.0);
    }
  }
}

TEST_CASE("bidding: single atom is a plain BwK instance") {
  const auto inst = make_bidding(1, {0.5}, 7);
  CHECK(inst.env->atoms() == 1);
  CHECK(inst.env->resources() == 1);
  CHECK(inst.constraint.enumerate_feasible().size() == 2);
}

TEST_CASE("bidding: configured win probabilities and zero bids") {
  BiddingEnv env({0.0, 0.4, 0.8}, Eigen::Vector2d(0.5, 0.25),
                 (Eigen::MatrixXd(2, 3) << 0.0, 0.3, 0.9, 0.1, 0.5, 0.7).finished());
  const Eigen::VectorXd mu = *env.mean_rewards();
  const Eigen::MatrixXd c = *env.mean_consumption();
  CHECK(mu(0) == 0.0);
  CHECK(c(0, 0) == 0.0);
  CHECK(mu(2) == doctest::Approx(0.45));
  CHECK(c(2, 0) == doctest::Approx(0.72));
  CHECK(mu(4) == doctest::Approx(0.125));
  check_means(env, 40000, 5);
  const auto inst = make_bidding(3, {0.0, 0.5}, 2);
  CHECK((*inst.env->mean_rewards())(0) == 0.0);
  CHECK((*inst.env->mean_consumption())(0, 0) == 0.0);
  CHECK(inst.constraint.is_feasible(std::vector<int>{1, 3, 5}));
  CHECK_FALSE(inst.constraint.is_feasible(std::vector<int>{0, 1}));
  check_means(*inst.env, 40000, 6);
}

TEST_CASE("parsers") {
  CHECK(parse_env_mode("modified") == EnvMode::Modified);
  CHECK(parse_matroid_choice("partition") == MatroidChoice::Partition);
  CHECK_THROWS_AS(parse_env_mode("x"), ConfigError);
  CHECK_THROWS_AS(parse_matroid_choice("graphic"), ConfigError);
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
}
