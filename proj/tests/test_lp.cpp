#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "semibwk/lp.hpp"

using namespace semibwk;

namespace {

LinearProgram<double> spec_lp() {
  LinearProgram<double> lp(3);
  lp.objective = Eigen::Vector3d(0.9, 0.5, 0.1);
  lp.add_row(Eigen::Vector3d(1, 1, 1), 1.0);
  lp.add_row(Eigen::Vector3d(1, 0, 0.2), 0.4);
  return lp;
}

ConfidenceBounds exact_bounds(const Eigen::VectorXd& mu, const Eigen::MatrixXd& c) {
  return {mu, mu, c, c};
}

}  // namespace

TEST_CASE("single bound") {
  LinearProgram<double> lp(1);
  lp.objective(0) = 1.0;
  lp.add_row(Eigen::VectorXd::Ones(1), 0.4);
  const auto sol = solve_lp(lp);
  REQUIRE(sol.optimal());
  CHECK(sol.x(0) == doctest::Approx(0.4));
  CHECK(sol.value == doctest::Approx(0.4));
}

TEST_CASE("three-variable example matches vertex enumeration") {
  const auto lp = spec_lp();
  const auto sol = solve_lp(lp);
  REQUIRE(sol.optimal());
  const auto ref = oracle::vertex_enumeration(lp);
  REQUIRE(ref);
  CHECK(ref->value == doctest::Approx(0.66));
  CHECK(sol.value == doctest::Approx(0.66).epsilon(1e-12));
  CHECK(sol.x(0) == doctest::Approx(0.4));
  CHECK(sol.x(1) == doctest::Approx(0.6));
  CHECK(sol.x(2) == doctest::Approx(0.0));
}

TEST_CASE("zero objective") {
  auto lp = spec_lp();
  lp.objective.setZero();
  const auto sol = solve_lp(lp);
  REQUIRE(sol.optimal());
  CHECK(sol.value == 0.0);
  CHECK(sol.max_violation <= 1e-12);
}

TEST_CASE("negative rhs needs phase one") {
  // x1 + x2 >= 0.5 written as -x1 - x2 <= -0.5; minimize x1 + 2 x2.
  LinearProgram<double> lp(2);
  lp.objective = Eigen::Vector2d(-1, -2);
  lp.add_row(Eigen::Vector2d(-1, -1), -0.5);
  const auto sol = solve_lp(lp);
  REQUIRE(sol.optimal());
  CHECK(sol.value == doctest::Approx(-0.5));
  CHECK(sol.x(0) == doctest::Approx(0.5));
}

TEST_CASE("infeasible and unbounded") {
  LinearProgram<double> lp(2);
  lp.objective = Eigen::Vector2d(1, 1);
  lp.add_row(Eigen::Vector2d(-1, -1), -3.0);  // x1 + x2 >= 3 in the unit box
  CHECK(solve_lp(lp).status == LpStatus::Infeasible);

  LinearProgram<double> free(2);
  free.upper = Eigen::Vector2d(std::numeric_limits<double>::infinity(), 1.0);
  free.objective = Eigen::Vector2d(1, 0);
  free.add_row(Eigen::Vector2d(-1, 1), 0.5);
  CHECK(solve_lp(free).status == LpStatus::Unbounded);
}

TEST_CASE("unbounded upper bound with a binding row") {
  LinearProgram<double> lp(2);
  lp.upper = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
  lp.objective = Eigen::Vector2d(3, 2);
  lp.add_row(Eigen::Vector2d(1, 1), 4.0);
  lp.add_row(Eigen::Vector2d(1, 3), 6.0);
  const auto sol = solve_lp(lp);
  REQUIRE(sol.optimal());
  CHECK(sol.value == doctest::Approx(12.0));
}

TEST_CASE("dimension mismatch is a contract violation") {
  LinearProgram<double> lp(2);
  CHECK_THROWS_AS(lp.add_row(Eigen::Vector3d(1, 1, 1), 1.0), ContractViolation);
  lp.upper = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(solve_lp(lp), ContractViolation);
}

TEST_CASE("random LPs agree with vertex enumeration") {
  Rng rng(99);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const int m = static_cast<int>(rng() % 4);
    LinearProgram<double> lp(n);
    for (int j = 0; j < n; ++j) lp.objective(j) = 2.0 * uniform01(rng) - 0.5;
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd row(n);
      for (int j = 0; j < n; ++j) row(j) = 2.0 * uniform01(rng) - 0.6;
      lp.add_row(row, 1.5 * uniform01(rng) - 0.3);
    }
    const auto ref = oracle::vertex_enumeration(lp);
    const auto sol = solve_lp(lp);
    if (!ref) {
      CHECK(sol.status == LpStatus::Infeasible);
      continue;
    }
    REQUIRE(sol.optimal());
    CHECK(sol.value == doctest::Approx(ref->value).epsilon(1e-9));
    CHECK(sol.max_violation <= 1e-9);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("degenerate LPs terminate") {
  // Many rows through the same vertex.
  LinearProgram<double> lp(3);
  lp.objective = Eigen::Vector3d(1, 1, 1);
  for (int i = 0; i < 6; ++i) lp.add_row(Eigen::Vector3d(1, 1, 1), 1.0);
  lp.add_row(Eigen::Vector3d(1, 0, 0), 0.0);
  lp.add_row(Eigen::Vector3d(0, 1, 0), 0.0);
  const auto sol = solve_lp(lp);
  REQUIRE(sol.optimal());
  CHECK(sol.value == doctest::Approx(1.0));
  CHECK(sol.x(2) == doctest::Approx(1.0));
}

TEST_CASE("float and long double instantiations") {
  LinearProgram<float> lf(3);
  lf.objective = Eigen::Vector3f(0.9f, 0.5f, 0.1f);
  lf.add_row(Eigen::Vector3f(1, 1, 1), 1.0f);
  lf.add_row(Eigen::Vector3f(1, 0, 0.2f), 0.4f);
  const auto sf = solve_lp(lf, 1e-4f);
  REQUIRE(sf.optimal());
  CHECK(sf.value == doctest::Approx(0.66f).epsilon(1e-5));

  using LD = long double;
  LinearProgram<LD> ll(3);
  ll.objective << LD(0.9), LD(0.5), LD(0.1);
  ll.add_row((Eigen::Matrix<LD, 3, 1>() << 1, 1, 1).finished(), 1);
  ll.add_row((Eigen::Matrix<LD, 3, 1>() << 1, 0, LD(0.2)).finished(), LD(0.4));
  const auto sl = solve_lp(ll);
  REQUIRE(sl.optimal());
  CHECK(static_cast<double>(sl.value) == doctest::Approx(0.66));
}

TEST_CASE("build_lp_alg: eps = 0, B = T gives unit rhs") {
  const auto m = MatroidConstraint::uniform(2, 1);
  Eigen::MatrixXd c(2, 2);
  c << 0.5, 0.1, 0.2, 0.3;
  const auto lp = build_lp_alg(exact_bounds(Eigen::Vector2d(0.3, 0.4), c), m, 100.0, 100, 0.0);
  REQUIRE(lp.constraints() == 3);
  CHECK(lp.rhs(0) == 1.0);
  CHECK(lp.rhs(1) == 1.0);
  CHECK(lp.rows.row(0) == Eigen::RowVector2d(0.5, 0.2));
  CHECK(lp.rows.row(2) == Eigen::RowVector2d(1, 1));
  CHECK(lp.rhs(2) == 1.0);
}

TEST_CASE("build_lp_alg: example instance and eps scaling") {
  const auto m = MatroidConstraint::uniform(3, 1);
  Eigen::MatrixXd c(3, 1);
  c << 1.0, 0.0, 0.2;
  const auto b = exact_bounds(Eigen::Vector3d(0.9, 0.5, 0.1), c);
  const auto sol = solve_lp(build_lp_alg(b, m, 400.0, 1000, 0.0));
  REQUIRE(sol.optimal());
  CHECK(sol.value == doctest::Approx(0.66));
  CHECK(sol.x(0) == doctest::Approx(0.4));
  CHECK(sol.x(1) == doctest::Approx(0.6));

  const auto lp = build_lp_alg(b, m, 400.0, 1000, 0.25);
  CHECK(lp.rhs(0) == doctest::Approx(0.3));
  CHECK_THROWS_AS(build_lp_alg(b, m, 400.0, 1000, 1.0), ConfigError);
  CHECK_THROWS_AS(build_lp_alg(b, m, 400.0, 1000, -0.1), ConfigError);
}

TEST_CASE("build_lp_alg: zero consumption reduces to greedy over the polytope") {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 6);
    const int k = 1 + static_cast<int>(rng() % n);
    const auto m = MatroidConstraint::uniform(n, k);
    Eigen::VectorXd mu(n);
    for (int a = 0; a < n; ++a) mu(a) = uniform01(rng);
    const auto sol = solve_lp(build_lp_alg(exact_bounds(mu, Eigen::MatrixXd::Zero(n, 2)), m, 10.0, 100, 0.0));
    REQUIRE(sol.optimal());
    const double greedy = greedy_max_weight(m, mu).indicator().dot(mu);
    CHECK(sol.value == doctest::Approx(greedy).epsilon(1e-10));
  }
}

TEST_CASE("build_lp_alg on partitions matches vertex enumeration") {
  Rng rng(8);
  for (int trial = 0; trial < 60; ++trial) {
    const auto m = MatroidConstraint::partition(4, {{0, 1}, {2}}, {1, 1});
    Eigen::VectorXd mu(4);
    Eigen::MatrixXd c(4, 1);
    for (int a = 0; a < 4; ++a) {
      mu(a) = uniform01(rng);
      c(a, 0) = uniform01(rng);
    }
    const auto lp = build_lp_alg(exact_bounds(mu, c), m, 30.0 * uniform01(rng), 100, 0.1);
    const auto ref = oracle::vertex_enumeration(lp);
    REQUIRE(ref);
    const auto sol = solve_lp(lp);
    REQUIRE(sol.optimal());
    CHECK(sol.value == doctest::Approx(ref->value).epsilon(1e-9));
  }
}
