#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "semibwk/core.hpp"
#include "semibwk/matroid.hpp"

namespace semibwk {

/// Coordinates within this distance of 0 or 1 are treated as integral.
inline constexpr double kIntegralSnap = 1e-12;

/// An LP point accepted as rounding input.
struct FractionalSolution {
  Eigen::VectorXd x;

  /// Clamps coordinates into [0,1] and checks every group sum against its
  /// cap with slack `tol`. Throws ContractViolation on failure.
  static FractionalSolution ingest(const Eigen::Ref<const Eigen::VectorXd>& x,
                                   const MatroidConstraint& m, double tol = 1e-7);
};

/// Dependent (pair) rounding, group by group. The output is always feasible,
/// E[Y] = x, and coordinates within a group are negatively correlated.
/// Groups use independent sub-streams seeded from one draw of `rng`.
ActionVector dependent_round(const FractionalSolution& x, const MatroidConstraint& m, Rng& rng);
ActionVector dependent_round(const Eigen::Ref<const Eigen::VectorXd>& x, const MatroidConstraint& m,
                             Rng& rng);

/// Explicit finite distribution over vectors in [0,1]^dim.
struct FiniteDistribution {
  int dim = 0;
  std::vector<Eigen::VectorXd> outcomes;
  std::vector<double> probabilities;

  Eigen::VectorXd mean() const;
  double total_probability() const;
};

FiniteDistribution product_distribution(const Eigen::Ref<const Eigen::VectorXd>& p);

/// The exact output law of dependent_round(x, m), by walking its branching
/// tree. Intended for small n (<= 20).
FiniteDistribution rounding_distribution(const Eigen::Ref<const Eigen::VectorXd>& x,
                                         const MatroidConstraint& m);

struct NegativeCorrelationReport {
  bool holds = true;
  double worst_gap = 0.0;      // max of E[prod] - prod E over all checked subsets
  std::uint64_t worst_subset = 0;
  bool worst_is_complement = false;
};

/// Checks E[prod_{i in S} X_i] <= prod E[X_i] and the same for 1 - X_i, for
/// every subset S (dim <= 16).
NegativeCorrelationReport check_negative_correlation(const FiniteDistribution& dist,
                                                     double tol = 1e-9);
bool verify_negative_correlation(const FiniteDistribution& dist, double tol = 1e-9);

/// Maps X to the families (1 +/- lambda_i (X_i - E X_i)) / 2.
FiniteDistribution claim3_family(const FiniteDistribution& dist,
                                 const Eigen::Ref<const Eigen::VectorXd>& lambdas, int sign);

/// Both transformed families satisfy E[prod_{i in S} Y_i] <= (1/2)^{|S|}.
bool verify_claim3_transform(const FiniteDistribution& dist,
                             const Eigen::Ref<const Eigen::VectorXd>& lambdas, double tol = 1e-9);

struct TailEstimate {
  long long samples = 0;
  long long hits = 0;
  double frequency = 0.0;
  double upper_confidence = 0.0;  // Clopper-Pearson, one-sided 99%
  double bound = 0.0;             // 3 * exp(-2 m eta^2)
};

/// Monte-Carlo frequency of {mean(Y) >= 1/2 + eta} for Y rounded from
/// x = (1/2, ..., 1/2). Atoms are split into contiguous blocks of
/// `block_size`, each an uncapped partition group that is pair-rounded
/// internally; block_size 1 gives independent coordinates.
TailEstimate estimate_tail(long long samples, int n_vars, double eta, Rng& rng, int block_size = 1);

struct RoundingCase {
  MatroidConstraint constraint;
  Eigen::VectorXd x;
};

/// A uniform or partition matroid on 1..max_n atoms with a random point of
/// its polytope; some coordinates are integral and some groups are tight.
RoundingCase random_rounding_case(Rng& rng, int max_n);

struct RoundingSuiteOptions {
  int points = 200;
  long long samples = 100000;
  int max_n = 20;
  int claim3_pairs = 100;
  std::uint64_t seed = 1;
};

struct RoundingSuiteReport {
  // Sampled: |mean(Y_a) - x_a| <= 4 sqrt(x_a (1 - x_a) / N) + 1e-6.
  int marginal_points = 0;
  double marginal_worst_excess = -1.0;  // max over atoms of |error| - allowance
  // Sampled: Cov(Y_a, Y_b) <= 4 / sqrt(N).
  double worst_covariance = 0.0;
  double covariance_limit = 0.0;
  // Exhaustive: one group, coordinates in {0, .25, .5, .75, 1}, n <= 4.
  int exhaustive_points = 0;
  int exhaustive_failures = 0;
  // Exhaustive laws with random lambda in [0,1]^n.
  int claim3_pairs = 0;
  int claim3_failures = 0;

  bool marginals_ok() const { return marginal_worst_excess <= 0.0; }
  bool covariance_ok() const { return worst_covariance <= covariance_limit; }
  bool exhaustive_ok() const { return exhaustive_failures == 0; }
  bool claim3_ok() const { return claim3_failures == 0; }
  bool passed() const { return marginals_ok() && covariance_ok() && exhaustive_ok() && claim3_ok(); }
};

RoundingSuiteReport run_rounding_suite(const RoundingSuiteOptions& options);

}  // namespace semibwk
