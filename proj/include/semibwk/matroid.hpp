#pragma once

#include <functional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "semibwk/core.hpp"

namespace semibwk {

/// coefficients . x <= rhs
struct LinearInequality {
  Eigen::VectorXd coefficients;
  double rhs = 0.0;
};

/// Cap rows plus the box lower <= x <= upper.
struct PolytopeDescription {
  std::vector<LinearInequality> rows;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct UniformMatroid {
  int capacity = 0;
};

struct PartitionMatroid {
  std::vector<std::vector<int>> groups;
  std::vector<int> caps;
};

/// General matroid given by its rank function. Feasibility queries and
/// greedy work; polytope emission and rounding report UnsupportedConstraint.
struct RankOracleMatroid {
  std::function<int(const std::vector<int>&)> rank;
};

/// Action family F over atoms 0..n-1.
class MatroidConstraint {
 public:
  using Kind = std::variant<UniformMatroid, PartitionMatroid, RankOracleMatroid>;

  /// A block of atoms whose chosen count is capped. Atoms outside every
  /// declared partition group form one trailing free group with cap = size.
  struct Group {
    std::vector<int> atoms;
    int cap = 0;
  };

  static MatroidConstraint uniform(int n, int capacity);
  static MatroidConstraint partition(int n, std::vector<std::vector<int>> groups,
                                     std::vector<int> caps);
  static MatroidConstraint from_rank_oracle(int n, std::function<int(const std::vector<int>&)> rank);

  int atoms() const { return n_; }
  const Kind& kind() const { return kind_; }
  bool is_uniform() const { return std::holds_alternative<UniformMatroid>(kind_); }
  bool is_partition() const { return std::holds_alternative<PartitionMatroid>(kind_); }

  /// `subset` must hold distinct indices in [0, n).
  bool is_feasible(const std::vector<int>& subset) const;
  bool is_feasible(const ActionVector& action) const { return is_feasible(action.atoms()); }

  int rank(const std::vector<int>& subset) const;

  PolytopeDescription polytope_constraints() const;

  std::vector<Group> groups() const;

  /// All feasible subsets ordered by cardinality, then lexicographically.
  /// Throws InstanceTooLarge once more than `max_count` sets would be listed.
  std::vector<ActionVector> enumerate_feasible(std::size_t max_count = 100000) const;

 private:
  MatroidConstraint(int n, Kind kind) : n_(n), kind_(std::move(kind)) {}

  int n_ = 0;
  Kind kind_;
};

/// Max-weight independent set by the matroid greedy rule: atoms sorted by
/// weight descending (ties to the lower index), non-positive weights skipped.
ActionVector greedy_max_weight(const MatroidConstraint& m, const Eigen::Ref<const Eigen::VectorXd>& weights);

}  // namespace semibwk
