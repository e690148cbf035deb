#include "semibwk/matroid.hpp"

#include <algorithm>
#include <numeric>

namespace semibwk {

MatroidConstraint MatroidConstraint::uniform(int n, int capacity) {
  if (n < 0 || capacity < 0 || capacity > n)
    throw ContractViolation("uniform matroid requires 0 <= K <= n");
  return MatroidConstraint(n, UniformMatroid{capacity});
}

MatroidConstraint MatroidConstraint::partition(int n, std::vector<std::vector<int>> groups,
                                               std::vector<int> caps) {
  if (groups.size() != caps.size()) throw ContractViolation("partition: one cap per group");
  std::vector<char> seen(static_cast<std::size_t>(std::max(n, 0)), 0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto& block = groups[g];
    std::sort(block.begin(), block.end());
    for (int a : block) {
      if (a < 0 || a >= n) throw ContractViolation("partition: atom out of range");
      if (seen[static_cast<std::size_t>(a)]++) throw ContractViolation("partition: groups overlap");
    }
    if (caps[g] < 0 || caps[g] > static_cast<int>(block.size()))
      throw ContractViolation("partition: cap must satisfy 0 <= d_i <= |B_i|");
  }
  return MatroidConstraint(n, PartitionMatroid{std::move(groups), std::move(caps)});
}

MatroidConstraint MatroidConstraint::from_rank_oracle(
    int n, std::function<int(const std::vector<int>&)> rank) {
  if (!rank) throw ContractViolation("rank oracle must be callable");
  return MatroidConstraint(n, RankOracleMatroid{std::move(rank)});
}

bool MatroidConstraint::is_feasible(const std::vector<int>& subset) const {
  struct Visitor {
    const std::vector<int>& s;
    bool operator()(const UniformMatroid& u) const {
      return static_cast<int>(s.size()) <= u.capacity;
    }
    bool operator()(const PartitionMatroid& p) const {
      for (std::size_t g = 0; g < p.groups.size(); ++g) {
        const auto& block = p.groups[g];
        const auto hits = std::count_if(s.begin(), s.end(), [&](int a) {
          return std::binary_search(block.begin(), block.end(), a);
        });
        if (hits > p.caps[g]) return false;
      }
      return true;
    }
    bool operator()(const RankOracleMatroid& r) const {
      return r.rank(s) == static_cast<int>(s.size());
    }
  };
  return std::visit(Visitor{subset}, kind_);
}

int MatroidConstraint::rank(const std::vector<int>& subset) const {
  if (const auto* r = std::get_if<RankOracleMatroid>(&kind_)) return r->rank(subset);
  // Greedy with unit weights on the subset.
  std::vector<int> chosen;
  std::vector<int> sorted = subset;
  std::sort(sorted.begin(), sorted.end());
  for (int a : sorted) {
    chosen.push_back(a);
    if (!is_feasible(chosen)) chosen.pop_back();
  }
  return static_cast<int>(chosen.size());
}

PolytopeDescription MatroidConstraint::polytope_constraints() const {
  PolytopeDescription p;
  p.lower = Eigen::VectorXd::Zero(n_);
  p.upper = Eigen::VectorXd::Ones(n_);
  if (const auto* u = std::get_if<UniformMatroid>(&kind_)) {
    p.rows.push_back({Eigen::VectorXd::Ones(n_), static_cast<double>(u->capacity)});
  } else if (const auto* part = std::get_if<PartitionMatroid>(&kind_)) {
    for (std::size_t g = 0; g < part->groups.size(); ++g) {
      LinearInequality row{Eigen::VectorXd::Zero(n_), static_cast<double>(part->caps[g])};
      for (int a : part->groups[g]) row.coefficients(a) = 1.0;
      p.rows.push_back(std::move(row));
    }
  } else {
    throw UnsupportedConstraint("polytope emission is only available for uniform/partition matroids");
  }
  return p;
}

std::vector<MatroidConstraint::Group> MatroidConstraint::groups() const {
  std::vector<Group> out;
  if (const auto* u = std::get_if<UniformMatroid>(&kind_)) {
    Group g;
    g.atoms.resize(static_cast<std::size_t>(n_));
    std::iota(g.atoms.begin(), g.atoms.end(), 0);
    g.cap = u->capacity;
    out.push_back(std::move(g));
  } else if (const auto* part = std::get_if<PartitionMatroid>(&kind_)) {
    std::vector<char> covered(static_cast<std::size_t>(n_), 0);
    for (std::size_t i = 0; i < part->groups.size(); ++i) {
      out.push_back({part->groups[i], part->caps[i]});
      for (int a : part->groups[i]) covered[static_cast<std::size_t>(a)] = 1;
    }
    Group free;
    for (int a = 0; a < n_; ++a)
      if (!covered[static_cast<std::size_t>(a)]) free.atoms.push_back(a);
    free.cap = static_cast<int>(free.atoms.size());
    if (!free.atoms.empty()) out.push_back(std::move(free));
  } else {
    throw UnsupportedConstraint("group structure is only defined for uniform/partition matroids");
  }
  return out;
}

std::vector<ActionVector> MatroidConstraint::enumerate_feasible(std::size_t max_count) const {
  std::vector<std::vector<int>> found;
  std::vector<int> current;
  // Depth-first over increasing atom indices; pruning on infeasibility is
  // complete because feasibility is downward closed.
  std::function<void(int)> extend = [&](int next) {
    if (found.size() >= max_count)
      throw InstanceTooLarge("action set exceeds enumeration cap of " + std::to_string(max_count));
    found.push_back(current);
    for (int a = next; a < n_; ++a) {
      current.push_back(a);
      if (is_feasible(current)) extend(a + 1);
      current.pop_back();
    }
  };
  extend(0);
  std::stable_sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
    if (x.size() != y.size()) return x.size() < y.size();
    return x < y;
  });
  std::vector<ActionVector> out;
  out.reserve(found.size());
  for (auto& s : found) out.push_back(ActionVector::from_atoms(n_, std::move(s)));
  return out;
}

ActionVector greedy_max_weight(const MatroidConstraint& m, const Eigen::Ref<const Eigen::VectorXd>& weights) {
  const int n = m.atoms();
  if (weights.size() != n) throw ContractViolation("greedy: weight vector size mismatch");
  if (!weights.allFinite()) throw ContractViolation("greedy: weights must be finite");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return weights(a) > weights(b); });
  std::vector<int> chosen;
  for (int a : order) {
    if (weights(a) <= 0.0) break;
    chosen.push_back(a);
    if (!m.is_feasible(chosen)) chosen.pop_back();
  }
  return ActionVector::from_atoms(n, std::move(chosen));
}

}  // namespace semibwk
