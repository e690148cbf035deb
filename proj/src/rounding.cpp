#include "semibwk/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/distributions/binomial.hpp>

namespace semibwk {

namespace {

double snap(double v) {
  if (v < kIntegralSnap) return 0.0;
  if (v > 1.0 - kIntegralSnap) return 1.0;
  return v;
}

bool fractional(double v) { return v > 0.0 && v < 1.0; }

/// Rounds one group in place; `vals` are the group's coordinates in atom order.
template <typename Urbg>
void round_group(std::vector<double>& vals, int cap, Urbg& g) {
  std::vector<std::size_t> open;
  int ones = 0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    vals[i] = snap(vals[i]);
    if (fractional(vals[i])) open.push_back(i);
    else if (vals[i] == 1.0) ++ones;
  }
  while (open.size() >= 2) {
    double& xa = vals[open[0]];
    double& xb = vals[open[1]];
    const double up = std::min(1.0 - xa, xb);
    const double down = std::min(xa, 1.0 - xb);
    if (uniform01(g) * (up + down) < down) {
      xa += up;
      xb -= up;
    } else {
      xa -= down;
      xb += down;
    }
    xa = snap(xa);
    xb = snap(xb);
    for (std::size_t k : {std::size_t{1}, std::size_t{0}}) {
      const double v = vals[open[k]];
      if (!fractional(v)) {
        if (v == 1.0) ++ones;
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(k));
      }
    }
  }
  if (open.size() == 1) {
    double& xa = vals[open[0]];
    // A full group can only carry a tolerance-sized remainder here.
    xa = (ones < cap && uniform01(g) < xa) ? 1.0 : 0.0;
  }
}

struct Branch {
  std::vector<double> vals;
  double prob;
};

/// Exact law of round_group: every leaf of the branching tree with its probability.
void enumerate_group(std::vector<double> vals, int cap, double prob, std::vector<Branch>& leaves) {
  std::vector<std::size_t> open;
  int ones = 0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    vals[i] = snap(vals[i]);
    if (fractional(vals[i])) open.push_back(i);
    else if (vals[i] == 1.0) ++ones;
  }
  if (open.empty()) {
    leaves.push_back({std::move(vals), prob});
    return;
  }
  if (open.size() == 1) {
    const double xa = vals[open[0]];
    const double p_one = ones < cap ? xa : 0.0;
    auto hi = vals;
    hi[open[0]] = 1.0;
    vals[open[0]] = 0.0;
    if (p_one > 0.0) leaves.push_back({std::move(hi), prob * p_one});
    if (p_one < 1.0) leaves.push_back({std::move(vals), prob * (1.0 - p_one)});
    return;
  }
  const std::size_t a = open[0], b = open[1];
  const double up = std::min(1.0 - vals[a], vals[b]);
  const double down = std::min(vals[a], 1.0 - vals[b]);
  auto raised = vals;
  raised[a] += up;
  raised[b] -= up;
  auto lowered = std::move(vals);
  lowered[a] -= down;
  lowered[b] += down;
  enumerate_group(std::move(raised), cap, prob * down / (up + down), leaves);
  enumerate_group(std::move(lowered), cap, prob * up / (up + down), leaves);
}

}  // namespace

FractionalSolution FractionalSolution::ingest(const Eigen::Ref<const Eigen::VectorXd>& x,
                                              const MatroidConstraint& m, double tol) {
  if (x.size() != m.atoms()) throw ContractViolation("fractional solution size mismatch");
  FractionalSolution s{x};
  for (Eigen::Index a = 0; a < s.x.size(); ++a) {
    const double v = s.x(a);
    if (!std::isfinite(v) || v < -tol || v > 1.0 + tol)
      throw ContractViolation("fractional coordinate outside [0,1]");
    s.x(a) = std::clamp(v, 0.0, 1.0);
  }
  for (const auto& g : m.groups()) {
    double sum = 0.0;
    for (int a : g.atoms) sum += s.x(a);
    if (sum > g.cap + tol) throw ContractViolation("fractional solution violates a group cap");
  }
  return s;
}

ActionVector dependent_round(const FractionalSolution& x, const MatroidConstraint& m, Rng& rng) {
  const auto groups = m.groups();
  const std::uint64_t base = rng();
  std::vector<int> chosen;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    std::vector<double> vals;
    vals.reserve(g.atoms.size());
    for (int a : g.atoms) vals.push_back(x.x(a));
    SplitMix64 stream(derive_seed(base, static_cast<std::uint64_t>(gi)));
    round_group(vals, g.cap, stream);
    for (std::size_t i = 0; i < vals.size(); ++i)
      if (vals[i] == 1.0) chosen.push_back(g.atoms[i]);
  }
  return ActionVector::from_atoms(m.atoms(), std::move(chosen));
}

ActionVector dependent_round(const Eigen::Ref<const Eigen::VectorXd>& x, const MatroidConstraint& m,
                             Rng& rng) {
  return dependent_round(FractionalSolution::ingest(x, m), m, rng);
}

Eigen::VectorXd FiniteDistribution::mean() const {
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(dim);
  for (std::size_t k = 0; k < outcomes.size(); ++k) mu += probabilities[k] * outcomes[k];
  return mu;
}

double FiniteDistribution::total_probability() const {
  double total = 0.0;
  for (double p : probabilities) total += p;
  return total;
}

FiniteDistribution product_distribution(const Eigen::Ref<const Eigen::VectorXd>& p) {
  const int n = static_cast<int>(p.size());
  if (n > 20) throw ContractViolation("product_distribution: dimension too large");
  FiniteDistribution d;
  d.dim = n;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Eigen::VectorXd y(n);
    double prob = 1.0;
    for (int i = 0; i < n; ++i) {
      const bool on = (mask >> i) & 1U;
      y(i) = on ? 1.0 : 0.0;
      prob *= on ? p(i) : 1.0 - p(i);
    }
    if (prob > 0.0) {
      d.outcomes.push_back(std::move(y));
      d.probabilities.push_back(prob);
    }
  }
  return d;
}

FiniteDistribution rounding_distribution(const Eigen::Ref<const Eigen::VectorXd>& x,
                                         const MatroidConstraint& m) {
  const FractionalSolution fs = FractionalSolution::ingest(x, m);
  const int n = m.atoms();
  if (n > 20) throw ContractViolation("rounding_distribution: n must be <= 20");

  // Joint law as a map from chosen-atom bitmask to probability.
  std::map<std::uint64_t, double> joint{{0, 1.0}};
  for (const auto& g : m.groups()) {
    std::vector<double> vals;
    for (int a : g.atoms) vals.push_back(fs.x(a));
    std::vector<Branch> leaves;
    enumerate_group(std::move(vals), g.cap, 1.0, leaves);
    std::map<std::uint64_t, double> next;
    for (const auto& [mask, p] : joint) {
      for (const auto& leaf : leaves) {
        std::uint64_t m2 = mask;
        for (std::size_t i = 0; i < leaf.vals.size(); ++i)
          if (leaf.vals[i] == 1.0) m2 |= std::uint64_t{1} << g.atoms[i];
        next[m2] += p * leaf.prob;
      }
    }
    joint = std::move(next);
  }

  FiniteDistribution d;
  d.dim = n;
  for (const auto& [mask, p] : joint) {
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = ((mask >> i) & 1U) ? 1.0 : 0.0;
    d.outcomes.push_back(std::move(y));
    d.probabilities.push_back(p);
  }
  return d;
}

NegativeCorrelationReport check_negative_correlation(const FiniteDistribution& dist, double tol) {
  const int n = dist.dim;
  if (n > 16) throw ContractViolation("check_negative_correlation: dim must be <= 16");
  const Eigen::VectorXd mu = dist.mean();
  NegativeCorrelationReport report;
  report.worst_gap = -std::numeric_limits<double>::infinity();
  for (std::uint64_t s = 1; s < (std::uint64_t{1} << n); ++s) {
    for (bool complement : {false, true}) {
      double expected_product = 0.0;
      for (std::size_t k = 0; k < dist.outcomes.size(); ++k) {
        double prod = 1.0;
        for (int i = 0; i < n && prod != 0.0; ++i)
          if ((s >> i) & 1U) prod *= complement ? 1.0 - dist.outcomes[k](i) : dist.outcomes[k](i);
        expected_product += dist.probabilities[k] * prod;
      }
      double product_of_means = 1.0;
      for (int i = 0; i < n; ++i)
        if ((s >> i) & 1U) product_of_means *= complement ? 1.0 - mu(i) : mu(i);
      const double gap = expected_product - product_of_means;
      if (gap > report.worst_gap) {
        report.worst_gap = gap;
        report.worst_subset = s;
        report.worst_is_complement = complement;
      }
    }
  }
  if (n == 0) report.worst_gap = 0.0;
  report.holds = report.worst_gap <= tol;
  return report;
}

bool verify_negative_correlation(const FiniteDistribution& dist, double tol) {
  return check_negative_correlation(dist, tol).holds;
}

FiniteDistribution claim3_family(const FiniteDistribution& dist,
                                 const Eigen::Ref<const Eigen::VectorXd>& lambdas, int sign) {
  if (lambdas.size() != dist.dim) throw ContractViolation("claim3: lambda size mismatch");
  if ((lambdas.array() < 0.0).any() || (lambdas.array() > 1.0).any())
    throw ContractViolation("claim3: lambdas must lie in [0,1]");
  const Eigen::VectorXd mu = dist.mean();
  const double s = sign >= 0 ? 1.0 : -1.0;
  FiniteDistribution out;
  out.dim = dist.dim;
  out.probabilities = dist.probabilities;
  out.outcomes.reserve(dist.outcomes.size());
  for (const auto& x : dist.outcomes)
    out.outcomes.push_back(
        ((1.0 + s * lambdas.array() * (x - mu).array()) / 2.0).matrix());
  return out;
}

bool verify_claim3_transform(const FiniteDistribution& dist,
                             const Eigen::Ref<const Eigen::VectorXd>& lambdas, double tol) {
  const int n = dist.dim;
  if (n > 16) throw ContractViolation("verify_claim3_transform: dim must be <= 16");
  for (int sign : {+1, -1}) {
    const FiniteDistribution fam = claim3_family(dist, lambdas, sign);
    for (std::uint64_t s = 1; s < (std::uint64_t{1} << n); ++s) {
      double expected_product = 0.0;
      for (std::size_t k = 0; k < fam.outcomes.size(); ++k) {
        double prod = 1.0;
        for (int i = 0; i < n; ++i)
          if ((s >> i) & 1U) prod *= fam.outcomes[k](i);
        expected_product += fam.probabilities[k] * prod;
      }
      const double half_power = std::ldexp(1.0, -__builtin_popcountll(s));
      if (expected_product > half_power + tol) return false;
    }
  }
  return true;
}

TailEstimate estimate_tail(long long samples, int n_vars, double eta, Rng& rng, int block_size) {
  if (samples < 1 || n_vars < 1 || block_size < 1)
    throw ContractViolation("estimate_tail: need samples, n_vars, block_size >= 1");
  std::vector<std::vector<int>> blocks;
  std::vector<int> caps;
  for (int a = 0; a < n_vars; a += block_size) {
    blocks.emplace_back();
    for (int b = a; b < std::min(n_vars, a + block_size); ++b) blocks.back().push_back(b);
    caps.push_back(static_cast<int>(blocks.back().size()));
  }
  const auto m = MatroidConstraint::partition(n_vars, std::move(blocks), std::move(caps));
  const auto half = FractionalSolution::ingest(Eigen::VectorXd::Constant(n_vars, 0.5), m);
  const double threshold = 0.5 + eta;

  TailEstimate est;
  est.samples = samples;
  for (long long s = 0; s < samples; ++s) {
    const ActionVector y = dependent_round(half, m, rng);
    const double mean = static_cast<double>(y.cardinality()) / n_vars;
    if (mean >= threshold) ++est.hits;
  }
  est.frequency = static_cast<double>(est.hits) / static_cast<double>(samples);
  est.upper_confidence = boost::math::binomial_distribution<>::find_upper_bound_on_p(
      static_cast<double>(samples), static_cast<double>(est.hits), 0.01);
  est.bound = 3.0 * std::exp(-2.0 * n_vars * eta * eta);
  return est;
}

RoundingCase random_rounding_case(Rng& rng, int max_n) {
  if (max_n < 1) throw ContractViolation("random_rounding_case: max_n must be >= 1");
  const int n = std::uniform_int_distribution<int>(1, max_n)(rng);
  MatroidConstraint m = MatroidConstraint::uniform(n, std::uniform_int_distribution<int>(1, n)(rng));
  if (uniform01(rng) < 0.5) {
    const int blocks = std::uniform_int_distribution<int>(1, std::min(n, 4))(rng);
    std::vector<std::vector<int>> groups(static_cast<std::size_t>(blocks));
    for (int a = 0; a < n; ++a) {
      if (uniform01(rng) < 0.2) continue;  // left free
      groups[static_cast<std::size_t>(std::uniform_int_distribution<int>(0, blocks - 1)(rng))].push_back(a);
    }
    std::vector<int> caps;
    for (const auto& g : groups)
      caps.push_back(g.empty() ? 0 : std::uniform_int_distribution<int>(1, static_cast<int>(g.size()))(rng));
    m = MatroidConstraint::partition(n, std::move(groups), std::move(caps));
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (const auto& g : m.groups()) {
    double sum = 0.0;
    for (int a : g.atoms) {
      const double r = uniform01(rng);
      x(a) = r < 0.1 ? 0.0 : (r < 0.15 ? 1.0 : uniform01(rng));
      sum += x(a);
    }
    if (sum <= 0.0) continue;
    // Shrink into the cap; a third of the groups end up tight.
    double scale = std::min(1.0, g.cap / sum);
    if (uniform01(rng) >= 1.0 / 3.0) scale *= uniform01(rng);
    for (int a : g.atoms) x(a) = snap(x(a) * scale);
  }
  return {std::move(m), std::move(x)};
}

RoundingSuiteReport run_rounding_suite(const RoundingSuiteOptions& options) {
  RoundingSuiteReport rep;
  const double samples = static_cast<double>(options.samples);
  rep.covariance_limit = 4.0 / std::sqrt(samples);

  Rng rng(derive_seed(options.seed, std::string_view("rounding-suite")));
  for (int p = 0; p < options.points; ++p) {
    const RoundingCase c = random_rounding_case(rng, options.max_n);
    const auto n = c.x.size();
    const auto fx = FractionalSolution::ingest(c.x, c.constraint);
    Eigen::VectorXd hits = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd both = Eigen::MatrixXd::Zero(n, n);
    for (long long s = 0; s < options.samples; ++s) {
      const auto action = dependent_round(fx, c.constraint, rng);
      const auto& atoms = action.atoms();
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        hits(atoms[i]) += 1.0;
        for (std::size_t j = i + 1; j < atoms.size(); ++j) both(atoms[i], atoms[j]) += 1.0;
      }
    }
    const Eigen::VectorXd mean = hits / samples;
    for (Eigen::Index a = 0; a < n; ++a) {
      const double xa = fx.x(a);
      const double allowance = 4.0 * std::sqrt(xa * (1.0 - xa) / samples) + 1e-6;
      rep.marginal_worst_excess = std::max(rep.marginal_worst_excess, std::abs(mean(a) - xa) - allowance);
      for (Eigen::Index b = a + 1; b < n; ++b)
        rep.worst_covariance = std::max(rep.worst_covariance, both(a, b) / samples - mean(a) * mean(b));
    }
    ++rep.marginal_points;
  }

  const double grid[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int n = 1; n <= 4; ++n) {
    int combos = 1;
    for (int i = 0; i < n; ++i) combos *= 5;
    for (int code = 0; code < combos; ++code) {
      Eigen::VectorXd x(n);
      int rest = code;
      for (int i = 0; i < n; ++i, rest /= 5) x(i) = grid[rest % 5];
      const int cap = std::max(1, static_cast<int>(std::ceil(x.sum() - 1e-9)));
      const auto dist = rounding_distribution(x, MatroidConstraint::uniform(n, cap));
      ++rep.exhaustive_points;
      if (!verify_negative_correlation(dist)) ++rep.exhaustive_failures;
    }
  }

  for (int p = 0; p < options.claim3_pairs; ++p) {
    const RoundingCase c = random_rounding_case(rng, 4);
    const auto dist = rounding_distribution(c.x, c.constraint);
    Eigen::VectorXd lambdas(c.x.size());
    for (Eigen::Index i = 0; i < lambdas.size(); ++i) lambdas(i) = uniform01(rng);
    ++rep.claim3_pairs;
    if (!verify_claim3_transform(dist, lambdas)) ++rep.claim3_failures;
  }
  return rep;
}

}  // namespace semibwk
