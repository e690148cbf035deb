#include "semibwk/environments.hpp"

#include <cmath>

namespace semibwk {

EnvMode parse_env_mode(const std::string& s) {
  if (s == "standard") return EnvMode::Standard;
  if (s == "modified") return EnvMode::Modified;
  throw ConfigError("unknown environment mode '" + s + "'");
}

MatroidChoice parse_matroid_choice(const std::string& s) {
  if (s == "uniform") return MatroidChoice::Uniform;
  if (s == "partition") return MatroidChoice::Partition;
  throw ConfigError("unknown matroid '" + s + "'");
}

std::string to_string(EnvMode mode) { return mode == EnvMode::Standard ? "standard" : "modified"; }

std::string to_string(MatroidChoice choice) {
  return choice == MatroidChoice::Uniform ? "uniform" : "partition";
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// ---------------------------------------------------------------------------

AssortmentEnv::AssortmentEnv(Eigen::VectorXd prices, EnvMode mode)
    : prices_(std::move(prices)), mode_(mode) {
  if (prices_.size() < 1) throw ContractViolation("assortment needs n >= 1");
  if ((prices_.array() < 0.0).any() || (prices_.array() > 1.0).any())
    throw ContractViolation("assortment prices must lie in [0,1]");
}

OutcomeMatrix AssortmentEnv::sample(int /*round*/, Rng& rng) const {
  const int n = atoms();
  OutcomeMatrix out{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n)};
  for (int a = 0; a < n; ++a) {
    const double v = uniform01(rng);
    if (v >= prices_(a)) {
      out.rewards(a) = prices_(a);
      out.consumption(a, a) = 1.0;
    } else if (mode_ == EnvMode::Modified) {
      out.rewards(a) = v;
      out.consumption(a, a) = v;
    }
  }
  return out;
}

std::optional<Eigen::VectorXd> AssortmentEnv::mean_rewards() const {
  const Eigen::ArrayXd p = prices_.array();
  Eigen::ArrayXd mean = p * (1.0 - p);
  if (mode_ == EnvMode::Modified) mean += p.square() / 2.0;
  return Eigen::VectorXd(mean.matrix());
}

std::optional<Eigen::MatrixXd> AssortmentEnv::mean_consumption() const {
  const Eigen::ArrayXd p = prices_.array();
  Eigen::ArrayXd rate = 1.0 - p;
  if (mode_ == EnvMode::Modified) rate += p.square() / 2.0;
  return Eigen::MatrixXd(rate.matrix().asDiagonal());
}

// ---------------------------------------------------------------------------

PricingEnv::PricingEnv(int n, Eigen::VectorXd mean_valuations, EnvMode mode)
    : n_(n), mean_valuations_(std::move(mean_valuations)), mode_(mode) {
  const auto products = mean_valuations_.size();
  if (products < 1 || n < products || n % products != 0)
    throw ConfigError("pricing: n must be a positive multiple of the product count");
  prices_ = price_grid(n / static_cast<int>(products));
}

std::vector<double> PricingEnv::price_grid(int points) {
  if (points < 1) throw ConfigError("price grid needs at least one point");
  if (points == 1) return {0.5};
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) grid[static_cast<std::size_t>(k)] = static_cast<double>(k) / (points - 1);
  return grid;
}

double PricingEnv::sale_probability(double v0, double price) {
  if (price <= 0.0) return 1.0;
  if (price > 1.0) return 0.0;
  const double lo = normal_cdf(-v0);
  const double hi = normal_cdf(1.0 - v0);
  return (hi - normal_cdf(price - v0)) / (hi - lo);
}

double PricingEnv::sample_valuation(double v0, Rng& rng) {
  std::normal_distribution<double> normal(v0, 1.0);
  for (;;) {
    const double v = normal(rng);
    if (v >= 0.0 && v <= 1.0) return v;
  }
}

OutcomeMatrix PricingEnv::sample(int /*round*/, Rng& rng) const {
  const int d = resources();
  const int k = prices_per_product();
  OutcomeMatrix out{Eigen::VectorXd::Zero(n_), Eigen::MatrixXd::Zero(n_, d)};
  for (int i = 0; i < d; ++i) {
    const double v = sample_valuation(mean_valuations_(i), rng);
    for (int q = 0; q < k; ++q) {
      const int atom = i * k + q;
      const double p = prices_[static_cast<std::size_t>(q)];
      if (v >= p) {
        out.rewards(atom) = p;
        out.consumption(atom, i) = 1.0;
      } else if (mode_ == EnvMode::Modified) {
        out.consumption(atom, i) = 0.3;
      }
    }
  }
  return out;
}

std::optional<Eigen::VectorXd> PricingEnv::mean_rewards() const {
  Eigen::VectorXd mean(n_);
  for (int a = 0; a < n_; ++a)
    mean(a) = price_of(a) * sale_probability(mean_valuations_(product_of(a)), price_of(a));
  return mean;
}

std::optional<Eigen::MatrixXd> PricingEnv::mean_consumption() const {
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(n_, resources());
  for (int a = 0; a < n_; ++a) {
    const double s = sale_probability(mean_valuations_(product_of(a)), price_of(a));
    mean(a, product_of(a)) = mode_ == EnvMode::Modified ? s + 0.3 * (1.0 - s) : s;
  }
  return mean;
}

// ---------------------------------------------------------------------------

BiddingEnv::BiddingEnv(std::vector<double> bid_levels, Eigen::VectorXd values,
                       Eigen::MatrixXd win_prob)
    : bids_(std::move(bid_levels)), values_(std::move(values)), win_prob_(std::move(win_prob)) {
  if (values_.size() < 1 || bids_.empty()) throw ConfigError("bidding needs r >= 1 and a bid level");
  if (win_prob_.rows() != values_.size() || win_prob_.cols() != static_cast<Eigen::Index>(bids_.size()))
    throw ContractViolation("bidding: win probability matrix must be r x |S|");
  for (double b : bids_)
    if (b < 0.0 || b > 1.0) throw ConfigError("bid levels must lie in [0,1]");
}

OutcomeMatrix BiddingEnv::sample(int /*round*/, Rng& rng) const {
  const int r = auctions();
  const int k = static_cast<int>(bids_.size());
  OutcomeMatrix out{Eigen::VectorXd::Zero(atoms()), Eigen::MatrixXd::Zero(atoms(), 1)};
  for (int i = 0; i < r; ++i) {
    const double competition = uniform01(rng);
    const bool satisfied = uniform01(rng) < values_(i);
    for (int q = 0; q < k; ++q) {
      if (competition < win_prob_(i, q)) {
        const int atom = i * k + q;
        out.rewards(atom) = satisfied ? 1.0 : 0.0;
        out.consumption(atom, 0) = bids_[static_cast<std::size_t>(q)];
      }
    }
  }
  return out;
}

std::optional<Eigen::VectorXd> BiddingEnv::mean_rewards() const {
  const int k = static_cast<int>(bids_.size());
  Eigen::VectorXd mean(atoms());
  for (int i = 0; i < auctions(); ++i)
    for (int q = 0; q < k; ++q) mean(i * k + q) = win_prob_(i, q) * values_(i);
  return mean;
}

std::optional<Eigen::MatrixXd> BiddingEnv::mean_consumption() const {
  const int k = static_cast<int>(bids_.size());
  Eigen::MatrixXd mean(atoms(), 1);
  for (int i = 0; i < auctions(); ++i)
    for (int q = 0; q < k; ++q) mean(i * k + q, 0) = win_prob_(i, q) * bids_[static_cast<std::size_t>(q)];
  return mean;
}

// ---------------------------------------------------------------------------

namespace {

MatroidConstraint contiguous_blocks(int n, int blocks) {
  blocks = std::max(1, std::min(blocks, n));
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(blocks));
  for (int a = 0; a < n; ++a)
    groups[static_cast<std::size_t>(static_cast<long long>(a) * blocks / n)].push_back(a);
  return MatroidConstraint::partition(n, std::move(groups), std::vector<int>(static_cast<std::size_t>(blocks), 1));
}

}  // namespace

EnvironmentInstance make_assortment(int n, EnvMode mode, MatroidChoice matroid, std::uint64_t seed,
                                    int capacity) {
  if (n < 1) throw ConfigError("assortment needs n >= 1");
  Rng rng(derive_seed(seed, std::string_view("assortment-prices")));
  Eigen::VectorXd prices(n);
  for (int a = 0; a < n; ++a) prices(a) = uniform01(rng);
  auto env = std::make_shared<AssortmentEnv>(std::move(prices), mode);
  auto constraint = matroid == MatroidChoice::Uniform
                        ? MatroidConstraint::uniform(n, std::min(capacity, n))
                        : contiguous_blocks(n, capacity);
  return {std::move(env), std::move(constraint)};
}

EnvironmentInstance make_pricing(int n, EnvMode mode, MatroidChoice matroid, std::uint64_t seed,
                                 int capacity) {
  if (n < 2 || n % 2 != 0) throw ConfigError("pricing needs an even n >= 2");
  Rng rng(derive_seed(seed, std::string_view("pricing-valuations")));
  Eigen::VectorXd v0(2);
  v0(0) = uniform01(rng);
  v0(1) = uniform01(rng);
  auto env = std::make_shared<PricingEnv>(n, std::move(v0), mode);
  const int k = n / 2;
  MatroidConstraint constraint = MatroidConstraint::uniform(n, std::min(capacity, n));
  if (matroid == MatroidChoice::Partition) {
    std::vector<std::vector<int>> groups(2);
    for (int a = 0; a < n; ++a) groups[static_cast<std::size_t>(a / k)].push_back(a);
    constraint = MatroidConstraint::partition(n, std::move(groups), {1, 1});
  }
  return {std::move(env), std::move(constraint)};
}

EnvironmentInstance make_bidding(int auctions, std::vector<double> bid_levels, std::uint64_t seed) {
  if (auctions < 1) throw ConfigError("bidding needs r >= 1");
  Rng rng(derive_seed(seed, std::string_view("bidding-values")));
  Eigen::VectorXd values(auctions);
  for (int i = 0; i < auctions; ++i) values(i) = uniform01(rng);
  const auto k = static_cast<Eigen::Index>(bid_levels.size());
  Eigen::MatrixXd win(auctions, k);
  for (int i = 0; i < auctions; ++i)
    for (Eigen::Index q = 0; q < k; ++q) win(i, q) = bid_levels[static_cast<std::size_t>(q)];
  const int levels = static_cast<int>(k);
  auto env = std::make_shared<BiddingEnv>(std::move(bid_levels), std::move(values), std::move(win));
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(auctions));
  for (int i = 0; i < auctions; ++i)
    for (int q = 0; q < levels; ++q) groups[static_cast<std::size_t>(i)].push_back(i * levels + q);
  auto constraint = MatroidConstraint::partition(auctions * levels, std::move(groups),
                                                 std::vector<int>(static_cast<std::size_t>(auctions), 1));
  return {std::move(env), std::move(constraint)};
}

}  // namespace semibwk
