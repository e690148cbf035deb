#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "semibwk/core.hpp"
#include "semibwk/matroid.hpp"

namespace semibwk {

enum class EnvMode { Standard, Modified };
enum class MatroidChoice { Uniform, Partition };

EnvMode parse_env_mode(const std::string& s);
MatroidChoice parse_matroid_choice(const std::string& s);
std::string to_string(EnvMode mode);
std::string to_string(MatroidChoice choice);

/// Standard normal CDF.
double normal_cdf(double z);

/// Fixed-price assortment: atom a = product a = resource a. A buyer with
/// valuation v ~ U[0,1] buys product a iff v >= p_a.
/// Modified mode: on no sale both reward and consumption equal v.
class AssortmentEnv : public Environment {
 public:
  AssortmentEnv(Eigen::VectorXd prices, EnvMode mode);

  std::string name() const override { return "assortment"; }
  int atoms() const override { return static_cast<int>(prices_.size()); }
  int resources() const override { return atoms(); }
  OutcomeMatrix sample(int round, Rng& rng) const override;
  std::optional<Eigen::VectorXd> mean_rewards() const override;
  std::optional<Eigen::MatrixXd> mean_consumption() const override;

  const Eigen::VectorXd& prices() const { return prices_; }
  EnvMode mode() const { return mode_; }

 private:
  Eigen::VectorXd prices_;
  EnvMode mode_;
};

/// Two-product pricing over a grid of n/2 prices. Atom (product i, price k)
/// has index i * (n/2) + k; resource i is product i's inventory. Valuations
/// are N(v0_i, 1) truncated to [0,1] and a sale happens iff v >= price.
/// Modified mode: a non-selling atom earns 0 and consumes 0.3.
class PricingEnv : public Environment {
 public:
  PricingEnv(int n, Eigen::VectorXd mean_valuations, EnvMode mode);

  static std::vector<double> price_grid(int points);

  std::string name() const override { return "pricing"; }
  int atoms() const override { return n_; }
  int resources() const override { return static_cast<int>(mean_valuations_.size()); }
  OutcomeMatrix sample(int round, Rng& rng) const override;
  std::optional<Eigen::VectorXd> mean_rewards() const override;
  std::optional<Eigen::MatrixXd> mean_consumption() const override;

  int prices_per_product() const { return static_cast<int>(prices_.size()); }
  const std::vector<double>& prices() const { return prices_; }
  const Eigen::VectorXd& mean_valuations() const { return mean_valuations_; }
  double price_of(int atom) const { return prices_[static_cast<std::size_t>(atom % prices_per_product())]; }
  int product_of(int atom) const { return atom / prices_per_product(); }

  /// P[V >= p] for V ~ N(v0, 1) truncated to [0,1].
  static double sale_probability(double v0, double price);
  /// Rejection sampler for N(v0, 1) truncated to [0,1].
  static double sample_valuation(double v0, Rng& rng);

 private:
  int n_;
  std::vector<double> prices_;
  Eigen::VectorXd mean_valuations_;
  EnvMode mode_;
};

/// Repeated bidding in r auctions over a common set of bid levels; atom
/// (auction i, level k) has index i * |S| + k. One resource: money.
/// Each round each auction draws u ~ U[0,1]; bid k wins iff u < win_prob(i,k).
/// A win pays the bid and yields utility Bernoulli(value_i).
class BiddingEnv : public Environment {
 public:
  BiddingEnv(std::vector<double> bid_levels, Eigen::VectorXd values, Eigen::MatrixXd win_prob);

  std::string name() const override { return "bidding"; }
  int atoms() const override { return static_cast<int>(values_.size() * bids_.size()); }
  int resources() const override { return 1; }
  OutcomeMatrix sample(int round, Rng& rng) const override;
  std::optional<Eigen::VectorXd> mean_rewards() const override;
  std::optional<Eigen::MatrixXd> mean_consumption() const override;

  int auctions() const { return static_cast<int>(values_.size()); }
  const std::vector<double>& bid_levels() const { return bids_; }

 private:
  std::vector<double> bids_;
  Eigen::VectorXd values_;
  Eigen::MatrixXd win_prob_;  // auctions x levels
};

struct EnvironmentInstance {
  std::shared_ptr<const Environment> env;
  MatroidConstraint constraint;
};

/// Prices ~ U[0,1] from `seed`. Uniform: cap K. Partition: K contiguous
/// blocks of products, one product per block.
EnvironmentInstance make_assortment(int n, EnvMode mode, MatroidChoice matroid, std::uint64_t seed,
                                    int capacity = 2);

/// Mean valuations ~ U[0,1] from `seed`. Partition: one price per product.
/// Uniform: at most K atoms overall. Throws ConfigError for odd n.
EnvironmentInstance make_pricing(int n, EnvMode mode, MatroidChoice matroid, std::uint64_t seed,
                                 int capacity = 2);

/// Values ~ U[0,1] from `seed`; win probability of a bid equals the bid.
/// Partition with one group per auction, cap 1.
EnvironmentInstance make_bidding(int auctions, std::vector<double> bid_levels, std::uint64_t seed);

}  // namespace semibwk
