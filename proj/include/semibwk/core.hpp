#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace semibwk {

using Rng = std::mt19937_64;

/// Raised when a caller breaks an operation's precondition (dimension
/// mismatch, out-of-range value, feedback for an unchosen atom, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid user-supplied configuration. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InstanceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedConstraint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Seeding
// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based derivation: stream `id` of `master` never depends on which
/// other streams were drawn.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t id);
std::uint64_t derive_seed(std::uint64_t master, std::string_view key);

/// Small-state generator used for cheap per-group sub-streams.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

 private:
  std::uint64_t state_;
};

/// Uniform double in [0,1) from the top 53 bits; independent of the
/// standard library's distribution implementations.
template <typename Urbg>
double uniform01(Urbg& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------
// Instance and per-round data
// ---------------------------------------------------------------------------

struct InstanceSpec {
  int atoms = 1;
  int resources = 1;
  double budget = 0.0;
  int horizon = 1;

  void validate() const;
};

/// One round's realization: reward and consumption of every atom.
struct OutcomeMatrix {
  Eigen::VectorXd rewards;      // n
  Eigen::MatrixXd consumption;  // n x d

  int atoms() const { return static_cast<int>(rewards.size()); }
  int resources() const { return static_cast<int>(consumption.cols()); }

  /// Throws ContractViolation unless dimensions are n x d and entries lie in [0,1].
  void validate(int n, int d) const;
};

/// A feasible subset of atoms, stored as a sorted list of indices.
class ActionVector {
 public:
  ActionVector() = default;
  explicit ActionVector(int n) : n_(n) {}

  static ActionVector from_atoms(int n, std::vector<int> atoms);
  /// Entries > 0.5 are taken as chosen.
  static ActionVector from_indicator(const Eigen::Ref<const Eigen::VectorXd>& y);

  int size() const { return n_; }
  const std::vector<int>& atoms() const { return atoms_; }
  std::size_t cardinality() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  bool contains(int atom) const;
  Eigen::VectorXd indicator() const;

  friend bool operator==(const ActionVector&, const ActionVector&) = default;

 private:
  int n_ = 0;
  std::vector<int> atoms_;
};

/// Per-atom observations restricted to the chosen atoms; row i belongs to atoms[i].
struct SemiBanditFeedback {
  std::vector<int> atoms;
  Eigen::VectorXd rewards;
  Eigen::MatrixXd consumption;
};

SemiBanditFeedback observe(const ActionVector& action, const OutcomeMatrix& outcome);

struct BudgetState {
  Eigen::VectorXd remaining;
  bool stopped = false;
  std::optional<int> stop_round;

  static BudgetState initial(const InstanceSpec& instance);
};

struct RoundSettlement {
  double reward = 0.0;
  Eigen::VectorXd consumption;
  bool stopped = false;
};

/// Applies one round to the budgets. When this round drives any resource
/// strictly below zero the state is marked stopped at `round`; the
/// consumption is still deducted but the caller must not count `reward`.
RoundSettlement settle_round(BudgetState& state, int round, const ActionVector& action,
                             const OutcomeMatrix& outcome);

struct RoundRecord {
  int round = 0;
  ActionVector action;
  SemiBanditFeedback feedback;
  double reward = 0.0;
  Eigen::VectorXd consumption;
  std::optional<Eigen::VectorXd> fractional;
};

struct Trajectory {
  std::vector<RoundRecord> rounds;
  double total_reward = 0.0;
  std::optional<int> stop_round;
  Eigen::VectorXd remaining;

  /// Recomputes the total from the round records (stopping round excluded).
  double replayed_reward() const;
};

// ---------------------------------------------------------------------------
// Environment
// ---------------------------------------------------------------------------

/// Source of i.i.d. outcome matrices. Implementations are immutable; all
/// randomness comes from the generator passed to sample().
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual int atoms() const = 0;
  virtual int resources() const = 0;
  virtual OutcomeMatrix sample(int round, Rng& rng) const = 0;

  virtual std::optional<Eigen::VectorXd> mean_rewards() const { return std::nullopt; }
  virtual std::optional<Eigen::MatrixXd> mean_consumption() const { return std::nullopt; }
};

}  // namespace semibwk
