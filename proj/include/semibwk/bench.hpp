#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "semibwk/algorithms.hpp"
#include "semibwk/environments.hpp"

namespace semibwk {

struct BudgetRule {
  enum class Kind { HalfT, Fixed };
  Kind kind = Kind::HalfT;
  double value = 0.0;

  /// "half-t" or "fixed:REAL".
  static BudgetRule parse(const std::string& text);
  std::string to_string() const;
  double budget(int horizon) const;
};

/// One experiment: the cross product of the list-valued fields is the set of
/// cells, each run `runs` times for every policy.
///
/// JSON schema (scalars are accepted where a list is expected):
///   env       "assortment" | "pricing" | "bidding"
///   mode      "standard" | "modified"
///   matroid   "uniform" | "partition"
///   n, T      integers
///   budget    "half-t" | "fixed:REAL"
///   runs, capacity, seed, jobs
///   policies  ["semibwk", "pdbwk", "omm"]
///   alpha     real
///   eps       real | "auto"
///   bid_levels  [real] (bidding only; n must be a multiple of its size)
///   record_timing  bool; false writes 0 per-step times so CSVs are byte-stable
///   output    CSV path
struct ExperimentConfig {
  std::vector<std::string> envs{"assortment"};
  std::vector<EnvMode> modes{EnvMode::Standard};
  std::vector<MatroidChoice> matroids{MatroidChoice::Uniform};
  std::vector<int> n_list{6};
  std::vector<int> t_list{1000};
  BudgetRule budget;
  int runs = 20;
  int capacity = 2;
  std::vector<PolicyKind> policies{PolicyKind::SemiBwk, PolicyKind::PdBwk, PolicyKind::Omm};
  SemiBwkConfig policy_config;
  std::vector<double> bid_levels{0.25, 0.5, 0.75};
  std::uint64_t seed = 1;
  int jobs = 1;
  bool record_timing = true;
  std::string output;

  static ExperimentConfig from_json(const nlohmann::json& doc);
  static ExperimentConfig from_file(const std::string& path);
  nlohmann::json to_json() const;
  void validate() const;

  /// The simulation grid: n in {6, 26}, T in {1000..6000}, B = T/2, K = 2,
  /// 20 runs, alpha = 5, eps = 0, assortment and pricing in both modes and
  /// under both matroids.
  static ExperimentConfig paper_grid();
};

struct RunResult {
  std::string env;
  std::string mode;
  std::string matroid;
  std::string policy;
  int n = 0;
  int horizon = 0;
  double budget = 0.0;
  int run = 0;
  std::uint64_t seed = 0;
  double total_reward = 0.0;
  std::optional<int> stop_round;
  double per_step_time_us = 0.0;
  double lp_opt = 0.0;
  std::optional<std::string> skipped;  // reason; skipped rows are not written to CSV

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

/// Per (env, mode, matroid, policy, n, T) averages.
struct CellSummary {
  std::string env, mode, matroid, policy;
  int n = 0;
  int horizon = 0;
  double budget = 0.0;
  int runs = 0;
  double mean_reward = 0.0;
  double mean_lp_opt = 0.0;
  double mean_step_time_us = 0.0;
  int stopped_runs = 0;
};

extern const char* const kResultsCsvHeader;
extern const char* const kTimingCsvHeader;

void write_results_csv(std::ostream& os, const std::vector<RunResult>& results);
std::vector<RunResult> parse_results_csv(std::istream& is);
std::vector<CellSummary> summarize(const std::vector<RunResult>& results);

/// Builds the environment and constraint for one cell.
EnvironmentInstance make_environment(const std::string& env, int n, EnvMode mode,
                                     MatroidChoice matroid, std::uint64_t seed, int capacity,
                                     const std::vector<double>& bid_levels);

/// T times the atom-level LP value on exact means with rhs B/T.
double lp_opt_benchmark(const Environment& env, const MatroidConstraint& constraint, double budget,
                        int horizon);

/// Runs every cell; writes config.output if it is non-empty.
/// Throws ConfigError for invalid configurations (including eps = auto when the
/// budget precondition fails for some cell).
std::vector<RunResult> run_experiment(const ExperimentConfig& config);

/// Optimal per-round value of the action-indexed LP: one variable per feasible
/// action, sum of probabilities at most 1, expected consumption at most B/T.
double brute_force_lp_bwk(const Eigen::Ref<const Eigen::VectorXd>& reward,
                          const Eigen::Ref<const Eigen::MatrixXd>& consumption,
                          const MatroidConstraint& constraint, double budget, int horizon,
                          std::size_t max_actions = 20000);

/// Per-round optimal value of the atom-level LP with rhs budget_rate.
double atom_lp_value(const Eigen::Ref<const Eigen::VectorXd>& reward,
                     const Eigen::Ref<const Eigen::MatrixXd>& consumption,
                     const MatroidConstraint& constraint, double budget_rate);

struct LpChainReport {
  double opt_bwk = 0.0;       // action LP at B
  double opt_bwk_eps = 0.0;   // action LP at (1 - eps) B
  double opt_atoms = 0.0;     // atom LP at (1 - eps) B
  double lp_alg = 0.0;        // atom LP on the supplied bounds at (1 - eps) B
  double worst_violation = 0.0;
  bool holds = false;
};

/// Checks opt_bwk_eps >= (1 - eps) opt_bwk and lp_alg >= opt_atoms >= opt_bwk_eps.
/// Without explicit bounds lp_alg uses the exact means.
LpChainReport verify_lp_chain(const Eigen::Ref<const Eigen::VectorXd>& reward,
                              const Eigen::Ref<const Eigen::MatrixXd>& consumption,
                              const MatroidConstraint& constraint, double budget, int horizon,
                              double eps, const ConfidenceBounds* bounds = nullptr,
                              double tol = 1e-7);

struct ChainInstance {
  Eigen::VectorXd reward;
  Eigen::MatrixXd consumption;
  MatroidConstraint constraint;
  double budget = 0.0;
  int horizon = 0;
};

/// Random instance with n <= max_n, K <= 2, d <= 2 and a uniform or partition matroid.
ChainInstance random_chain_instance(Rng& rng, int max_n = 6);

struct LpChainBatch {
  int instances = 0;
  int failures = 0;
  double worst_violation = 0.0;
};

LpChainBatch verify_lp_chain_batch(int instances, const std::vector<double>& eps_values,
                                   std::uint64_t seed, double tol = 1e-7);

struct TimingConfig {
  std::vector<int> n_list{6, 26, 52};
  std::vector<PolicyKind> policies{PolicyKind::SemiBwk, PolicyKind::PdBwk, PolicyKind::Omm};
  int runs = 50;
  int window = 10;
  int windows = 10;
  int capacity = 2;
  double alpha = 5.0;
  std::uint64_t seed = 1;
  std::string output;
};

struct TimingRow {
  std::string policy;
  int n = 0;
  int window_index = 0;
  double median_us = 0.0;
};

using PolicyFactory =
    std::function<std::unique_ptr<Policy>(const MatroidConstraint&, const InstanceSpec&)>;

/// Median over runs of the mean per-step time in each window. Budget B = T
/// so no run stops early.
std::vector<double> time_policy(const PolicyFactory& factory, const EnvironmentInstance& inst,
                                int runs, int window, int windows, std::uint64_t seed);

/// Dynamic assortment under a uniform matroid; one row per (policy, n, window).
std::vector<TimingRow> timing_experiment(const TimingConfig& config);
void write_timing_csv(std::ostream& os, const std::vector<TimingRow>& rows);

/// Median of window medians for one (policy, n).
double timing_median(const std::vector<TimingRow>& rows, const std::string& policy, int n);

}  // namespace semibwk
