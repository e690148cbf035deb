#include "semibwk/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "semibwk/lp.hpp"

namespace semibwk {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

BudgetRule BudgetRule::parse(const std::string& text) {
  if (text == "half-t") return {};
  const std::string prefix = "fixed:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string num = text.substr(prefix.size());
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != num.size() || !(value > 0.0))
      throw ConfigError("bad budget rule '" + text + "'");
    return {Kind::Fixed, value};
  }
  throw ConfigError("bad budget rule '" + text + "' (expected half-t or fixed:REAL)");
}

std::string BudgetRule::to_string() const {
  if (kind == Kind::HalfT) return "half-t";
  std::ostringstream os;
  os.precision(17);
  os << "fixed:" << value;
  return os.str();
}

double BudgetRule::budget(int horizon) const {
  return kind == Kind::HalfT ? horizon / 2.0 : value;
}

namespace {

template <typename T>
std::vector<T> scalar_or_list(const json& v) {
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

template <typename T, typename F>
std::vector<T> parse_list(const json& v, F parse) {
  std::vector<T> out;
  for (const auto& s : scalar_or_list<std::string>(v)) out.push_back(parse(s));
  return out;
}

const std::vector<std::string> kKnownEnvs{"assortment", "pricing", "bidding"};
const std::vector<std::string> kConfigKeys{"env", "mode", "matroid", "n", "T", "budget",
                                           "runs", "capacity", "policies", "alpha", "eps",
                                           "bid_levels", "seed", "jobs", "record_timing", "output"};

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("experiment config must be a JSON object");
  for (const auto& item : doc.items())
    if (std::find(kConfigKeys.begin(), kConfigKeys.end(), item.key()) == kConfigKeys.end())
      throw ConfigError("unknown config key '" + item.key() + "'");

  ExperimentConfig c;
  try {
    if (doc.contains("env")) c.envs = scalar_or_list<std::string>(doc["env"]);
    if (doc.contains("mode")) c.modes = parse_list<EnvMode>(doc["mode"], parse_env_mode);
    if (doc.contains("matroid"))
      c.matroids = parse_list<MatroidChoice>(doc["matroid"], parse_matroid_choice);
    if (doc.contains("n")) c.n_list = scalar_or_list<int>(doc["n"]);
    if (doc.contains("T")) c.t_list = scalar_or_list<int>(doc["T"]);
    if (doc.contains("budget")) c.budget = BudgetRule::parse(doc["budget"].get<std::string>());
    if (doc.contains("runs")) c.runs = doc["runs"].get<int>();
    if (doc.contains("capacity")) c.capacity = doc["capacity"].get<int>();
    if (doc.contains("policies"))
      c.policies = parse_list<PolicyKind>(doc["policies"], parse_policy_kind);
    if (doc.contains("alpha")) c.policy_config.alpha = doc["alpha"].get<double>();
    if (doc.contains("eps")) {
      const auto& e = doc["eps"];
      if (e.is_string()) {
        if (e.get<std::string>() != "auto") throw ConfigError("eps must be a number or \"auto\"");
        c.policy_config.eps_mode = EpsMode::Theorem2;
      } else {
        c.policy_config.eps = e.get<double>();
      }
    }
    if (doc.contains("bid_levels")) c.bid_levels = doc["bid_levels"].get<std::vector<double>>();
    if (doc.contains("seed")) c.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("jobs")) c.jobs = doc["jobs"].get<int>();
    if (doc.contains("record_timing")) c.record_timing = doc["record_timing"].get<bool>();
    if (doc.contains("output")) c.output = doc["output"].get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return from_json(doc);
}

json ExperimentConfig::to_json() const {
  json doc;
  doc["env"] = envs;
  json modes_j = json::array();
  for (auto m : modes) modes_j.push_back(semibwk::to_string(m));
  doc["mode"] = modes_j;
  json matroids_j = json::array();
  for (auto m : matroids) matroids_j.push_back(semibwk::to_string(m));
  doc["matroid"] = matroids_j;
  doc["n"] = n_list;
  doc["T"] = t_list;
  doc["budget"] = budget.to_string();
  doc["runs"] = runs;
  doc["capacity"] = capacity;
  json pol = json::array();
  for (auto p : policies) pol.push_back(semibwk::to_string(p));
  doc["policies"] = pol;
  doc["alpha"] = policy_config.alpha;
  if (policy_config.eps_mode == EpsMode::Theorem2)
    doc["eps"] = "auto";
  else
    doc["eps"] = policy_config.eps;
  doc["bid_levels"] = bid_levels;
  doc["seed"] = seed;
  doc["jobs"] = jobs;
  doc["record_timing"] = record_timing;
  doc["output"] = output;
  return doc;
}

void ExperimentConfig::validate() const {
  if (envs.empty() || modes.empty() || matroids.empty() || n_list.empty() || t_list.empty() ||
      policies.empty())
    throw ConfigError("config lists must be non-empty");
  for (const auto& e : envs)
    if (std::find(kKnownEnvs.begin(), kKnownEnvs.end(), e) == kKnownEnvs.end())
      throw ConfigError("unknown environment '" + e + "'");
  for (int n : n_list)
    if (n < 1) throw ConfigError("n must be >= 1");
  for (int t : t_list)
    if (t < 0) throw ConfigError("T must be >= 0");
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (capacity < 1) throw ConfigError("capacity must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (!(policy_config.alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (policy_config.eps_mode == EpsMode::Explicit && !(policy_config.eps >= 0.0 && policy_config.eps < 1.0))
    throw ConfigError("eps must lie in [0, 1)");
  if (bid_levels.empty()) throw ConfigError("bid_levels must be non-empty");
}

ExperimentConfig ExperimentConfig::paper_grid() {
  ExperimentConfig c;
  c.envs = {"assortment", "pricing"};
  c.modes = {EnvMode::Standard, EnvMode::Modified};
  c.matroids = {MatroidChoice::Uniform, MatroidChoice::Partition};
  c.n_list = {6, 26};
  c.t_list = {1000, 2000, 3000, 4000, 5000, 6000};
  c.budget = {};
  c.runs = 20;
  c.capacity = 2;
  c.policy_config = SemiBwkConfig{5.0, 0.0, EpsMode::Explicit};
  return c;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

const char* const kResultsCsvHeader =
    "env,mode,matroid,policy,n,T,B,run,seed,total_reward,stop_round,per_step_time_us,lp_opt";
const char* const kTimingCsvHeader = "policy,n,window_index,median_us";

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters in '" + s + "'");
  return v;
}

}  // namespace

void write_results_csv(std::ostream& os, const std::vector<RunResult>& results) {
  os << kResultsCsvHeader << '\n';
  for (const auto& r : results) {
    if (r.skipped) continue;
    os << r.env << ',' << r.mode << ',' << r.matroid << ',' << r.policy << ',' << r.n << ','
       << r.horizon << ',' << fmt_double(r.budget) << ',' << r.run << ',' << r.seed << ','
       << fmt_double(r.total_reward) << ',';
    if (r.stop_round) os << *r.stop_round;
    os << ',' << fmt_double(r.per_step_time_us) << ',' << fmt_double(r.lp_opt) << '\n';
  }
}

std::vector<RunResult> parse_results_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kResultsCsvHeader)
    throw ConfigError("results CSV: missing or unexpected header");
  std::vector<RunResult> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 13) throw ConfigError("results CSV line " + std::to_string(lineno) + ": expected 13 fields");
    try {
      RunResult r;
      r.env = f[0];
      r.mode = f[1];
      r.matroid = f[2];
      r.policy = f[3];
      r.n = std::stoi(f[4]);
      r.horizon = std::stoi(f[5]);
      r.budget = parse_double(f[6]);
      r.run = std::stoi(f[7]);
      r.seed = std::stoull(f[8]);
      r.total_reward = parse_double(f[9]);
      if (!f[10].empty()) r.stop_round = std::stoi(f[10]);
      r.per_step_time_us = parse_double(f[11]);
      r.lp_opt = parse_double(f[12]);
      out.push_back(std::move(r));
    } catch (const std::logic_error& e) {
      throw ConfigError("results CSV line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<CellSummary> summarize(const std::vector<RunResult>& results) {
  using Key = std::tuple<std::string, std::string, std::string, std::string, int, int>;
  std::vector<Key> order;
  std::map<Key, CellSummary> cells;
  for (const auto& r : results) {
    if (r.skipped) continue;
    Key key{r.env, r.mode, r.matroid, r.policy, r.n, r.horizon};
    auto [it, inserted] = cells.try_emplace(key);
    CellSummary& c = it->second;
    if (inserted) {
      order.push_back(key);
      c.env = r.env;
      c.mode = r.mode;
      c.matroid = r.matroid;
      c.policy = r.policy;
      c.n = r.n;
      c.horizon = r.horizon;
      c.budget = r.budget;
    }
    ++c.runs;
    c.mean_reward += r.total_reward;
    c.mean_lp_opt += r.lp_opt;
    c.mean_step_time_us += r.per_step_time_us;
    if (r.stop_round) ++c.stopped_runs;
  }
  std::vector<CellSummary> out;
  for (const auto& key : order) {
    CellSummary c = cells[key];
    c.mean_reward /= c.runs;
    c.mean_lp_opt /= c.runs;
    c.mean_step_time_us /= c.runs;
    out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

EnvironmentInstance make_environment(const std::string& env, int n, EnvMode mode,
                                     MatroidChoice matroid, std::uint64_t seed, int capacity,
                                     const std::vector<double>& bid_levels) {
  if (env == "assortment") return make_assortment(n, mode, matroid, seed, capacity);
  if (env == "pricing") return make_pricing(n, mode, matroid, seed, capacity);
  if (env == "bidding") {
    const int levels = static_cast<int>(bid_levels.size());
    if (levels < 1 || n % levels != 0)
      throw ConfigError("bidding: n must be a multiple of the number of bid levels");
    return make_bidding(n / levels, bid_levels, seed);
  }
  throw ConfigError("unknown environment '" + env + "'");
}

double atom_lp_value(const Eigen::Ref<const Eigen::VectorXd>& reward,
                     const Eigen::Ref<const Eigen::MatrixXd>& consumption,
                     const MatroidConstraint& constraint, double budget_rate) {
  const auto sol = solve_lp(build_atom_lp(reward, consumption, constraint, budget_rate));
  if (!sol.optimal()) throw std::logic_error("atom LP not optimal");
  return sol.value;
}

double lp_opt_benchmark(const Environment& env, const MatroidConstraint& constraint, double budget,
                        int horizon) {
  if (horizon <= 0) return 0.0;
  const auto mu = env.mean_rewards();
  const auto c = env.mean_consumption();
  if (!mu || !c) throw ContractViolation("LP_OPT needs exact means");
  return horizon * atom_lp_value(*mu, *c, constraint, budget / horizon);
}

namespace {

struct Cell {
  std::string env;
  EnvMode mode;
  MatroidChoice matroid;
  int n;
  int horizon;
  int run;
};

std::string cell_key(const std::string& prefix, const Cell& c, bool with_matroid_and_t) {
  std::ostringstream os;
  os << prefix << '/' << c.env << '/' << to_string(c.mode);
  if (with_matroid_and_t) os << '/' << to_string(c.matroid);
  os << '/' << c.n;
  if (with_matroid_and_t) os << '/' << c.horizon;
  os << '/' << c.run;
  return os.str();
}

std::vector<RunResult> run_cell(const ExperimentConfig& config, const Cell& cell) {
  const std::uint64_t instance_seed = derive_seed(config.seed, cell_key("instance", cell, false));
  const std::uint64_t run_seed = derive_seed(config.seed, cell_key("run", cell, true));
  const double budget = config.budget.budget(cell.horizon);

  RunResult base;
  base.env = cell.env;
  base.mode = to_string(cell.mode);
  base.matroid = to_string(cell.matroid);
  base.n = cell.n;
  base.horizon = cell.horizon;
  base.budget = budget;
  base.run = cell.run;
  base.seed = run_seed;

  const EnvironmentInstance inst = make_environment(cell.env, cell.n, cell.mode, cell.matroid,
                                                    instance_seed, config.capacity, config.bid_levels);
  base.lp_opt = lp_opt_benchmark(*inst.env, inst.constraint, budget, cell.horizon);

  std::vector<RunResult> out;
  for (PolicyKind kind : config.policies) {
    RunResult r = base;
    r.policy = to_string(kind);
    if (cell.horizon == 0) {
      out.push_back(r);
      continue;
    }
    InstanceSpec spec{inst.env->atoms(), inst.env->resources(), budget, cell.horizon};
    try {
      auto policy = make_policy(kind, inst.constraint, spec, config.policy_config);
      const auto timed = run_policy_timed(*policy, *inst.env, spec, run_seed, RunOptions{false});
      r.total_reward = timed.trajectory.total_reward;
      r.stop_round = timed.trajectory.stop_round;
      if (config.record_timing && timed.steps > 0)
        r.per_step_time_us = 1e6 * timed.policy_seconds / timed.steps;
    } catch (const InstanceTooLarge& e) {
      r.skipped = e.what();
    } catch (const UnsupportedConstraint& e) {
      r.skipped = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<RunResult> run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<Cell> cells;
  for (const auto& env : config.envs)
    for (EnvMode mode : config.modes)
      for (MatroidChoice matroid : config.matroids)
        for (int n : config.n_list)
          for (int t : config.t_list)
            for (int run = 0; run < config.runs; ++run) cells.push_back({env, mode, matroid, n, t, run});

  // Configuration errors surface before any simulation work.
  for (const auto& env : config.envs)
    for (int n : config.n_list)
      for (int t : config.t_list) {
        if (env == "pricing" && n % 2 != 0) throw ConfigError("pricing needs an even n");
        if (env == "bidding" && n % static_cast<int>(config.bid_levels.size()) != 0)
          throw ConfigError("bidding: n must be a multiple of the number of bid levels");
        const double budget = config.budget.budget(t);
        if (t > 0 && !(budget > 0.0)) throw ConfigError("budget must be positive");
        if (t > 0 && config.policy_config.eps_mode == EpsMode::Theorem2) {
          const auto th = compute_eps_theorem2(config.policy_config.alpha, n, budget, t);
          if (!th.precondition_met || !th.usable()) {
            std::ostringstream os;
            os.precision(10);
            os << "eps=auto: budget " << budget << " does not exceed 3(alpha n + sqrt(alpha n T)) = "
               << th.threshold << " for n=" << n << ", T=" << t;
            throw ConfigError(os.str());
          }
        }
      }

  std::vector<std::vector<RunResult>> per_cell(cells.size());
  const int jobs = std::min<int>(config.jobs, static_cast<int>(std::max<std::size_t>(cells.size(), 1)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) per_cell[i] = run_cell(config, cells[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
          try {
            per_cell[i] = run_cell(config, cells[i]);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<RunResult> results;
  for (auto& rows : per_cell)
    for (auto& r : rows) results.push_back(std::move(r));

  if (!config.output.empty()) {
    std::ofstream out(config.output, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + config.output + "'");
    write_results_csv(out, results);
  }
  return results;
}

// ---------------------------------------------------------------------------
// LP chain oracles
// ---------------------------------------------------------------------------

double brute_force_lp_bwk(const Eigen::Ref<const Eigen::VectorXd>& reward,
                          const Eigen::Ref<const Eigen::MatrixXd>& consumption,
                          const MatroidConstraint& constraint, double budget, int horizon,
                          std::size_t max_actions) {
  if (horizon <= 0) throw ContractViolation("brute_force_lp_bwk: T must be positive");
  const int n = constraint.atoms();
  if (reward.size() != n || consumption.rows() != n)
    throw ContractViolation("brute_force_lp_bwk: dimension mismatch");
  const auto actions = constraint.enumerate_feasible(max_actions);
  const int k = static_cast<int>(actions.size());
  const int d = static_cast<int>(consumption.cols());

  Eigen::MatrixXd incidence = Eigen::MatrixXd::Zero(k, n);
  for (int s = 0; s < k; ++s)
    for (int a : actions[static_cast<std::size_t>(s)].atoms()) incidence(s, a) = 1.0;

  LinearProgram<double> lp(k);
  lp.objective = incidence * reward;
  const Eigen::MatrixXd cost = incidence * consumption;  // k x d
  for (int j = 0; j < d; ++j) lp.add_row(cost.col(j), budget / horizon);
  lp.add_row(Eigen::VectorXd::Ones(k), 1.0);
  const auto sol = solve_lp(lp);
  if (!sol.optimal()) throw std::logic_error("action LP not optimal");
  return sol.value;
}

LpChainReport verify_lp_chain(const Eigen::Ref<const Eigen::VectorXd>& reward,
                              const Eigen::Ref<const Eigen::MatrixXd>& consumption,
                              const MatroidConstraint& constraint, double budget, int horizon,
                              double eps, const ConfidenceBounds* bounds, double tol) {
  if (!(eps >= 0.0 && eps < 1.0)) throw ConfigError("eps must lie in [0, 1)");
  LpChainReport r;
  r.opt_bwk = brute_force_lp_bwk(reward, consumption, constraint, budget, horizon);
  r.opt_bwk_eps = brute_force_lp_bwk(reward, consumption, constraint, (1.0 - eps) * budget, horizon);
  r.opt_atoms = atom_lp_value(reward, consumption, constraint, (1.0 - eps) * budget / horizon);
  if (bounds) {
    const auto sol = solve_lp(build_lp_alg(*bounds, constraint, budget, horizon, eps));
    if (!sol.optimal()) throw std::logic_error("LP_ALG not optimal");
    r.lp_alg = sol.value;
  } else {
    r.lp_alg = r.opt_atoms;
  }
  const double gaps[] = {(1.0 - eps) * r.opt_bwk - r.opt_bwk_eps, r.opt_atoms - r.lp_alg,
                         r.opt_bwk_eps - r.opt_atoms};
  r.worst_violation = std::max({0.0, gaps[0], gaps[1], gaps[2]});
  r.holds = r.worst_violation <= tol;
  return r;
}

ChainInstance random_chain_instance(Rng& rng, int max_n) {
  std::uniform_int_distribution<int> n_dist(1, max_n);
  std::uniform_int_distribution<int> d_dist(1, 2);
  std::uniform_int_distribution<int> k_dist(1, 2);
  const int n = n_dist(rng);
  const int d = d_dist(rng);
  const int k = std::min(k_dist(rng), n);

  ChainInstance inst{Eigen::VectorXd(n), Eigen::MatrixXd(n, d), MatroidConstraint::uniform(n, k), 0.0, 0};
  for (int a = 0; a < n; ++a) {
    inst.reward(a) = uniform01(rng);
    for (int j = 0; j < d; ++j) inst.consumption(a, j) = uniform01(rng);
  }
  if (uniform01(rng) < 0.5 && n >= 2) {
    // Two blocks with caps in {1, 2}; atoms past the split point may stay free.
    std::uniform_int_distribution<int> split(1, n - 1);
    const int cut = split(rng);
    std::vector<std::vector<int>> groups(2);
    for (int a = 0; a < n; ++a) groups[a < cut ? 0 : 1].push_back(a);
    std::vector<int> caps{std::min(k_dist(rng), static_cast<int>(groups[0].size())),
                          std::min(k_dist(rng), static_cast<int>(groups[1].size()))};
    inst.constraint = MatroidConstraint::partition(n, std::move(groups), std::move(caps));
  }
  std::uniform_int_distribution<int> t_dist(10, 1000);
  inst.horizon = t_dist(rng);
  inst.budget = inst.horizon * (0.05 + 1.5 * uniform01(rng));
  return inst;
}

LpChainBatch verify_lp_chain_batch(int instances, const std::vector<double>& eps_values,
                                   std::uint64_t seed, double tol) {
  LpChainBatch batch;
  Rng rng(derive_seed(seed, std::string_view("lp-chain")));
  for (int i = 0; i < instances; ++i) {
    const ChainInstance inst = random_chain_instance(rng);
    for (double eps : eps_values) {
      const auto rep = verify_lp_chain(inst.reward, inst.consumption, inst.constraint, inst.budget,
                                       inst.horizon, eps, nullptr, tol);
      ++batch.instances;
      if (!rep.holds) ++batch.failures;
      batch.worst_violation = std::max(batch.worst_violation, rep.worst_violation);
    }
  }
  return batch;
}

// ---------------------------------------------------------------------------
// Timing
// ---------------------------------------------------------------------------

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::vector<double> time_policy(const PolicyFactory& factory, const EnvironmentInstance& inst,
                                int runs, int window, int windows, std::uint64_t seed) {
  if (runs < 1 || window < 1 || windows < 1) throw ConfigError("timing needs positive runs and windows");
  const int horizon = window * windows;
  InstanceSpec spec{inst.env->atoms(), inst.env->resources(), static_cast<double>(horizon), horizon};
  std::vector<std::vector<double>> per_window(static_cast<std::size_t>(windows));
  for (int run = 0; run < runs; ++run) {
    auto policy = factory(inst.constraint, spec);
    const auto timed = run_policy_timed(*policy, *inst.env, spec, derive_seed(seed, static_cast<std::uint64_t>(run)),
                                        RunOptions{false});
    if (static_cast<int>(timed.step_seconds.size()) != horizon)
      throw std::logic_error("timing run ended early");
    for (int w = 0; w < windows; ++w) {
      double sum = 0.0;
      for (int s = 0; s < window; ++s) sum += timed.step_seconds[static_cast<std::size_t>(w * window + s)];
      per_window[static_cast<std::size_t>(w)].push_back(1e6 * sum / window);
    }
  }
  std::vector<double> out;
  for (auto& v : per_window) out.push_back(median(v));
  return out;
}

std::vector<TimingRow> timing_experiment(const TimingConfig& config) {
  std::vector<TimingRow> rows;
  for (int n : config.n_list) {
    const auto inst = make_assortment(n, EnvMode::Standard, MatroidChoice::Uniform,
                                      derive_seed(config.seed, static_cast<std::uint64_t>(n)), config.capacity);
    for (PolicyKind kind : config.policies) {
      SemiBwkConfig cfg{config.alpha, 0.0, EpsMode::Explicit};
      PolicyFactory factory = [kind, cfg](const MatroidConstraint& m, const InstanceSpec& spec) {
        return make_policy(kind, m, spec, cfg);
      };
      const auto medians = time_policy(factory, inst, config.runs, config.window, config.windows,
                                       derive_seed(config.seed, "timing/" + to_string(kind)));
      for (std::size_t w = 0; w < medians.size(); ++w)
        rows.push_back({to_string(kind), n, static_cast<int>(w), medians[w]});
    }
  }
  if (!config.output.empty()) {
    std::ofstream out(config.output, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + config.output + "'");
    write_timing_csv(out, rows);
  }
  return rows;
}

void write_timing_csv(std::ostream& os, const std::vector<TimingRow>& rows) {
  os << kTimingCsvHeader << '\n';
  for (const auto& r : rows)
    os << r.policy << ',' << r.n << ',' << r.window_index << ',' << fmt_double(r.median_us) << '\n';
}

double timing_median(const std::vector<TimingRow>& rows, const std::string& policy, int n) {
  std::vector<double> v;
  for (const auto& r : rows)
    if (r.policy == policy && r.n == n) v.push_back(r.median_us);
  return median(v);
}

}  // namespace semibwk
