// semibwk command-line driver.
//
//   semibwk run --env pricing --n 6 --t-list 1000,2000 --out results.csv
//   semibwk run --config experiment.json
//   semibwk verify-lp --seed 7
//   semibwk verify-rounding --seed 7
//   semibwk timing --n 6,26,52 --out timing.csv
//   semibwk reproduce-paper --out results/
//
// Exit codes: 0 success, 1 verification failure, 2 configuration error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "semibwk/bench.hpp"
#include "semibwk/rounding.hpp"

namespace {

using namespace semibwk;

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kConfigError = 2;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  for (const auto& s : split_list(text)) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw ConfigError(std::string("bad ") + what + " '" + s + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(std::string(what) + " must not be empty");
  return out;
}

struct RunFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<double> alpha;
  std::string eps;
  std::string policies;
  std::string env;
  std::string mode;
  std::string matroid;
  std::string n;
  std::string t_list;
  std::string b_rule;
  std::optional<int> jobs;
  bool no_timing = false;
};

void apply_eps(SemiBwkConfig& cfg, const std::string& eps) {
  if (eps.empty()) return;
  if (eps == "auto") {
    cfg.eps_mode = EpsMode::Theorem2;
    return;
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(eps, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != eps.size()) throw ConfigError("--eps expects a real number or 'auto'");
  cfg.eps_mode = EpsMode::Explicit;
  cfg.eps = v;
}

ExperimentConfig build_config(const RunFlags& f) {
  ExperimentConfig c = f.config.empty() ? ExperimentConfig{} : ExperimentConfig::from_file(f.config);
  if (!f.env.empty()) c.envs = split_list(f.env);
  if (!f.mode.empty()) {
    c.modes.clear();
    for (const auto& s : split_list(f.mode)) c.modes.push_back(parse_env_mode(s));
  }
  if (!f.matroid.empty()) {
    c.matroids.clear();
    for (const auto& s : split_list(f.matroid)) c.matroids.push_back(parse_matroid_choice(s));
  }
  if (!f.n.empty()) c.n_list = parse_int_list(f.n, "--n");
  if (!f.t_list.empty()) c.t_list = parse_int_list(f.t_list, "--t-list");
  if (!f.b_rule.empty()) c.budget = BudgetRule::parse(f.b_rule);
  if (!f.policies.empty()) {
    c.policies.clear();
    for (const auto& s : split_list(f.policies)) c.policies.push_back(parse_policy_kind(s));
  }
  if (f.seed) c.seed = *f.seed;
  if (f.runs) c.runs = *f.runs;
  if (f.alpha) c.policy_config.alpha = *f.alpha;
  if (f.jobs) c.jobs = *f.jobs;
  if (f.no_timing) c.record_timing = false;
  if (!f.out.empty()) c.output = f.out;
  apply_eps(c.policy_config, f.eps);
  c.validate();
  return c;
}

void print_summary(const std::vector<RunResult>& results) {
  std::printf("%-10s %-8s %-9s %-7s %4s %6s %9s %12s %12s %8s %10s\n", "env", "mode", "matroid",
              "policy", "n", "T", "B", "mean_reward", "lp_opt", "stopped", "step_us");
  for (const auto& c : summarize(results))
    std::printf("%-10s %-8s %-9s %-7s %4d %6d %9.1f %12.3f %12.3f %5d/%-2d %10.2f\n", c.env.c_str(),
                c.mode.c_str(), c.matroid.c_str(), c.policy.c_str(), c.n, c.horizon, c.budget,
                c.mean_reward, c.mean_lp_opt, c.stopped_runs, c.runs, c.mean_step_time_us);
  for (const auto& r : results)
    if (r.skipped)
      std::printf("skipped %s/%s/%s n=%d T=%d run=%d policy=%s: %s\n", r.env.c_str(), r.mode.c_str(),
                  r.matroid.c_str(), r.n, r.horizon, r.run, r.policy.c_str(), r.skipped->c_str());
}

int cmd_run(const RunFlags& flags) {
  const ExperimentConfig config = build_config(flags);
  const auto results = run_experiment(config);
  print_summary(results);
  if (!config.output.empty()) std::printf("wrote %s\n", config.output.c_str());
  return kOk;
}

int cmd_verify_lp(std::uint64_t seed, int instances) {
  const std::vector<double> eps{0.0, 0.1, 0.3};
  const auto batch = verify_lp_chain_batch(instances, eps, seed);
  std::printf("lp chain: %d checks, %d failures, worst violation %.3e\n", batch.instances,
              batch.failures, batch.worst_violation);
  return batch.failures == 0 ? kOk : kVerifyFailed;
}

int cmd_verify_rounding(std::uint64_t seed, long long samples, int points) {
  RoundingSuiteOptions opts;
  opts.seed = seed;
  opts.samples = samples;
  opts.points = points;
  const auto rep = run_rounding_suite(opts);
  std::printf("marginals:   %d points, worst excess %.3e  %s\n", rep.marginal_points,
              rep.marginal_worst_excess, rep.marginals_ok() ? "ok" : "FAIL");
  std::printf("covariance:  worst %.3e, limit %.3e  %s\n", rep.worst_covariance, rep.covariance_limit,
              rep.covariance_ok() ? "ok" : "FAIL");
  std::printf("exhaustive:  %d points, %d failures  %s\n", rep.exhaustive_points,
              rep.exhaustive_failures, rep.exhaustive_ok() ? "ok" : "FAIL");
  std::printf("transform:   %d pairs, %d failures  %s\n", rep.claim3_pairs, rep.claim3_failures,
              rep.claim3_ok() ? "ok" : "FAIL");
  return rep.passed() ? kOk : kVerifyFailed;
}

int cmd_timing(const RunFlags& flags) {
  TimingConfig t;
  if (!flags.n.empty()) t.n_list = parse_int_list(flags.n, "--n");
  if (!flags.policies.empty()) {
    t.policies.clear();
    for (const auto& s : split_list(flags.policies)) t.policies.push_back(parse_policy_kind(s));
  }
  if (flags.runs) t.runs = *flags.runs;
  if (flags.seed) t.seed = *flags.seed;
  if (flags.alpha) t.alpha = *flags.alpha;
  t.output = flags.out;
  if (t.runs < 1) throw ConfigError("--runs must be >= 1");
  const auto rows = timing_experiment(t);
  std::printf("%-8s %4s %12s\n", "policy", "n", "median_us");
  for (int n : t.n_list)
    for (PolicyKind k : t.policies)
      std::printf("%-8s %4d %12.2f\n", to_string(k).c_str(), n, timing_median(rows, to_string(k), n));
  if (!t.output.empty()) std::printf("wrote %s\n", t.output.c_str());
  return kOk;
}

int cmd_reproduce(const std::string& out_dir, std::optional<std::uint64_t> seed, std::optional<int> jobs) {
  ExperimentConfig grid = ExperimentConfig::paper_grid();
  if (seed) grid.seed = *seed;
  if (jobs) grid.jobs = *jobs;
  const std::filesystem::path dir = out_dir.empty() ? "results" : out_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create '" + dir.string() + "': " + ec.message());
  grid.output = (dir / "grid.csv").string();
  const auto results = run_experiment(grid);
  print_summary(results);
  std::printf("wrote %s\n", grid.output.c_str());

  TimingConfig t;
  if (seed) t.seed = *seed;
  t.output = (dir / "timing.csv").string();
  timing_experiment(t);
  std::printf("wrote %s\n", t.output.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Combinatorial semi-bandits with knapsacks: experiments and verification suites"};
  app.require_subcommand(1);

  RunFlags flags;
  auto* run = app.add_subcommand("run", "Run an experiment grid and write the results CSV");
  run->add_option("--config", flags.config, "JSON experiment config");
  run->add_option("--out", flags.out, "Results CSV path");
  run->add_option("--seed", flags.seed, "Master seed");
  run->add_option("--runs", flags.runs, "Runs per cell");
  run->add_option("--alpha", flags.alpha, "Confidence parameter");
  run->add_option("--eps", flags.eps, "Budget shrink factor, or 'auto'");
  run->add_option("--policies", flags.policies, "Comma list: semibwk,pdbwk,omm");
  run->add_option("--env", flags.env, "assortment | pricing | bidding (comma list)");
  run->add_option("--mode", flags.mode, "standard | modified (comma list)");
  run->add_option("--matroid", flags.matroid, "uniform | partition (comma list)");
  run->add_option("--n", flags.n, "Atom counts (comma list)");
  run->add_option("--t-list", flags.t_list, "Horizons (comma list)");
  run->add_option("--b-rule", flags.b_rule, "half-t | fixed:REAL");
  run->add_option("--jobs", flags.jobs, "Parallel cells");
  run->add_flag("--no-timing", flags.no_timing, "Write 0 per-step times (byte-stable CSV)");

  std::uint64_t seed = 1;
  int instances = 50;
  auto* vlp = app.add_subcommand("verify-lp", "Check the LP chain on random small instances");
  vlp->add_option("--seed", seed, "Seed");
  vlp->add_option("--runs", instances, "Number of random instances");

  long long samples = 100000;
  int points = 200;
  auto* vround = app.add_subcommand("verify-rounding", "Check the rounding scheme's properties");
  vround->add_option("--seed", seed, "Seed");
  vround->add_option("--samples", samples, "Samples per point");
  vround->add_option("--runs", points, "Number of random points");

  RunFlags tflags;
  auto* timing = app.add_subcommand("timing", "Per-step running time versus n");
  timing->add_option("--n", tflags.n, "Atom counts (comma list)");
  timing->add_option("--policies", tflags.policies, "Comma list: semibwk,pdbwk,omm");
  timing->add_option("--runs", tflags.runs, "Runs per (policy, n)");
  timing->add_option("--seed", tflags.seed, "Seed");
  timing->add_option("--alpha", tflags.alpha, "Confidence parameter");
  timing->add_option("--out", tflags.out, "Timing CSV path");

  std::string out_dir;
  std::optional<std::uint64_t> rseed;
  std::optional<int> rjobs;
  auto* repro = app.add_subcommand("reproduce-paper", "Run the default simulation grid and timing");
  repro->add_option("--out", out_dir, "Output directory");
  repro->add_option("--seed", rseed, "Master seed");
  repro->add_option("--jobs", rjobs, "Parallel cells");
  repro->allow_extras();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*run) return cmd_run(flags);
    if (*vlp) return cmd_verify_lp(seed, instances);
    if (*vround) return cmd_verify_rounding(seed, samples, points);
    if (*timing) return cmd_timing(tflags);
    if (*repro) return cmd_reproduce(out_dir, rseed, rjobs);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ContractViolation& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}
