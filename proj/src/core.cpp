#include "semibwk/core.hpp"

#include <algorithm>
#include <sstream>

namespace semibwk {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t id) {
  return splitmix64(splitmix64(master) ^ splitmix64(id + 0x632be59bd9b4e019ULL));
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view key) {
  // FNV-1a
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return derive_seed(master, h);
}

SplitMix64::result_type SplitMix64::operator()() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void InstanceSpec::validate() const {
  if (atoms < 1 || resources < 1 || horizon < 1 || !(budget >= 0.0)) {
    std::ostringstream os;
    os << "invalid instance: n=" << atoms << " d=" << resources << " B=" << budget
       << " T=" << horizon;
    throw ContractViolation(os.str());
  }
}

void OutcomeMatrix::validate(int n, int d) const {
  if (rewards.size() != n || consumption.rows() != n || consumption.cols() != d)
    throw ContractViolation("outcome matrix dimension mismatch");
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  for (Eigen::Index a = 0; a < n; ++a) {
    if (!in_unit(rewards(a))) throw ContractViolation("reward outside [0,1]");
    for (Eigen::Index j = 0; j < d; ++j)
      if (!in_unit(consumption(a, j))) throw ContractViolation("consumption outside [0,1]");
  }
}

ActionVector ActionVector::from_atoms(int n, std::vector<int> atoms) {
  std::sort(atoms.begin(), atoms.end());
  if (std::adjacent_find(atoms.begin(), atoms.end()) != atoms.end())
    throw ContractViolation("duplicate atom in action");
  if (!atoms.empty() && (atoms.front() < 0 || atoms.back() >= n))
    throw ContractViolation("atom index out of range");
  ActionVector action(n);
  action.atoms_ = std::move(atoms);
  return action;
}

ActionVector ActionVector::from_indicator(const Eigen::Ref<const Eigen::VectorXd>& y) {
  ActionVector action(static_cast<int>(y.size()));
  for (Eigen::Index a = 0; a < y.size(); ++a)
    if (y(a) > 0.5) action.atoms_.push_back(static_cast<int>(a));
  return action;
}

bool ActionVector::contains(int atom) const {
  return std::binary_search(atoms_.begin(), atoms_.end(), atom);
}

Eigen::VectorXd ActionVector::indicator() const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
  for (int a : atoms_) y(a) = 1.0;
  return y;
}

SemiBanditFeedback observe(const ActionVector& action, const OutcomeMatrix& outcome) {
  if (action.size() != outcome.atoms())
    throw ContractViolation("action/outcome dimension mismatch");
  const auto k = static_cast<Eigen::Index>(action.cardinality());
  SemiBanditFeedback fb;
  fb.atoms = action.atoms();
  fb.rewards.resize(k);
  fb.consumption.resize(k, outcome.resources());
  for (Eigen::Index i = 0; i < k; ++i) {
    const int a = fb.atoms[static_cast<std::size_t>(i)];
    fb.rewards(i) = outcome.rewards(a);
    fb.consumption.row(i) = outcome.consumption.row(a);
  }
  return fb;
}

BudgetState BudgetState::initial(const InstanceSpec& instance) {
  BudgetState s;
  s.remaining = Eigen::VectorXd::Constant(instance.resources, instance.budget);
  return s;
}

RoundSettlement settle_round(BudgetState& state, int round, const ActionVector& action,
                             const OutcomeMatrix& outcome) {
  if (state.stopped) throw ContractViolation("settle_round on a stopped budget state");
  if (action.size() != outcome.atoms() || outcome.resources() != state.remaining.size())
    throw ContractViolation("settle_round dimension mismatch");

  RoundSettlement s;
  s.consumption = Eigen::VectorXd::Zero(outcome.resources());
  for (int a : action.atoms()) {
    s.reward += outcome.rewards(a);
    s.consumption += outcome.consumption.row(a).transpose();
  }
  state.remaining -= s.consumption;
  if ((state.remaining.array() < 0.0).any()) {
    state.stopped = true;
    state.stop_round = round;
    s.stopped = true;
  }
  return s;
}

double Trajectory::replayed_reward() const {
  double total = 0.0;
  for (const auto& r : rounds) {
    if (stop_round && r.round >= *stop_round) break;
    total += r.reward;
  }
  return total;
}

}  // namespace semibwk
