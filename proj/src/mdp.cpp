#include "amb/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace amb {

std::size_t TabularMdp::max_actions() const {
  std::size_t best = 0;
  for (StateId s = 0; s < num_states(); ++s) best = std::max(best, num_actions(s));
  return best;
}

std::size_t MdpShape::max_actions() const {
  std::size_t best = 0;
  for (StateId s = 0; s < num_states(); ++s) best = std::max(best, num_actions(s));
  return best;
}

StateId TabularMdp::state_id(const std::string& name) const {
  auto it = std::find(state_names.begin(), state_names.end(), name);
  if (it == state_names.end()) throw std::out_of_range("unknown state '" + name + "'");
  return static_cast<StateId>(it - state_names.begin());
}

MdpBuilder::MdpBuilder(int horizon) : horizon_(horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
}

MdpBuilder& MdpBuilder::add_level(const std::vector<std::string>& names, std::size_t num_actions) {
  int level = states_.empty() ? 1 : states_.back().level + 1;
  if (level > horizon_) throw std::invalid_argument("more levels than the horizon");
  for (const auto& name : names) {
    if (index_.count(name)) throw std::invalid_argument("duplicate state name '" + name + "'");
    index_.emplace(name, states_.size());
    states_.push_back({name, level, std::vector<double>(num_actions, 0.0),
                       std::vector<std::vector<std::pair<std::string, double>>>(num_actions)});
  }
  return *this;
}

MdpBuilder::PendingState& MdpBuilder::find(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::invalid_argument("unknown state '" + name + "'");
  return states_[it->second];
}

MdpBuilder& MdpBuilder::set_num_actions(const std::string& state, std::size_t num_actions) {
  auto& s = find(state);
  s.reward.resize(num_actions, 0.0);
  s.next.resize(num_actions);
  return *this;
}

MdpBuilder& MdpBuilder::set_reward(const std::string& state, ActionId a, double mean) {
  auto& s = find(state);
  if (a >= s.reward.size()) throw std::invalid_argument("action index out of range at '" + state + "'");
  s.reward[a] = mean;
  return *this;
}

MdpBuilder& MdpBuilder::add_transition(const std::string& state, ActionId a, const std::string& next,
                                       double prob) {
  auto& s = find(state);
  if (a >= s.next.size()) throw std::invalid_argument("action index out of range at '" + state + "'");
  s.next[a].emplace_back(next, prob);
  return *this;
}

MdpBuilder& MdpBuilder::set_initial(const std::string& state, double prob) {
  find(state);
  initial_.emplace_back(state, prob);
  return *this;
}

TabularMdp MdpBuilder::build() const {
  TabularMdp mdp;
  mdp.horizon = horizon_;
  mdp.levels.resize(static_cast<std::size_t>(horizon_));
  mdp.pair_offset.push_back(0);
  for (StateId id = 0; id < states_.size(); ++id) {
    const auto& s = states_[id];
    mdp.state_names.push_back(s.name);
    mdp.state_level.push_back(s.level);
    mdp.levels[static_cast<std::size_t>(s.level - 1)].push_back(id);
    mdp.pair_offset.push_back(mdp.pair_offset.back() + s.reward.size());
    for (std::size_t a = 0; a < s.reward.size(); ++a) {
      mdp.reward_mean.push_back(s.reward[a]);
      std::vector<Transition> row;
      for (const auto& [next, p] : s.next[a]) row.push_back({index_.at(next), p});
      mdp.transitions.push_back(std::move(row));
    }
  }
  for (const auto& [name, p] : initial_) mdp.initial.push_back({index_.at(name), p});
  return mdp;
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (const auto& v : violations) out << "violation: " << v << '\n';
  for (const auto& w : warnings) out << "warning: " << w << '\n';
  return out.str();
}

namespace {

void check_row(const TabularMdp& mdp, const std::vector<Transition>& row, int expected_level,
               const std::string& where, ValidationReport& report) {
  double mass = 0.0;
  for (const auto& t : row) {
    if (t.next >= mdp.num_states()) {
      report.violations.push_back(where + ": successor id out of range");
      continue;
    }
    if (!(t.prob >= 0.0)) report.violations.push_back(where + ": negative probability");
    if (mdp.state_level[t.next] != expected_level)
      report.violations.push_back(where + ": successor '" + mdp.state_names[t.next] + "' not on level " +
                                  std::to_string(expected_level));
    mass += t.prob;
  }
  if (std::abs(mass - 1.0) > kProbabilityTolerance)
    report.violations.push_back(where + ": row mass != 1 (" + std::to_string(mass) + ")");
}

}  // namespace

ValidationReport validate(const TabularMdp& mdp) {
  ValidationReport report;
  const std::size_t S = mdp.num_states();
  if (mdp.horizon < 1) {
    report.violations.push_back("horizon must be positive");
    return report;
  }
  if (mdp.state_level.size() != S || mdp.pair_offset.size() != S + 1 ||
      mdp.transitions.size() != mdp.reward_mean.size() || mdp.levels.size() != static_cast<std::size_t>(mdp.horizon) ||
      (S > 0 && mdp.pair_offset.back() != mdp.reward_mean.size())) {
    report.violations.push_back("inconsistent table sizes");
    return report;
  }

  std::vector<int> seen(S, 0);
  for (std::size_t h = 0; h < mdp.levels.size(); ++h) {
    if (mdp.levels[h].empty()) report.violations.push_back("level " + std::to_string(h + 1) + " is empty");
    for (StateId s : mdp.levels[h]) {
      if (s >= S || mdp.state_level[s] != static_cast<int>(h + 1)) {
        report.violations.push_back("level " + std::to_string(h + 1) + " lists a state of another level");
        continue;
      }
      ++seen[s];
    }
  }
  for (StateId s = 0; s < S; ++s)
    if (seen[s] != 1) report.violations.push_back("state '" + mdp.state_names[s] + "' not in exactly one level");
  if (!report.ok()) return report;

  std::vector<char> reachable(S, 0);
  for (StateId s = 0; s < S; ++s) {
    const int level = mdp.state_level[s];
    if (mdp.num_actions(s) == 0) report.violations.push_back("state '" + mdp.state_names[s] + "' has no actions");
    for (ActionId a = 0; a < mdp.num_actions(s); ++a) {
      const PairId p = mdp.pair(s, a);
      const std::string where = "(" + mdp.state_names[s] + ", a" + std::to_string(a + 1) + ")";
      const double r = mdp.reward_mean[p];
      if (!(r >= 0.0 && r <= 1.0)) report.violations.push_back(where + ": reward mean out of [0,1]");
      if (level == mdp.horizon) {
        if (!mdp.transitions[p].empty())
          report.violations.push_back(where + ": last-level state has outgoing transitions");
      } else {
        check_row(mdp, mdp.transitions[p], level + 1, where, report);
        for (const auto& t : mdp.transitions[p])
          if (t.next < S && t.prob > 0.0) reachable[t.next] = 1;
      }
    }
  }
  check_row(mdp, mdp.initial, 1, "initial distribution", report);
  for (StateId s = 0; s < S; ++s)
    if (mdp.state_level[s] > 1 && !reachable[s])
      report.warnings.push_back("state '" + mdp.state_names[s] + "' is unreachable");
  return report;
}

void require_valid(const TabularMdp& mdp) {
  auto report = validate(mdp);
  if (!report.ok()) throw std::invalid_argument("invalid MDP:\n" + report.summary());
}

void require_valid(const TabularMdp& mdp, const DeterministicPolicy& pi) {
  if (pi.action.size() != mdp.num_states()) throw std::invalid_argument("policy size does not match state count");
  for (StateId s = 0; s < mdp.num_states(); ++s)
    if (pi.action[s] >= mdp.num_actions(s))
      throw std::invalid_argument("policy picks an invalid action at '" + mdp.state_names[s] + "'");
}

}  // namespace amb
