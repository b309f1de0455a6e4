#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace amb {

using StateId = std::size_t;
using ActionId = std::size_t;
using PairId = std::size_t;

inline constexpr double kProbabilityTolerance = 1e-12;

struct Transition {
  StateId next;
  double prob;
};

/// Layered finite-horizon MDP with Bernoulli rewards.
///
/// States are numbered 0..S-1 in level order. State-action pairs are stored
/// flat: the pair (s, a) lives at `pair_offset[s] + a`. The termination state
/// sits at id S on level H+1 and carries no tables of its own.
struct TabularMdp {
  int horizon = 0;
  std::vector<std::string> state_names;
  std::vector<int> state_level;                // 1-based level of each state
  std::vector<std::vector<StateId>> levels;    // levels[h-1] = states on level h
  std::vector<PairId> pair_offset;             // size S+1
  std::vector<double> reward_mean;             // per pair
  std::vector<std::vector<Transition>> transitions;  // per pair; empty on level H
  std::vector<Transition> initial;

  std::size_t num_states() const { return state_names.size(); }
  std::size_t num_pairs() const { return reward_mean.size(); }
  std::size_t num_actions(StateId s) const { return pair_offset[s + 1] - pair_offset[s]; }
  std::size_t max_actions() const;
  PairId pair(StateId s, ActionId a) const { return pair_offset[s] + a; }
  StateId terminal() const { return num_states(); }

  /// Looks a state up by name; throws std::out_of_range if absent.
  StateId state_id(const std::string& name) const;
};

/// The index layout of an MDP without its rewards or dynamics; all a learner may know.
struct MdpShape {
  int horizon = 0;
  std::vector<PairId> pair_offset;
  std::vector<int> state_level;

  static MdpShape of(const TabularMdp& mdp) { return {mdp.horizon, mdp.pair_offset, mdp.state_level}; }

  std::size_t num_states() const { return state_level.size(); }
  std::size_t num_pairs() const { return pair_offset.back(); }
  std::size_t num_actions(StateId s) const { return pair_offset[s + 1] - pair_offset[s]; }
  std::size_t max_actions() const;
  PairId pair(StateId s, ActionId a) const { return pair_offset[s] + a; }
  StateId terminal() const { return num_states(); }
};

/// Incremental construction of a TabularMdp by state name.
///
/// Levels must be added in order before any rewards or transitions are set.
/// `build()` computes the flat pair layout; it does not validate, so
/// malformed instances can be built on purpose and handed to `validate`.
class MdpBuilder {
 public:
  explicit MdpBuilder(int horizon);

  /// Adds the next level's states, each with `num_actions` actions.
  MdpBuilder& add_level(const std::vector<std::string>& names, std::size_t num_actions);
  MdpBuilder& set_num_actions(const std::string& state, std::size_t num_actions);
  MdpBuilder& set_reward(const std::string& state, ActionId a, double mean);
  MdpBuilder& add_transition(const std::string& state, ActionId a, const std::string& next, double prob);
  MdpBuilder& set_initial(const std::string& state, double prob);

  TabularMdp build() const;

 private:
  struct PendingState {
    std::string name;
    int level;
    std::vector<double> reward;
    std::vector<std::vector<std::pair<std::string, double>>> next;
  };

  PendingState& find(const std::string& name);

  int horizon_;
  std::vector<PendingState> states_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::pair<std::string, double>> initial_;
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

/// Checks every structural invariant of a layered MDP. Never throws.
ValidationReport validate(const TabularMdp& mdp);

/// Throws std::invalid_argument carrying the report summary if `mdp` is invalid.
void require_valid(const TabularMdp& mdp);

/// Deterministic policy: one action per state.
struct DeterministicPolicy {
  std::vector<ActionId> action;

  ActionId operator()(StateId s) const { return action[s]; }
};

/// Throws std::invalid_argument if `pi` does not fit `mdp`.
void require_valid(const TabularMdp& mdp, const DeterministicPolicy& pi);

struct Step {
  StateId state;
  ActionId action;
  double reward;
};

/// One episode; `steps[h-1]` is the step on level h.
struct Trajectory {
  std::int64_t episode_index = 0;
  std::vector<Step> steps;

  int horizon() const { return static_cast<int>(steps.size()); }
  StateId state_at(int h) const { return steps[static_cast<std::size_t>(h - 1)].state; }
};

}  // namespace amb
