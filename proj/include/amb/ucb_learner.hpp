#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "amb/amb_learner.hpp"
#include "amb/mdp.hpp"

namespace amb {

/// Optimistic Q-learning with Hoeffding bonuses: one-step bootstrap, upper
/// bounds only, greedy in the upper bound. Shares the step size and bonus of
/// AmbConfig so comparisons isolate the bootstrap and selection rules.
struct UcbState {
  MdpShape shape;
  std::vector<double> q_upper;            // per pair
  std::vector<double> v_upper;            // per state, terminal last
  std::vector<std::int64_t> visit_count;  // per pair
  std::int64_t episode_index = 0;
};

UcbState ucb_init(const MdpShape& shape, const AmbConfig& config);

/// argmax_a q_upper(s, a), lowest index on ties.
ActionId ucb_select_action(const UcbState& state, StateId s);

/// r_h + v_upper(s_{h+1}) + bonus, with v_upper(terminal) = 0.
double ucb_upper_target(const Trajectory& traj, int h, std::span<const double> v_upper, StateId terminal,
                        double bonus_value);

void ucb_update_episode(UcbState& state, const Trajectory& traj, const AmbConfig& config, std::size_t num_states,
                        std::size_t num_actions);

class UcbLearner {
 public:
  UcbLearner(const MdpShape& shape, const AmbConfig& config);

  void policy(DeterministicPolicy& pi) const;
  void observe(const Trajectory& traj);

  const UcbState& state() const { return state_; }
  std::size_t decided_count() const { return 0; }
  std::size_t eliminated_pairs() const { return 0; }

 private:
  AmbConfig config_;
  UcbState state_;
  std::size_t num_actions_;
};

}  // namespace amb
