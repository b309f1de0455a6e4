#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "amb/mdp.hpp"

namespace amb {

struct AmbConfig {
  double delta = 0.1;              // failure probability, in (0, 1/3)
  int horizon = 1;
  std::int64_t num_episodes = 1;   // K, fixed in advance
  double bonus_constant = 1.0;
  double tolerance = 0.0;          // slack on the elimination comparison

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

/// Mutable learner state of adaptive multi-step bootstrap.
///
/// Value tables have one extra trailing entry for the termination state,
/// which is pinned at 0 and never decided. The admissible set A_k(x) is kept
/// as a per-pair mask over the ordered actions of x.
struct AmbState {
  MdpShape shape;
  std::vector<double> q_upper;
  std::vector<double> q_lower;
  std::vector<double> v_upper;
  std::vector<double> v_lower;
  std::vector<std::int64_t> visit_count;
  std::vector<char> admissible;
  std::vector<std::size_t> admissible_count;
  std::vector<char> decided;
  std::size_t decided_count = 0;
  std::int64_t episode_index = 0;  // completed episodes

  bool is_admissible(StateId s, ActionId a) const { return admissible[shape.pair(s, a)] != 0; }
  std::vector<ActionId> admissible_actions(StateId s) const;
  std::size_t eliminated_pairs() const;
};

AmbState amb_init(const MdpShape& shape, const AmbConfig& config);

/// Bonus for the n-th visit under `config`, with S*A*K/delta inside the log.
double bonus(std::int64_t n, const AmbConfig& config, std::size_t num_states, std::size_t num_actions);

/// The sole admissible action of a decided state, otherwise the admissible
/// action with the widest confidence interval (lowest index on ties).
ActionId select_action(const AmbState& state, StateId s);

/// Writes the policy induced by `state` into `pi`.
void current_policy(const AmbState& state, DeterministicPolicy& pi);

struct SuffixPoint {
  int level;      // h' in h+1..H+1
  StateId state;  // s_{k,h'} or the termination state
};

/// First step after level h whose state is undecided; (H+1, terminal) if none.
SuffixPoint first_undecided_suffix(const Trajectory& traj, int h, std::span<const char> decided, StateId terminal);

/// Sum of the realized rewards on levels h..h_end-1. Throws unless h < h_end <= H+1.
double monte_carlo_return(const Trajectory& traj, int h, int h_end);

/// Optimistic bootstrap target at level h: the rewards up to the first
/// undecided state plus that state's value bound and the bonus.
double amb_upper_target(const Trajectory& traj, int h, std::span<const char> decided,
                        std::span<const double> v_upper, StateId terminal, double bonus_value);

/// min{H, (1-alpha) q + alpha target}
inline double interpolate_upper(double q, double alpha, double target, double horizon) {
  const double v = (1.0 - alpha) * q + alpha * target;
  return v < horizon ? v : horizon;
}

/// max{0, (1-alpha) q + alpha target}
inline double interpolate_lower(double q, double alpha, double target) {
  const double v = (1.0 - alpha) * q + alpha * target;
  return v > 0.0 ? v : 0.0;
}

/// One backward pass over `traj` followed by elimination.
///
/// Bootstrap values are read as they were before this episode, and the
/// decided set is the one frozen at episode start.
void update_episode(AmbState& state, const Trajectory& traj, const AmbConfig& config, std::size_t num_states,
                    std::size_t num_actions);

/// Drops every admissible action whose upper bound is below the state's lower
/// value bound, then refreshes the decided set.
void eliminate(AmbState& state, double tolerance = 0.0);

/// JSON dump of the bounds, counts, admissible sets and decided states.
std::string amb_snapshot(const AmbState& state, const TabularMdp& mdp);

/// AmbState plus its fixed configuration, in the form the harness drives.
class AmbLearner {
 public:
  AmbLearner(const MdpShape& shape, const AmbConfig& config);

  void policy(DeterministicPolicy& pi) const { current_policy(state_, pi); }
  void observe(const Trajectory& traj);

  const AmbState& state() const { return state_; }
  const AmbConfig& config() const { return config_; }
  std::size_t decided_count() const { return state_.decided_count; }
  std::size_t eliminated_pairs() const { return state_.eliminated_pairs(); }

 private:
  AmbConfig config_;
  AmbState state_;
  std::size_t num_actions_;
};

}  // namespace amb
