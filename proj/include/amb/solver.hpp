#pragma once

#include <limits>
#include <vector>

#include "amb/mdp.hpp"

namespace amb {

/// Gaps with |gap| below this count as optimal.
inline constexpr double kOptimalGapTolerance = 1e-9;

/// Exact optimal values and gap structure of a TabularMdp.
struct ExactSolution {
  std::vector<double> v_star;        // per state (terminal excluded)
  std::vector<double> q_star;        // per pair
  std::vector<double> gap;           // per pair, V* - Q*
  std::vector<double> gap_min_local; // per state; 0 with several optimal actions, +inf with a single action
  double gap_min_global = std::numeric_limits<double>::infinity();
  std::vector<std::pair<StateId, ActionId>> z_opt;
  std::vector<std::pair<StateId, ActionId>> z_mul;
  double v0_star = 0.0;

  bool is_optimal(PairId p) const { return gap[p] <= kOptimalGapTolerance; }
};

/// Bellman optimality recursion from level H down to level 1.
ExactSolution backward_induction(const TabularMdp& mdp);

/// Greedy policy from Q*, lowest action index on ties.
DeterministicPolicy greedy_policy(const TabularMdp& mdp, const ExactSolution& solution);

/// True iff every state has exactly one optimal action.
bool has_unique_optimal_actions(const ExactSolution& solution);

/// Reusable workspace for exact evaluation of deterministic policies.
class PolicyEvaluator {
 public:
  explicit PolicyEvaluator(const TabularMdp& mdp);

  /// Returns V^pi_0; per-state values are left in `state_values()`.
  double evaluate(const DeterministicPolicy& pi);
  const std::vector<double>& state_values() const { return values_; }

 private:
  const TabularMdp* mdp_;
  std::vector<double> values_;
};

/// Exact V^pi_0 by backward policy evaluation. Validates `pi`.
double policy_value(const TabularMdp& mdp, const DeterministicPolicy& pi);

}  // namespace amb
