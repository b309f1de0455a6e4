#include "amb/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace amb {

ExactSolution backward_induction(const TabularMdp& mdp) {
  require_valid(mdp);
  const std::size_t S = mdp.num_states();
  ExactSolution sol;
  sol.v_star.assign(S, 0.0);
  sol.q_star.assign(mdp.num_pairs(), 0.0);
  sol.gap.assign(mdp.num_pairs(), 0.0);
  sol.gap_min_local.assign(S, std::numeric_limits<double>::infinity());

  for (int h = mdp.horizon; h >= 1; --h) {
    for (StateId s : mdp.levels[static_cast<std::size_t>(h - 1)]) {
      double best = -std::numeric_limits<double>::infinity();
      for (ActionId a = 0; a < mdp.num_actions(s); ++a) {
        const PairId p = mdp.pair(s, a);
        double q = mdp.reward_mean[p];
        for (const auto& t : mdp.transitions[p]) q += t.prob * sol.v_star[t.next];
        sol.q_star[p] = q;
        best = std::max(best, q);
      }
      sol.v_star[s] = best;
    }
  }

  for (StateId s = 0; s < S; ++s) {
    std::size_t optimal = 0;
    double local = std::numeric_limits<double>::infinity();
    for (ActionId a = 0; a < mdp.num_actions(s); ++a) {
      const PairId p = mdp.pair(s, a);
      double g = sol.v_star[s] - sol.q_star[p];
      if (g <= kOptimalGapTolerance) {
        g = 0.0;
        ++optimal;
        sol.z_opt.emplace_back(s, a);
      } else {
        local = std::min(local, g);
        sol.gap_min_global = std::min(sol.gap_min_global, g);
      }
      sol.gap[p] = g;
    }
    if (optimal > 1) {
      local = 0.0;
      for (ActionId a = 0; a < mdp.num_actions(s); ++a)
        if (sol.gap[mdp.pair(s, a)] == 0.0) sol.z_mul.emplace_back(s, a);
    }
    sol.gap_min_local[s] = local;
  }

  for (const auto& t : mdp.initial) sol.v0_star += t.prob * sol.v_star[t.next];
  return sol;
}

DeterministicPolicy greedy_policy(const TabularMdp& mdp, const ExactSolution& solution) {
  DeterministicPolicy pi;
  pi.action.resize(mdp.num_states());
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    ActionId best = 0;
    for (ActionId a = 1; a < mdp.num_actions(s); ++a)
      if (solution.q_star[mdp.pair(s, a)] > solution.q_star[mdp.pair(s, best)]) best = a;
    pi.action[s] = best;
  }
  return pi;
}

bool has_unique_optimal_actions(const ExactSolution& solution) { return solution.z_mul.empty(); }

PolicyEvaluator::PolicyEvaluator(const TabularMdp& mdp) : mdp_(&mdp), values_(mdp.num_states(), 0.0) {}

double PolicyEvaluator::evaluate(const DeterministicPolicy& pi) {
  const TabularMdp& mdp = *mdp_;
  for (int h = mdp.horizon; h >= 1; --h) {
    for (StateId s : mdp.levels[static_cast<std::size_t>(h - 1)]) {
      const PairId p = mdp.pair(s, pi.action[s]);
      double v = mdp.reward_mean[p];
      for (const auto& t : mdp.transitions[p]) v += t.prob * values_[t.next];
      values_[s] = v;
    }
  }
  double v0 = 0.0;
  for (const auto& t : mdp.initial) v0 += t.prob * values_[t.next];
  return v0;
}

double policy_value(const TabularMdp& mdp, const DeterministicPolicy& pi) {
  require_valid(mdp, pi);
  PolicyEvaluator eval(mdp);
  return eval.evaluate(pi);
}

}  // namespace amb
