#pragma once

// Reference computations used only by the tests. They deliberately avoid the
// library's solver, evaluator and sampler so that agreement means something.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "amb/mdp.hpp"

namespace oracle {

using amb::ActionId;
using amb::StateId;
using amb::TabularMdp;

/// Expected return of `policy` from a start distribution, by pushing state
/// occupancy forward one level at a time.
inline double forward_value(const TabularMdp& mdp, const std::vector<ActionId>& policy,
                            const std::vector<double>& start) {
  std::vector<double> occ = start;
  double total = 0.0;
  for (int h = 1; h <= mdp.horizon; ++h) {
    std::vector<double> next(mdp.num_states(), 0.0);
    for (StateId s = 0; s < mdp.num_states(); ++s) {
      if (occ[s] == 0.0) continue;
      if (mdp.state_level[s] > h) next[s] += occ[s];  // not reached yet
      if (mdp.state_level[s] != h) continue;
      const auto p = mdp.pair_offset[s] + policy[s];
      total += occ[s] * mdp.reward_mean[p];
      for (const auto& t : mdp.transitions[p]) next[t.next] += occ[s] * t.prob;
    }
    occ.swap(next);
  }
  return total;
}

inline std::vector<double> point_mass(const TabularMdp& mdp, StateId s) {
  std::vector<double> d(mdp.num_states(), 0.0);
  d[s] = 1.0;
  return d;
}

inline std::vector<double> initial_distribution(const TabularMdp& mdp) {
  std::vector<double> d(mdp.num_states(), 0.0);
  for (const auto& t : mdp.initial) d[t.next] += t.prob;
  return d;
}

/// Calls f(policy) for every deterministic policy.
template <class F>
void for_each_policy(const TabularMdp& mdp, F&& f) {
  std::vector<ActionId> policy(mdp.num_states(), 0);
  for (;;) {
    f(policy);
    StateId s = 0;
    while (s < policy.size() && ++policy[s] == mdp.num_actions(s)) policy[s++] = 0;
    if (s == policy.size()) return;
  }
}

struct BruteForce {
  std::vector<double> v_star;  // per state
  std::vector<double> q_star;  // per pair
  double v0_star = -1.0;
};

/// Optimal values by exhaustive search over deterministic policies.
/// Q*(x,a) is the best return from x among policies that play a at x.
inline BruteForce brute_force(const TabularMdp& mdp) {
  BruteForce out;
  out.v_star.assign(mdp.num_states(), -1.0);
  out.q_star.assign(mdp.num_pairs(), -1.0);
  const auto mu = initial_distribution(mdp);
  std::vector<std::vector<double>> starts;
  for (StateId s = 0; s < mdp.num_states(); ++s) starts.push_back(point_mass(mdp, s));
  for_each_policy(mdp, [&](const std::vector<ActionId>& pi) {
    out.v0_star = std::max(out.v0_star, forward_value(mdp, pi, mu));
    for (StateId s = 0; s < mdp.num_states(); ++s) {
      const double v = forward_value(mdp, pi, starts[s]);
      out.v_star[s] = std::max(out.v_star[s], v);
      auto& q = out.q_star[mdp.pair_offset[s] + pi[s]];
      q = std::max(q, v);
    }
  });
  return out;
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sample-average return of `policy` using an engine of its own.
inline MonteCarloEstimate monte_carlo_value(const TabularMdp& mdp, const std::vector<ActionId>& policy,
                                            std::size_t episodes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto draw = [&](const std::vector<amb::Transition>& row) {
    double u = unif(rng), acc = 0.0;
    for (const auto& t : row) {
      acc += t.prob;
      if (u < acc) return t.next;
    }
    return row.back().next;
  };
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t e = 0; e < episodes; ++e) {
    StateId s = draw(mdp.initial);
    double ret = 0.0;
    for (int h = 1; h <= mdp.horizon; ++h) {
      const auto p = mdp.pair_offset[s] + policy[s];
      ret += unif(rng) < mdp.reward_mean[p] ? 1.0 : 0.0;
      if (h < mdp.horizon) s = draw(mdp.transitions[p]);
    }
    sum += ret;
    sum_sq += ret * ret;
  }
  const double n = static_cast<double>(episodes);
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

/// alpha^t_n for t = 0..n straight from the product definition, O(n^2).
inline std::vector<double> direct_alpha_weights(std::int64_t n, int H) {
  auto lr = [H](std::int64_t t) { return (H + 1.0) / (H + static_cast<double>(t)); };
  std::vector<double> w(static_cast<std::size_t>(n) + 1);
  for (std::int64_t t = 0; t <= n; ++t) {
    double prod = t == 0 ? 1.0 : lr(t);
    for (std::int64_t j = t + 1; j <= n; ++j) prod *= 1.0 - lr(j);
    w[static_cast<std::size_t>(t)] = prod;
  }
  return w;
}

/// D(B(1/2) || B(1/2 + x)) in closed form.
inline double kl_half(double x) { return -0.5 * std::log(1.0 - 4.0 * x * x); }

}  // namespace oracle
