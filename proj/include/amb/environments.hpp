#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "amb/mdp.hpp"

namespace amb {

/// Two-level instance on which optimistic Q-learning over-explores.
///
/// s1 chooses between a1 (to s2, which pays 1/2 + gap) and a2 (uniform over
/// s3..sn, which pay 1/2). Rewards are Bernoulli; a2 pays nothing on level 2.
struct SjInstanceSpec {
  int n = 3;
  double delta_min = 0.1;
};

/// Complete binary tree whose leaves form a bandit with one good arm.
struct TreeInstanceSpec {
  std::size_t num_leaves = 2;
  std::size_t last_level_actions = 2;
  double gamma = 0.1;
  /// Optional per-leaf action counts replacing `last_level_actions`.
  std::vector<std::size_t> leaf_actions;
};

struct RandomMdpSpec {
  std::vector<std::size_t> level_sizes;
  std::size_t num_actions = 2;
  std::uint64_t seed = 0;
  std::optional<double> min_gap;
  /// Redraws allowed per state before giving up on `min_gap`.
  std::size_t resample_budget = 100000;
};

TabularMdp sj_hard_instance(const SjInstanceSpec& spec);

TabularMdp tree_lower_bound_base(const TreeInstanceSpec& spec);

/// Raises leaf x_i's action a_j (both 1-based, i >= 2) to 1/2 + 2*gamma.
TabularMdp tree_lower_bound_perturbed(const TabularMdp& base, std::size_t leaf, std::size_t action, double gamma);

/// Random layered MDP with Dirichlet(1) transition rows and uniform reward means.
///
/// With `min_gap`, states are redrawn level by level from the bottom until
/// each has a unique optimal action that beats the runner-up by `min_gap`.
TabularMdp random_layered_mdp(const RandomMdpSpec& spec);

/// D(B(p) || B(q)) in nats; p and q must lie strictly inside (0, 1).
double kl_bernoulli(double p, double q);

/// Builds an instance from a textual spec:
///   sj:n=8,delta_min=0.1
///   tree:n=4,A=2,gamma=0.1[,perturb=2/1]
///   random:levels=10/10/10,A=3,seed=7[,min_gap=0.15]
///   file:path/to/instance.json   (a bare *.json path also works)
TabularMdp make_environment(const std::string& spec);

}  // namespace amb
