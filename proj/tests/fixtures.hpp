#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "amb/environments.hpp"
#include "amb/mdp.hpp"

namespace fixtures {

/// H=1 bandit with one state and the given arm means.
inline amb::TabularMdp bandit(const std::vector<double>& means) {
  amb::MdpBuilder b(1);
  b.add_level({"x"}, means.size());
  for (std::size_t a = 0; a < means.size(); ++a) b.set_reward("x", a, means[a]);
  b.set_initial("x", 1.0);
  return b.build();
}

/// Deterministic two-level instance: a1 leads to "good" and a2 to "bad";
/// reward means supplied per level.
inline amb::TabularMdp deterministic_fork(double r_root, double r_good, double r_bad) {
  amb::MdpBuilder b(2);
  b.add_level({"root"}, 2).add_level({"good", "bad"}, 1);
  b.set_reward("root", 0, r_root).set_reward("root", 1, r_root);
  b.add_transition("root", 0, "good", 1.0).add_transition("root", 1, "bad", 1.0);
  b.set_reward("good", 0, r_good).set_reward("bad", 0, r_bad);
  b.set_initial("root", 1.0);
  return b.build();
}

/// Chain of H single-action states with reward mean 1 everywhere.
inline amb::TabularMdp unit_chain(int H) {
  amb::MdpBuilder b(H);
  for (int h = 1; h <= H; ++h) b.add_level({"c" + std::to_string(h)}, 1);
  for (int h = 1; h <= H; ++h) {
    b.set_reward("c" + std::to_string(h), 0, 1.0);
    if (h < H) b.add_transition("c" + std::to_string(h), 0, "c" + std::to_string(h + 1), 1.0);
  }
  b.set_initial("c1", 1.0);
  return b.build();
}

/// Random instance with 1..3 levels, 1..6 states in total and two actions.
inline amb::TabularMdp small_random(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int H = 1 + static_cast<int>(rng() % 3);
  std::vector<std::size_t> sizes(static_cast<std::size_t>(H), 1);
  std::size_t total = sizes.size();
  const std::size_t target = std::max<std::size_t>(total, 1 + rng() % 6);
  while (total < target) {
    ++sizes[rng() % sizes.size()];
    ++total;
  }
  return amb::random_layered_mdp({sizes, 2, seed, std::nullopt, 0});
}

}  // namespace fixtures
