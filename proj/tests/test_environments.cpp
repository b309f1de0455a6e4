#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "amb/environments.hpp"
#include "amb/mdp_io.hpp"
#include "amb/solver.hpp"
#include "oracles.hpp"

using namespace amb;

namespace {

double inverse_gap_sum(const ExactSolution& sol) {
  double total = 0.0;
  for (double g : sol.gap)
    if (g > kOptimalGapTolerance) total += 1.0 / g;
  return total;
}

}  // namespace

TEST_CASE("hard two-level instance") {
  for (int n : {3, 4, 8, 40}) {
    for (double d : {0.01, 0.05, 0.1, 0.124}) {
      CAPTURE(n);
      CAPTURE(d);
      auto mdp = sj_hard_instance({n, d});
      REQUIRE(validate(mdp).ok());
      CHECK(validate(mdp).warnings.empty());
      CHECK(mdp.num_states() == static_cast<std::size_t>(n));
      CHECK(mdp.horizon == 2);
      auto sol = backward_induction(mdp);
      CHECK(std::abs(sol.v0_star - (0.5 + d)) <= 1e-12);
      CHECK(std::abs(sol.gap_min_global - d) <= 1e-12);
      CHECK(std::abs(sol.q_star[mdp.pair(mdp.state_id("s1"), 1)] - 0.5) <= 1e-12);
      CHECK(sol.z_mul.empty());
      CHECK(sol.z_opt.size() == static_cast<std::size_t>(n));
      for (StateId s = 0; s < mdp.num_states(); ++s) CHECK(sol.is_optimal(mdp.pair(s, 0)));
    }
  }
  CHECK_THROWS_AS(sj_hard_instance({2, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(sj_hard_instance({5, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(sj_hard_instance({5, 0.125}), std::invalid_argument);
}

TEST_CASE("tree instance: shape and gaps for n=4, A=3") {
  auto mdp = tree_lower_bound_base({4, 3, 0.1, {}});
  REQUIRE(validate(mdp).ok());
  CHECK(mdp.num_states() == 7);
  CHECK(mdp.horizon == 3);
  auto sol = backward_induction(mdp);
  CHECK(std::abs(sol.gap_min_global - 0.1) <= 1e-12);
  const StateId x1 = mdp.state_id("x1");
  CHECK(sol.is_optimal(mdp.pair(x1, 0)));
  for (ActionId a = 1; a < 3; ++a) CHECK(std::abs(sol.gap[mdp.pair(x1, a)] - 0.1) <= 1e-12);
  // Every gap is either 0 or gamma.
  for (double g : sol.gap) CHECK((g <= kOptimalGapTolerance || std::abs(g - 0.1) <= 1e-12));
  std::size_t above_half = 0;
  for (double r : mdp.reward_mean) above_half += r > 0.5;
  CHECK(above_half == 1);
}

TEST_CASE("tree instance: state count is 2n-1 and depth log2(n)+1") {
  for (std::size_t n : {2u, 4u, 8u, 16u, 32u}) {
    auto mdp = tree_lower_bound_base({n, 2, 0.1, {}});
    CHECK(mdp.num_states() == 2 * n - 1);
    CHECK(mdp.horizon == static_cast<int>(std::log2(static_cast<double>(n))) + 1);
    CHECK(validate(mdp).ok());
  }
  CHECK_THROWS_AS(tree_lower_bound_base({6, 2, 0.1, {}}), std::invalid_argument);
  CHECK_THROWS_AS(tree_lower_bound_base({4, 1, 0.1, {}}), std::invalid_argument);
  CHECK_THROWS_AS(tree_lower_bound_base({4, 2, 0.2, {}}), std::invalid_argument);
}

TEST_CASE("tree instance: inverse-gap sum for n=4, A=2 matches a hand count") {
  auto mdp = tree_lower_bound_base({4, 2, 0.1, {}});
  auto sol = backward_induction(mdp);
  // Positive gaps: the wrong turn at the root, the wrong turn above x1, and
  // the second action at x1, each equal to gamma. Everything else ties at 1/2.
  CHECK(std::abs(inverse_gap_sum(sol) - 30.0) <= 1e-9);
  CHECK(inverse_gap_sum(sol) <= 4.0 * std::log2(4.0) / 0.1);
  std::size_t positive = 0;
  for (double g : sol.gap) positive += g > kOptimalGapTolerance;
  CHECK(positive == 3);
}

TEST_CASE("perturbed tree instances") {
  const double g = 0.1;
  auto base = tree_lower_bound_base({4, 2, g, {}});
  auto m21 = tree_lower_bound_perturbed(base, 2, 1, g);
  REQUIRE(validate(m21).ok());
  CHECK(std::abs(backward_induction(m21).v0_star - 0.7) <= 1e-12);
  CHECK(m21.transitions.size() == base.transitions.size());
  for (PairId p = 0; p < base.num_pairs(); ++p) {
    REQUIRE(m21.transitions[p].size() == base.transitions[p].size());
    for (std::size_t i = 0; i < base.transitions[p].size(); ++i)
      CHECK(m21.transitions[p][i].prob == base.transitions[p][i].prob);
  }

  std::set<double> allowed = {0.0, 0.5, 0.5 + g, 0.5 + 2 * g};
  for (std::size_t i = 2; i <= 4; ++i)
    for (std::size_t j = 1; j <= 2; ++j)
      for (double r : tree_lower_bound_perturbed(base, i, j, g).reward_mean) CHECK(allowed.count(r) == 1);

  CHECK_THROWS_AS(tree_lower_bound_perturbed(base, 1, 1, g), std::invalid_argument);
  CHECK_THROWS_AS(tree_lower_bound_perturbed(base, 5, 1, g), std::invalid_argument);
  CHECK_THROWS_AS(tree_lower_bound_perturbed(base, 2, 3, g), std::invalid_argument);
  CHECK_THROWS_AS(tree_lower_bound_perturbed(base, 2, 0, g), std::invalid_argument);
}

TEST_CASE("tree leaf action override") {
  auto mdp = tree_lower_bound_base({4, 2, 0.1, {3, 1, 2, 1}});
  REQUIRE(validate(mdp).ok());
  CHECK(mdp.num_actions(mdp.state_id("x1")) == 3);
  CHECK(mdp.num_actions(mdp.state_id("x2")) == 1);
  CHECK_THROWS_AS(tree_lower_bound_base({4, 2, 0.1, {3, 1}}), std::invalid_argument);
}

TEST_CASE("random layered MDPs") {
  SUBCASE("single-state bandit is reproducible") {
    auto a = random_layered_mdp({{1}, 2, 3, std::nullopt, 0});
    auto b = random_layered_mdp({{1}, 2, 3, std::nullopt, 0});
    CHECK(a.num_states() == 1);
    CHECK(a.reward_mean == b.reward_mean);
    CHECK(validate(a).ok());
  }
  SUBCASE("same seed gives byte-identical serializations") {
    RandomMdpSpec spec{{3, 4, 2}, 3, 99, std::nullopt, 0};
    CHECK(mdp_to_text(random_layered_mdp(spec)) == mdp_to_text(random_layered_mdp(spec)));
    spec.seed = 100;
    CHECK(mdp_to_text(random_layered_mdp(spec)) != mdp_to_text(random_layered_mdp({{3, 4, 2}, 3, 99, std::nullopt, 0})));
  }
  SUBCASE("min_gap is honoured with unique optimal actions") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto mdp = random_layered_mdp({{4, 4, 4}, 3, seed, 0.2, 100000});
      REQUIRE(validate(mdp).ok());
      auto sol = backward_induction(mdp);
      CHECK(sol.gap_min_global >= 0.2);
      CHECK(sol.z_mul.empty());
    }
  }
  SUBCASE("exhausted budget is reported") {
    CHECK_THROWS_AS(random_layered_mdp({{3, 3}, 4, 1, 0.9, 50}), std::runtime_error);
  }
  SUBCASE("bad shapes are rejected") {
    CHECK_THROWS_AS(random_layered_mdp({{}, 2, 0, std::nullopt, 0}), std::invalid_argument);
    CHECK_THROWS_AS(random_layered_mdp({{2, 0}, 2, 0, std::nullopt, 0}), std::invalid_argument);
    CHECK_THROWS_AS(random_layered_mdp({{2}, 1, 0, std::nullopt, 0}), std::invalid_argument);
  }
}

TEST_CASE("Bernoulli KL") {
  CHECK(kl_bernoulli(0.5, 0.5) == 0.0);
  CHECK(kl_bernoulli(0.5, 0.75) == doctest::Approx(0.143841).epsilon(1e-6));
  CHECK(std::abs(kl_bernoulli(0.5, 0.75) + 0.5 * std::log(0.75)) <= 1e-12);
  for (int i = 1; i <= 25; ++i) {
    const double x = i / 100.0;
    CHECK(std::abs(kl_bernoulli(0.5, 0.5 + x) - oracle::kl_half(x)) <= 1e-12);
    CHECK(kl_bernoulli(0.5, 0.5 + x) <= 8.0 * x * x / 3.0);
  }
  for (int i = 1; i < 20; ++i) {
    for (int j = 1; j < 20; ++j) {
      const double p = i / 20.0, q = j / 20.0;
      const double d = kl_bernoulli(p, q);
      CHECK(d >= 0.0);
      CHECK((i == j) == (d <= 1e-12));
    }
  }
  CHECK_THROWS_AS(kl_bernoulli(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(kl_bernoulli(0.5, 1.0), std::invalid_argument);
}

TEST_CASE("environment specs") {
  CHECK(make_environment("sj:n=5,delta_min=0.1").num_states() == 5);
  CHECK(make_environment("tree:n=8,A=3,gamma=0.05").num_states() == 15);
  auto pert = make_environment("tree:n=4,A=2,gamma=0.1,perturb=3/2");
  CHECK(std::abs(backward_induction(pert).v0_star - 0.7) <= 1e-12);
  CHECK(make_environment("tree:n=4,A=2,gamma=0.1,leaf_actions=2/2/1/1").num_pairs() == 3 * 2 + 2 + 2 + 1 + 1);
  auto r = make_environment("random:levels=2/3,A=2,seed=4");
  CHECK(r.num_states() == 5);
  CHECK(backward_induction(make_environment("random:levels=3/3,A=2,seed=1,min_gap=0.1")).gap_min_global >= 0.1);

  const auto path = std::filesystem::temp_directory_path() / "amb_env_spec.json";
  save_mdp(r, path);
  CHECK(mdp_to_text(make_environment("file:" + path.string())) == mdp_to_text(r));
  CHECK(mdp_to_text(make_environment(path.string())) == mdp_to_text(r));
  std::filesystem::remove(path);

  CHECK_THROWS_AS(make_environment("sj:n=5"), std::invalid_argument);
  CHECK_THROWS_AS(make_environment("sj:n=5,delta_min=0.1,extra=1"), std::invalid_argument);
  CHECK_THROWS_AS(make_environment("sj:n=five,delta_min=0.1"), std::invalid_argument);
  CHECK_THROWS_AS(make_environment("cube:n=3"), std::invalid_argument);
  CHECK_THROWS_AS(make_environment("tree:n=4,A=2,gamma=0.1,perturb=2"), std::invalid_argument);
  CHECK_THROWS(make_environment("file:/nonexistent/instance.json"));
}
