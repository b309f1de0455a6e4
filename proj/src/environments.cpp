#include "amb/environments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "amb/mdp_io.hpp"
#include "amb/sampling.hpp"
#include "amb/solver.hpp"

namespace amb {

TabularMdp sj_hard_instance(const SjInstanceSpec& spec) {
  if (spec.n < 3) throw std::invalid_argument("sj instance needs n >= 3");
  if (!(spec.delta_min > 0.0 && spec.delta_min < 0.125))
    throw std::invalid_argument("sj instance needs 0 < delta_min < 1/8");

  std::vector<std::string> second;
  for (int i = 2; i <= spec.n; ++i) second.push_back("s" + std::to_string(i));

  MdpBuilder b(2);
  b.add_level({"s1"}, 2).add_level(second, 2);
  b.add_transition("s1", 0, "s2", 1.0);
  const double spread = 1.0 / static_cast<double>(spec.n - 2);
  for (int i = 3; i <= spec.n; ++i) b.add_transition("s1", 1, "s" + std::to_string(i), spread);
  b.set_reward("s2", 0, 0.5 + spec.delta_min);
  for (int i = 3; i <= spec.n; ++i) b.set_reward("s" + std::to_string(i), 0, 0.5);
  b.set_initial("s1", 1.0);
  return b.build();
}

namespace {

std::string tree_node_name(std::size_t level, std::size_t index) {
  return "v" + std::to_string(level) + "_" + std::to_string(index + 1);
}

std::string leaf_name(std::size_t index) { return "x" + std::to_string(index + 1); }

}  // namespace

TabularMdp tree_lower_bound_base(const TreeInstanceSpec& spec) {
  const std::size_t n = spec.num_leaves;
  if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("tree instance needs a power-of-two leaf count >= 2");
  if (spec.last_level_actions < 2) throw std::invalid_argument("tree instance needs at least 2 leaf actions");
  if (!(spec.gamma > 0.0 && spec.gamma <= 0.125)) throw std::invalid_argument("tree instance needs 0 < gamma <= 1/8");
  if (!spec.leaf_actions.empty() && spec.leaf_actions.size() != n)
    throw std::invalid_argument("leaf action override must list every leaf");

  const std::size_t depth = static_cast<std::size_t>(std::countr_zero(n)) + 1;
  MdpBuilder b(static_cast<int>(depth));
  for (std::size_t h = 1; h < depth; ++h) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < (std::size_t{1} << (h - 1)); ++i) names.push_back(tree_node_name(h, i));
    b.add_level(names, 2);
  }
  std::vector<std::string> leaves;
  for (std::size_t i = 0; i < n; ++i) leaves.push_back(leaf_name(i));
  b.add_level(leaves, spec.last_level_actions);

  for (std::size_t h = 1; h < depth; ++h) {
    for (std::size_t i = 0; i < (std::size_t{1} << (h - 1)); ++i) {
      auto child = [&](std::size_t c) { return h + 1 == depth ? leaf_name(c) : tree_node_name(h + 1, c); };
      b.add_transition(tree_node_name(h, i), 0, child(2 * i), 1.0);
      b.add_transition(tree_node_name(h, i), 1, child(2 * i + 1), 1.0);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t actions = spec.leaf_actions.empty() ? spec.last_level_actions : spec.leaf_actions[i];
    if (actions < 1) throw std::invalid_argument("every leaf needs an action");
    b.set_num_actions(leaf_name(i), actions);
    for (std::size_t a = 0; a < actions; ++a) b.set_reward(leaf_name(i), a, 0.5);
  }
  b.set_reward(leaf_name(0), 0, 0.5 + spec.gamma);
  b.set_initial(depth == 1 ? leaf_name(0) : tree_node_name(1, 0), 1.0);
  return b.build();
}

TabularMdp tree_lower_bound_perturbed(const TabularMdp& base, std::size_t leaf, std::size_t action, double gamma) {
  const auto& last = base.levels.back();
  if (leaf < 2 || leaf > last.size())
    throw std::invalid_argument("perturbed leaf must be one of x_2..x_" + std::to_string(last.size()));
  const StateId s = last[leaf - 1];
  if (action < 1 || action > base.num_actions(s))
    throw std::invalid_argument("perturbed action out of range at " + base.state_names[s]);
  if (!(gamma > 0.0 && gamma <= 0.125)) throw std::invalid_argument("gamma must lie in (0, 1/8]");
  TabularMdp out = base;
  out.reward_mean[out.pair(s, action - 1)] = 0.5 + 2.0 * gamma;
  return out;
}

namespace {

std::vector<double> dirichlet_row(RandomStream& rng, std::size_t k) {
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& x : w) total += (x = -std::log1p(-rng.uniform()));
  if (total <= 0.0) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(k));
    return w;
  }
  for (auto& x : w) x /= total;
  return w;
}

struct DrawnState {
  std::vector<double> reward;
  std::vector<std::vector<double>> row;
};

}  // namespace

TabularMdp random_layered_mdp(const RandomMdpSpec& spec) {
  if (spec.level_sizes.empty()) throw std::invalid_argument("random MDP needs at least one level");
  for (auto c : spec.level_sizes)
    if (c == 0) throw std::invalid_argument("level sizes must be positive");
  if (spec.num_actions < 2) throw std::invalid_argument("random MDP needs A >= 2");

  const std::size_t H = spec.level_sizes.size();
  const std::size_t A = spec.num_actions;
  RandomStream rng(spec.seed, 0);
  std::vector<std::vector<DrawnState>> drawn(H);
  std::vector<double> v_next;

  for (std::size_t h = H; h-- > 0;) {
    const std::size_t width = spec.level_sizes[h];
    const std::size_t next_width = h + 1 < H ? spec.level_sizes[h + 1] : 0;
    std::vector<double> v_here(width);
    drawn[h].resize(width);
    for (std::size_t i = 0; i < width; ++i) {
      std::size_t attempts = 0;
      while (true) {
        DrawnState st;
        std::vector<double> q(A);
        for (std::size_t a = 0; a < A; ++a) {
          st.reward.push_back(rng.uniform());
          st.row.push_back(next_width ? dirichlet_row(rng, next_width) : std::vector<double>{});
          q[a] = st.reward[a];
          for (std::size_t j = 0; j < next_width; ++j) q[a] += st.row[a][j] * v_next[j];
        }
        std::vector<double> sorted = q;
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        if (!spec.min_gap || sorted[0] - sorted[1] >= *spec.min_gap + kOptimalGapTolerance) {
          v_here[i] = sorted[0];
          drawn[h][i] = std::move(st);
          break;
        }
        if (++attempts >= spec.resample_budget) {
          std::ostringstream msg;
          msg << "random MDP: no draw for level " << h + 1 << " state " << i + 1 << " reached min_gap "
              << *spec.min_gap << " within " << spec.resample_budget << " attempts";
          throw std::runtime_error(msg.str());
        }
      }
    }
    v_next = std::move(v_here);
  }

  auto name = [](std::size_t h, std::size_t i) { return "s" + std::to_string(h + 1) + "_" + std::to_string(i + 1); };
  MdpBuilder b(static_cast<int>(H));
  for (std::size_t h = 0; h < H; ++h) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < spec.level_sizes[h]; ++i) names.push_back(name(h, i));
    b.add_level(names, A);
  }
  for (std::size_t h = 0; h < H; ++h) {
    for (std::size_t i = 0; i < spec.level_sizes[h]; ++i) {
      const auto& st = drawn[h][i];
      for (std::size_t a = 0; a < A; ++a) {
        b.set_reward(name(h, i), a, st.reward[a]);
        for (std::size_t j = 0; j < st.row[a].size(); ++j) b.add_transition(name(h, i), a, name(h + 1, j), st.row[a][j]);
      }
    }
  }
  const auto init = dirichlet_row(rng, spec.level_sizes[0]);
  for (std::size_t i = 0; i < init.size(); ++i) b.set_initial(name(0, i), init[i]);
  TabularMdp mdp = b.build();

  if (spec.min_gap) {
    const auto sol = backward_induction(mdp);
    if (sol.gap_min_global < *spec.min_gap || !sol.z_mul.empty())
      throw std::runtime_error("random MDP: solved instance misses min_gap");
  }
  return mdp;
}

double kl_bernoulli(double p, double q) {
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0))
    throw std::invalid_argument("kl_bernoulli needs p and q strictly inside (0, 1)");
  return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

namespace {

std::map<std::string, std::string> parse_params(const std::string& body) {
  std::map<std::string, std::string> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("environment parameter '" + item + "' lacks '='");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

std::string take(std::map<std::string, std::string>& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) throw std::invalid_argument("environment spec is missing '" + key + "'");
  std::string v = it->second;
  params.erase(it);
  return v;
}

double to_double(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw std::invalid_argument("bad number '" + text + "' in environment spec");
  return v;
}

std::uint64_t to_uint(const std::string& text) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || text[0] == '-')
    throw std::invalid_argument("bad integer '" + text + "' in environment spec");
  return v;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, '/')) out.push_back(to_uint(item));
  return out;
}

void reject_leftovers(const std::map<std::string, std::string>& params) {
  if (!params.empty()) throw std::invalid_argument("unknown environment parameter '" + params.begin()->first + "'");
}

}  // namespace

TabularMdp make_environment(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = colon == std::string::npos ? spec : spec.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : spec.substr(colon + 1);

  if (kind == "file") return load_mdp(body);
  if (colon == std::string::npos && spec.size() > 5 && spec.ends_with(".json")) return load_mdp(spec);

  auto params = parse_params(body);
  if (kind == "sj") {
    SjInstanceSpec s;
    s.n = static_cast<int>(to_uint(take(params, "n")));
    s.delta_min = to_double(take(params, "delta_min"));
    reject_leftovers(params);
    return sj_hard_instance(s);
  }
  if (kind == "tree") {
    TreeInstanceSpec t;
    t.num_leaves = to_uint(take(params, "n"));
    t.last_level_actions = to_uint(take(params, "A"));
    t.gamma = to_double(take(params, "gamma"));
    std::optional<std::string> perturb;
    if (params.count("perturb")) perturb = take(params, "perturb");
    if (params.count("leaf_actions")) t.leaf_actions = parse_sizes(take(params, "leaf_actions"));
    reject_leftovers(params);
    auto base = tree_lower_bound_base(t);
    if (!perturb) return base;
    auto ij = parse_sizes(*perturb);
    if (ij.size() != 2) throw std::invalid_argument("perturb expects i/j");
    return tree_lower_bound_perturbed(base, ij[0], ij[1], t.gamma);
  }
  if (kind == "random") {
    RandomMdpSpec r;
    r.level_sizes = parse_sizes(take(params, "levels"));
    r.num_actions = to_uint(take(params, "A"));
    r.seed = to_uint(take(params, "seed"));
    if (params.count("min_gap")) r.min_gap = to_double(take(params, "min_gap"));
    if (params.count("budget")) r.resample_budget = to_uint(take(params, "budget"));
    reject_leftovers(params);
    return random_layered_mdp(r);
  }
  throw std::invalid_argument("unknown environment kind '" + kind + "'");
}

}  // namespace amb
