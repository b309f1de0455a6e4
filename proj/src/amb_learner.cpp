#include "amb/amb_learner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "amb/schedule.hpp"
#include "json.hpp"

namespace amb {

void AmbConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0 / 3.0)) throw std::invalid_argument("delta must lie in (0, 1/3)");
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
  if (num_episodes < 1) throw std::invalid_argument("the episode budget K must be at least 1");
  if (!(bonus_constant > 0.0)) throw std::invalid_argument("bonus constant must be positive");
  if (!(tolerance >= 0.0)) throw std::invalid_argument("tolerance must be nonnegative");
}

std::vector<ActionId> AmbState::admissible_actions(StateId s) const {
  std::vector<ActionId> out;
  for (ActionId a = 0; a < shape.num_actions(s); ++a)
    if (is_admissible(s, a)) out.push_back(a);
  return out;
}

std::size_t AmbState::eliminated_pairs() const {
  std::size_t live = 0;
  for (auto c : admissible_count) live += c;
  return shape.num_pairs() - live;
}

AmbState amb_init(const MdpShape& shape, const AmbConfig& config) {
  config.validate();
  if (config.horizon != shape.horizon) throw std::invalid_argument("config horizon does not match the MDP");
  const std::size_t S = shape.num_states();
  const std::size_t P = shape.num_pairs();
  const double H = static_cast<double>(shape.horizon);
  AmbState st;
  st.shape = shape;
  st.q_upper.assign(P, H);
  st.q_lower.assign(P, 0.0);
  st.v_upper.assign(S + 1, H);
  st.v_lower.assign(S + 1, 0.0);
  st.v_upper[S] = 0.0;
  st.visit_count.assign(P, 0);
  st.admissible.assign(P, 1);
  st.admissible_count.resize(S);
  st.decided.assign(S + 1, 0);
  for (StateId s = 0; s < S; ++s) st.admissible_count[s] = shape.num_actions(s);
  return st;
}

double bonus(std::int64_t n, const AmbConfig& config, std::size_t num_states, std::size_t num_actions) {
  return bonus(n, config.bonus_constant, config.horizon,
               bonus_log_term(num_states, num_actions, config.num_episodes, config.delta));
}

ActionId select_action(const AmbState& st, StateId s) {
  const PairId base = st.shape.pair_offset[s];
  const std::size_t A = st.shape.num_actions(s);
  if (st.decided[s]) {
    for (ActionId a = 0; a < A; ++a)
      if (st.admissible[base + a]) return a;
  }
  ActionId best = A;
  double widest = -1.0;
  for (ActionId a = 0; a < A; ++a) {
    if (!st.admissible[base + a]) continue;
    const double width = st.q_upper[base + a] - st.q_lower[base + a];
    if (width > widest) {
      widest = width;
      best = a;
    }
  }
  if (best == A) throw std::logic_error("state without admissible actions");
  return best;
}

void current_policy(const AmbState& st, DeterministicPolicy& pi) {
  pi.action.resize(st.shape.num_states());
  for (StateId s = 0; s < pi.action.size(); ++s) pi.action[s] = select_action(st, s);
}

SuffixPoint first_undecided_suffix(const Trajectory& traj, int h, std::span<const char> decided, StateId terminal) {
  const int H = traj.horizon();
  if (h < 1 || h > H) throw std::invalid_argument("level out of range");
  for (int next = h + 1; next <= H; ++next) {
    const StateId s = traj.state_at(next);
    if (!decided[s]) return {next, s};
  }
  return {H + 1, terminal};
}

double monte_carlo_return(const Trajectory& traj, int h, int h_end) {
  if (h < 1 || h_end <= h || h_end > traj.horizon() + 1)
    throw std::invalid_argument("return range must satisfy 1 <= h < h_end <= H+1");
  double total = 0.0;
  for (int i = h; i < h_end; ++i) total += traj.steps[static_cast<std::size_t>(i - 1)].reward;
  return total;
}

double amb_upper_target(const Trajectory& traj, int h, std::span<const char> decided,
                        std::span<const double> v_upper, StateId terminal, double bonus_value) {
  const SuffixPoint next = first_undecided_suffix(traj, h, decided, terminal);
  return monte_carlo_return(traj, h, next.level) + v_upper[next.state] + bonus_value;
}

namespace {

void check_trajectory(const AmbState& st, const Trajectory& traj) {
  const auto& shape = st.shape;
  if (traj.horizon() != shape.horizon) throw std::invalid_argument("trajectory length differs from the horizon");
  for (int h = 1; h <= shape.horizon; ++h) {
    const Step& step = traj.steps[static_cast<std::size_t>(h - 1)];
    if (step.state >= shape.num_states() || shape.state_level[step.state] != h)
      throw std::invalid_argument("trajectory state off its level at step " + std::to_string(h));
    if (step.action >= shape.num_actions(step.state))
      throw std::invalid_argument("trajectory action out of range at step " + std::to_string(h));
    if (!st.decided[step.state] && !st.is_admissible(step.state, step.action))
      throw std::invalid_argument("trajectory plays an eliminated action at step " + std::to_string(h));
  }
}

}  // namespace

void update_episode(AmbState& st, const Trajectory& traj, const AmbConfig& config, std::size_t num_states,
                    std::size_t num_actions) {
  check_trajectory(st, traj);
  const int H = st.shape.horizon;
  const double Hd = static_cast<double>(H);
  const StateId terminal = st.shape.terminal();
  const double log_term = bonus_log_term(num_states, num_actions, config.num_episodes, config.delta);

  // Value bounds along the path as of the previous episode, indexed by level 1..H+1.
  std::vector<double> pre_upper(static_cast<std::size_t>(H) + 2, 0.0);
  std::vector<double> pre_lower(static_cast<std::size_t>(H) + 2, 0.0);
  for (int h = 1; h <= H; ++h) {
    pre_upper[static_cast<std::size_t>(h)] = st.v_upper[traj.state_at(h)];
    pre_lower[static_cast<std::size_t>(h)] = st.v_lower[traj.state_at(h)];
  }

  for (int h = H; h >= 1; --h) {
    const Step& step = traj.steps[static_cast<std::size_t>(h - 1)];
    const StateId s = step.state;
    if (st.decided[s]) continue;
    const PairId p = st.shape.pair(s, step.action);
    const std::int64_t n = ++st.visit_count[p];
    const SuffixPoint next = first_undecided_suffix(traj, h, st.decided, terminal);
    const double ret = monte_carlo_return(traj, h, next.level);
    const double alpha = learning_rate(n, H);
    const double b = bonus(n, config.bonus_constant, H, log_term);
    const auto lvl = static_cast<std::size_t>(next.level);
    st.q_upper[p] = interpolate_upper(st.q_upper[p], alpha, ret + pre_upper[lvl] + b, Hd);
    st.q_lower[p] = interpolate_lower(st.q_lower[p], alpha, ret + pre_lower[lvl] - b);

    const PairId base = st.shape.pair_offset[s];
    double vu = 0.0;
    double vl = 0.0;
    for (ActionId a = 0; a < st.shape.num_actions(s); ++a) {
      if (!st.admissible[base + a]) continue;
      vu = std::max(vu, st.q_upper[base + a]);
      vl = std::max(vl, st.q_lower[base + a]);
    }
    st.v_upper[s] = vu;
    st.v_lower[s] = vl;
  }
  ++st.episode_index;
  eliminate(st, config.tolerance);
}

void eliminate(AmbState& st, double tolerance) {
  for (StateId s = 0; s < st.shape.num_states(); ++s) {
    if (st.decided[s]) continue;
    const PairId base = st.shape.pair_offset[s];
    const double floor = st.v_lower[s];
    for (ActionId a = 0; a < st.shape.num_actions(s); ++a) {
      if (st.admissible[base + a] && !(st.q_upper[base + a] + tolerance >= floor)) {
        st.admissible[base + a] = 0;
        --st.admissible_count[s];
      }
    }
    if (st.admissible_count[s] == 0) throw std::logic_error("elimination emptied an admissible set");
    if (st.admissible_count[s] == 1) {
      st.decided[s] = 1;
      ++st.decided_count;
    }
  }
}

std::string amb_snapshot(const AmbState& st, const TabularMdp& mdp) {
  using Json = nlohmann::ordered_json;
  Json doc;
  doc["episode"] = st.episode_index;
  Json states = Json::array();
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    Json entry;
    entry["state"] = mdp.state_names[s];
    entry["decided"] = st.decided[s] != 0;
    entry["admissible"] = st.admissible_actions(s);
    Json qu = Json::array(), ql = Json::array(), n = Json::array();
    for (ActionId a = 0; a < mdp.num_actions(s); ++a) {
      const PairId p = mdp.pair(s, a);
      qu.push_back(st.q_upper[p]);
      ql.push_back(st.q_lower[p]);
      n.push_back(st.visit_count[p]);
    }
    entry["q_upper"] = std::move(qu);
    entry["q_lower"] = std::move(ql);
    entry["v_upper"] = st.v_upper[s];
    entry["v_lower"] = st.v_lower[s];
    entry["visits"] = std::move(n);
    states.push_back(std::move(entry));
  }
  doc["states"] = std::move(states);
  return doc.dump(1) + "\n";
}

AmbLearner::AmbLearner(const MdpShape& shape, const AmbConfig& config)
    : config_(config), state_(amb_init(shape, config)), num_actions_(shape.max_actions()) {}

void AmbLearner::observe(const Trajectory& traj) {
  update_episode(state_, traj, config_, state_.shape.num_states(), num_actions_);
}

}  // namespace amb
