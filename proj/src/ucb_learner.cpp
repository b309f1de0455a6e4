#include "amb/ucb_learner.hpp"

#include <algorithm>
#include <stdexcept>

#include "amb/schedule.hpp"

namespace amb {

UcbState ucb_init(const MdpShape& shape, const AmbConfig& config) {
  if (config.horizon != shape.horizon) throw std::invalid_argument("config horizon does not match the MDP");
  if (config.num_episodes < 1) throw std::invalid_argument("the episode budget K must be at least 1");
  if (!(config.delta > 0.0 && config.delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  const double H = static_cast<double>(shape.horizon);
  UcbState st;
  st.shape = shape;
  st.q_upper.assign(shape.num_pairs(), H);
  st.v_upper.assign(shape.num_states() + 1, H);
  st.v_upper.back() = 0.0;
  st.visit_count.assign(shape.num_pairs(), 0);
  return st;
}

ActionId ucb_select_action(const UcbState& st, StateId s) {
  const PairId base = st.shape.pair_offset[s];
  ActionId best = 0;
  for (ActionId a = 1; a < st.shape.num_actions(s); ++a)
    if (st.q_upper[base + a] > st.q_upper[base + best]) best = a;
  return best;
}

double ucb_upper_target(const Trajectory& traj, int h, std::span<const double> v_upper, StateId terminal,
                        double bonus_value) {
  const StateId next = h < traj.horizon() ? traj.state_at(h + 1) : terminal;
  return traj.steps[static_cast<std::size_t>(h - 1)].reward + v_upper[next] + bonus_value;
}

void ucb_update_episode(UcbState& st, const Trajectory& traj, const AmbConfig& config, std::size_t num_states,
                        std::size_t num_actions) {
  const int H = st.shape.horizon;
  if (traj.horizon() != H) throw std::invalid_argument("trajectory length differs from the horizon");
  for (const auto& step : traj.steps)
    if (step.state >= st.shape.num_states() || step.action >= st.shape.num_actions(step.state))
      throw std::invalid_argument("trajectory does not fit the MDP shape");

  const double Hd = static_cast<double>(H);
  const double log_term = bonus_log_term(num_states, num_actions, config.num_episodes, config.delta);
  // Successor bounds as of the previous episode.
  std::vector<double> pre(static_cast<std::size_t>(H) + 1, 0.0);
  for (int h = 2; h <= H; ++h) pre[static_cast<std::size_t>(h - 1)] = st.v_upper[traj.state_at(h)];

  for (int h = H; h >= 1; --h) {
    const Step& step = traj.steps[static_cast<std::size_t>(h - 1)];
    const PairId p = st.shape.pair(step.state, step.action);
    const std::int64_t n = ++st.visit_count[p];
    const double alpha = learning_rate(n, H);
    const double b = bonus(n, config.bonus_constant, H, log_term);
    const double target = step.reward + pre[static_cast<std::size_t>(h)] + b;
    st.q_upper[p] = interpolate_upper(st.q_upper[p], alpha, target, Hd);

    const PairId base = st.shape.pair_offset[step.state];
    double best = 0.0;
    for (ActionId a = 0; a < st.shape.num_actions(step.state); ++a) best = std::max(best, st.q_upper[base + a]);
    st.v_upper[step.state] = std::min(Hd, best);
  }
  ++st.episode_index;
}

UcbLearner::UcbLearner(const MdpShape& shape, const AmbConfig& config)
    : config_(config), state_(ucb_init(shape, config)), num_actions_(shape.max_actions()) {}

void UcbLearner::policy(DeterministicPolicy& pi) const {
  pi.action.resize(state_.shape.num_states());
  for (StateId s = 0; s < pi.action.size(); ++s) pi.action[s] = ucb_select_action(state_, s);
}

void UcbLearner::observe(const Trajectory& traj) {
  ucb_update_episode(state_, traj, config_, state_.shape.num_states(), num_actions_);
}

}  // namespace amb
