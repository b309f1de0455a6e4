#include "amb/audit.hpp"

#include <algorithm>
#include <cmath>

namespace amb {

namespace {
constexpr std::size_t kKeptMessages = 8;
}

void InvariantLog::fail(std::int64_t episode, const std::string& what) {
  ++count_;
  if (messages_.size() < kKeptMessages) messages_.push_back("episode " + std::to_string(episode) + ": " + what);
}

AmbInvariantMonitor::AmbInvariantMonitor(const AmbState& initial) : prev_(initial) {}

void AmbInvariantMonitor::check(const AmbState& st) {
  const auto& shape = st.shape;
  const double H = static_cast<double>(shape.horizon);
  const std::int64_t k = st.episode_index;
  for (StateId s = 0; s < shape.num_states(); ++s) {
    for (ActionId a = 0; a < shape.num_actions(s); ++a) {
      const PairId p = shape.pair(s, a);
      if (!(0.0 <= st.q_lower[p] && st.q_lower[p] <= st.q_upper[p] && st.q_upper[p] <= H))
        log_.fail(k, "sandwich broken at pair " + std::to_string(p));
      if (st.admissible[p] && !prev_.admissible[p]) log_.fail(k, "admissible set grew at pair " + std::to_string(p));
      if (prev_.decided[s] && (st.q_upper[p] != prev_.q_upper[p] || st.q_lower[p] != prev_.q_lower[p]))
        log_.fail(k, "bounds of decided state " + std::to_string(s) + " changed");
    }
    if (prev_.decided[s] && !st.decided[s]) log_.fail(k, "state " + std::to_string(s) + " left the decided set");
    if (st.admissible_count[s] == 0) log_.fail(k, "empty admissible set at state " + std::to_string(s));
    if ((st.admissible_count[s] == 1) != (st.decided[s] != 0))
      log_.fail(k, "decided flag out of sync at state " + std::to_string(s));
  }
  if (st.decided_count < prev_.decided_count) log_.fail(k, "decided count shrank");
  if (st.v_upper.back() != 0.0 || st.v_lower.back() != 0.0) log_.fail(k, "termination state value moved");
  prev_.q_upper = st.q_upper;
  prev_.q_lower = st.q_lower;
  prev_.admissible = st.admissible;
  prev_.decided = st.decided;
  prev_.decided_count = st.decided_count;
}

void UcbInvariantMonitor::check(const UcbState& st) {
  const auto& shape = st.shape;
  const double H = static_cast<double>(shape.horizon);
  const std::int64_t k = st.episode_index;
  for (StateId s = 0; s < shape.num_states(); ++s) {
    bool visited = false;
    double best = 0.0;
    for (ActionId a = 0; a < shape.num_actions(s); ++a) {
      const PairId p = shape.pair(s, a);
      if (!(st.q_upper[p] >= 0.0 && st.q_upper[p] <= H)) log_.fail(k, "q_upper out of [0,H] at pair " + std::to_string(p));
      visited = visited || st.visit_count[p] != prev_visits_[p];
      best = std::max(best, st.q_upper[p]);
    }
    if (visited && st.v_upper[s] != std::min(H, best)) log_.fail(k, "v_upper stale at state " + std::to_string(s));
  }
  prev_visits_ = st.visit_count;
}

AmbBoundAudit::AmbBoundAudit(const TabularMdp& mdp, const ExactSolution& solution)
    : mdp_(&mdp), solution_(&solution) {}

void AmbBoundAudit::before(const AmbState& st) {
  admissible_ = st.admissible;
  decided_ = st.decided;
}

void AmbBoundAudit::after(const AmbState& st) {
  const TabularMdp& mdp = *mdp_;
  const ExactSolution& sol = *solution_;
  const std::int64_t k = st.episode_index;
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    for (ActionId a = 0; a < mdp.num_actions(s); ++a) {
      const PairId p = mdp.pair(s, a);
      if (!optimal_elimination_ && sol.is_optimal(p) && !st.admissible[p]) optimal_elimination_ = k;
      if (bound_violation_ || decided_[s] || !admissible_[p]) continue;
      if (st.q_lower[p] > sol.q_star[p] || st.q_upper[p] < sol.q_star[p]) bound_violation_ = k;
    }
    if (!bound_violation_ && !decided_[s] && (st.v_lower[s] > sol.v_star[s] || st.v_upper[s] < sol.v_star[s]))
      bound_violation_ = k;
  }
}

void UcbBoundAudit::after(const UcbState& st) {
  if (bound_violation_) return;
  const TabularMdp& mdp = *mdp_;
  const ExactSolution& sol = *solution_;
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    if (st.v_upper[s] < sol.v_star[s]) bound_violation_ = st.episode_index;
    for (ActionId a = 0; a < mdp.num_actions(s); ++a)
      if (st.q_upper[mdp.pair(s, a)] < sol.q_star[mdp.pair(s, a)]) bound_violation_ = st.episode_index;
  }
}

}  // namespace amb
