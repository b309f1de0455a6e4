#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "amb/amb_learner.hpp"
#include "amb/solver.hpp"
#include "amb/ucb_learner.hpp"

namespace amb {

/// Collects violations of the deterministic invariants a learner must keep
/// on every run: bound ordering, monotone elimination, frozen decided states.
class InvariantLog {
 public:
  void fail(std::int64_t episode, const std::string& what);
  std::size_t count() const { return count_; }
  /// The first few messages; later ones are only counted.
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::size_t count_ = 0;
  std::vector<std::string> messages_;
};

class AmbInvariantMonitor {
 public:
  explicit AmbInvariantMonitor(const AmbState& initial);

  /// Compares `state` against the previous call and checks the sandwich
  /// 0 <= q_lower <= q_upper <= H.
  void check(const AmbState& state);
  const InvariantLog& log() const { return log_; }

 private:
  AmbState prev_;
  InvariantLog log_;
};

class UcbInvariantMonitor {
 public:
  explicit UcbInvariantMonitor(const UcbState& initial) : prev_visits_(initial.visit_count) {}

  /// q_upper in [0, H] everywhere; v_upper = min{H, max_a q_upper} at states
  /// updated since the previous call.
  void check(const UcbState& state);
  const InvariantLog& log() const { return log_; }

 private:
  std::vector<std::int64_t> prev_visits_;
  InvariantLog log_;
};

/// Tracks whether the confidence bounds contain the true values and whether
/// an optimal action was ever eliminated.
///
/// Call `before` with the state that selects episode k's policy and `after`
/// once it has been updated; bounds are checked on the pairs that were
/// undecided and admissible at the start of the episode.
class AmbBoundAudit {
 public:
  AmbBoundAudit(const TabularMdp& mdp, const ExactSolution& solution);

  void before(const AmbState& state);
  void after(const AmbState& state);

  std::optional<std::int64_t> first_bound_violation() const { return bound_violation_; }
  std::optional<std::int64_t> first_optimal_elimination() const { return optimal_elimination_; }

 private:
  const TabularMdp* mdp_;
  const ExactSolution* solution_;
  std::vector<char> admissible_;
  std::vector<char> decided_;
  std::optional<std::int64_t> bound_violation_;
  std::optional<std::int64_t> optimal_elimination_;
};

/// Upper-bound validity (q_upper >= Q*, v_upper >= V*) for the baseline.
class UcbBoundAudit {
 public:
  UcbBoundAudit(const TabularMdp& mdp, const ExactSolution& solution) : mdp_(&mdp), solution_(&solution) {}

  void after(const UcbState& state);
  std::optional<std::int64_t> first_bound_violation() const { return bound_violation_; }

 private:
  const TabularMdp* mdp_;
  const ExactSolution* solution_;
  std::optional<std::int64_t> bound_violation_;
};

}  // namespace amb
