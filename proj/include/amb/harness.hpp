#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amb/mdp.hpp"
#include "amb/solver.hpp"

namespace amb {

enum class Algorithm { amb, ucb };

std::string to_string(Algorithm algo);
Algorithm parse_algorithm(const std::string& name);

/// Which episodes end up in a RegretSeries.
enum class RecordMode {
  all,  // every episode
  log,  // every episode up to 10^4, then ~100 per decade plus powers of two and K
};

std::string to_string(RecordMode mode);
RecordMode parse_record_mode(const std::string& name);

struct ExperimentConfig {
  std::string env;
  Algorithm algorithm = Algorithm::amb;
  std::int64_t episodes = 1000;
  double delta = 0.1;
  double bonus_constant = 1.0;
  std::vector<std::uint64_t> seeds{0};
  RecordMode record = RecordMode::log;
  std::string out;             // series CSV; empty means none
  std::string summary_out;     // aggregated CSV; empty means none
  bool audit_bounds = false;   // track Q* containment and optimal-action survival
  bool check_invariants = true;
  unsigned threads = 0;        // 0 = hardware concurrency

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  /// FNV-1a of the fields that determine a cell's output (seed excluded).
  std::uint64_t hash() const;
};

/// Parses the key-value config document. Unknown keys are rejected.
///
///   {"env": "sj:n=8,delta_min=0.1", "algo": "amb", "episodes": 50000,
///    "delta": 0.1, "bonus_c": 1.0, "seeds": [1, 2] or {"count": 20, "base": 0},
///    "record": "log", "out": "run.csv", "summary_out": "summary.csv",
///    "audit_bounds": false, "threads": 0}
ExperimentConfig config_from_text(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});
std::string config_to_text(const ExperimentConfig& config);

/// Sorted list of the episodes recorded for budget K.
std::vector<std::int64_t> recorded_episodes(std::int64_t num_episodes, RecordMode mode);

struct RegretPoint {
  std::int64_t episode = 0;
  double inst_regret = 0.0;
  double cum_regret = 0.0;
  std::size_t decided_count = 0;     // |G_k| for the policy of episode k
  std::size_t eliminated_pairs = 0;
};

struct CellDiagnostics {
  std::size_t invariant_violations = 0;
  std::vector<std::string> invariant_messages;
  std::optional<std::int64_t> first_bound_violation;
  std::optional<std::int64_t> first_optimal_elimination;
};

struct RegretSeries {
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::int64_t num_episodes = 0;
  double wall_seconds = 0.0;  // informational, never exported
  std::vector<RegretPoint> points;
  CellDiagnostics diagnostics;

  double final_cum_regret() const { return points.empty() ? 0.0 : points.back().cum_regret; }
  /// Cumulative regret at a recorded episode; throws if k was not recorded.
  double cum_regret_at(std::int64_t k) const;
};

/// v0_star - V^pi_0, with rounding noise below 1e-9 clamped to 0.
double regret_of_policy(const ExactSolution& solution, const TabularMdp& mdp, const DeterministicPolicy& pi);

RegretSeries run_cell(const ExperimentConfig& config, std::uint64_t seed);
/// Same, reusing an MDP and solution built by the caller.
RegretSeries run_cell(const ExperimentConfig& config, const TabularMdp& mdp, const ExactSolution& solution,
                      std::uint64_t seed);

/// Every seed of `config`, on a worker pool; results are ordered by seed.
std::vector<RegretSeries> run_cells(const ExperimentConfig& config);

struct SummaryRow {
  std::int64_t episode = 0;
  double mean = 0.0;
  double median = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
};

struct RegretSummary {
  std::size_t runs = 0;
  std::int64_t num_episodes = 0;
  std::vector<SummaryRow> rows;

  const SummaryRow& at(std::int64_t episode) const;
  const SummaryRow& last() const { return rows.back(); }
};

/// Pointwise statistics of cumulative regret. The series must share K and
/// the recorded episodes; input order does not matter.
RegretSummary aggregate(std::span<const RegretSeries> series);

/// Linear-interpolated quantile of an unsorted sample, q in [0, 1].
double quantile(std::vector<double> values, double q);

struct FitWindow {
  std::int64_t first_episode = 1;
  std::int64_t last_episode = std::numeric_limits<std::int64_t>::max();
};

/// Relative residuals above this mark a curve that is not logarithmic.
inline constexpr double kLogFitThreshold = 0.02;

struct LogFit {
  double slope = 0.0;       // a in a*ln(k) + b
  double intercept = 0.0;   // b
  double rms_residual = 0.0;
  double relative_residual = 0.0;  // rms / (max - min of the fitted values), 0 for flat input
  std::size_t points = 0;
  bool log_like = true;
};

/// Least squares of cum_regret against ln(k) over the window. Needs at least
/// 10 points with two distinct episodes.
LogFit fit_log_regret(std::span<const std::int64_t> episodes, std::span<const double> values, FitWindow window = {});
LogFit fit_log_regret(const RegretSeries& series, FitWindow window = {});
LogFit fit_log_regret(const RegretSummary& summary, FitWindow window = {});

}  // namespace amb
