#include "amb/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <type_traits>

#include "amb/amb_learner.hpp"
#include "amb/audit.hpp"
#include "amb/environments.hpp"
#include "amb/sampling.hpp"
#include "amb/ucb_learner.hpp"
#include "json.hpp"

namespace amb {

using Json = nlohmann::ordered_json;

std::string to_string(Algorithm algo) { return algo == Algorithm::amb ? "amb" : "ucb"; }

Algorithm parse_algorithm(const std::string& name) {
  if (name == "amb") return Algorithm::amb;
  if (name == "ucb") return Algorithm::ucb;
  throw std::invalid_argument("unknown algorithm '" + name + "' (expected amb or ucb)");
}

std::string to_string(RecordMode mode) { return mode == RecordMode::all ? "all" : "log"; }

RecordMode parse_record_mode(const std::string& name) {
  if (name == "all") return RecordMode::all;
  if (name == "log") return RecordMode::log;
  throw std::invalid_argument("unknown record mode '" + name + "' (expected all or log)");
}

void ExperimentConfig::validate() const {
  if (env.empty()) throw std::invalid_argument("env: no environment given");
  if (episodes < 1) throw std::invalid_argument("episodes: K must be at least 1");
  if (seeds.empty()) throw std::invalid_argument("seeds: at least one seed is required");
  if (algorithm == Algorithm::amb && !(delta > 0.0 && delta < 1.0 / 3.0))
    throw std::invalid_argument("delta: must lie in (0, 1/3) for amb");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta: must lie in (0, 1)");
  if (!(bonus_constant > 0.0) || !std::isfinite(bonus_constant))
    throw std::invalid_argument("bonus_c: must be positive");
  auto sorted = seeds;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("seeds: duplicate seed");
}

namespace {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t ExperimentConfig::hash() const {
  Json doc;
  doc["env"] = env;
  doc["algo"] = to_string(algorithm);
  doc["episodes"] = episodes;
  doc["delta"] = delta;
  doc["bonus_c"] = bonus_constant;
  doc["record"] = to_string(record);
  return fnv1a(doc.dump());
}

ExperimentConfig config_from_text(const std::string& text, ExperimentConfig cfg) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    const Json& v = it.value();
    try {
      if (key == "env") cfg.env = v.get<std::string>();
      else if (key == "algo") cfg.algorithm = parse_algorithm(v.get<std::string>());
      else if (key == "episodes") cfg.episodes = v.get<std::int64_t>();
      else if (key == "delta") cfg.delta = v.get<double>();
      else if (key == "bonus_c") cfg.bonus_constant = v.get<double>();
      else if (key == "record") cfg.record = parse_record_mode(v.get<std::string>());
      else if (key == "out") cfg.out = v.get<std::string>();
      else if (key == "summary_out") cfg.summary_out = v.get<std::string>();
      else if (key == "audit_bounds") cfg.audit_bounds = v.get<bool>();
      else if (key == "check_invariants") cfg.check_invariants = v.get<bool>();
      else if (key == "threads") cfg.threads = v.get<unsigned>();
      else if (key == "seeds") {
        cfg.seeds.clear();
        if (v.is_array()) {
          for (const auto& s : v) cfg.seeds.push_back(s.get<std::uint64_t>());
        } else if (v.is_object()) {
          const auto count = v.at("count").get<std::uint64_t>();
          const auto base = v.value("base", std::uint64_t{0});
          for (std::uint64_t i = 0; i < count; ++i) cfg.seeds.push_back(base + i);
        } else {
          throw std::invalid_argument("expected a list or {count, base}");
        }
      } else {
        throw std::invalid_argument("unknown key");
      }
    } catch (const Json::exception& e) {
      throw std::invalid_argument("config key '" + key + "': " + e.what());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config key '" + key + "': " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return config_from_text(text.str(), std::move(base));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

std::string config_to_text(const ExperimentConfig& cfg) {
  Json doc;
  doc["env"] = cfg.env;
  doc["algo"] = to_string(cfg.algorithm);
  doc["episodes"] = cfg.episodes;
  doc["delta"] = cfg.delta;
  doc["bonus_c"] = cfg.bonus_constant;
  doc["seeds"] = cfg.seeds;
  doc["record"] = to_string(cfg.record);
  doc["out"] = cfg.out;
  doc["summary_out"] = cfg.summary_out;
  doc["audit_bounds"] = cfg.audit_bounds;
  doc["check_invariants"] = cfg.check_invariants;
  doc["threads"] = cfg.threads;
  return doc.dump(2) + "\n";
}

std::vector<std::int64_t> recorded_episodes(std::int64_t K, RecordMode mode) {
  if (K < 1) throw std::invalid_argument("episode budget must be at least 1");
  constexpr std::int64_t kDense = 10000;
  constexpr int kPerDecade = 100;
  std::vector<std::int64_t> out;
  const std::int64_t dense = mode == RecordMode::all ? K : std::min(K, kDense);
  for (std::int64_t k = 1; k <= dense; ++k) out.push_back(k);
  if (dense == K) return out;
  for (int j = 1;; ++j) {
    const auto k = static_cast<std::int64_t>(std::floor(std::pow(10.0, 4.0 + j / static_cast<double>(kPerDecade))));
    if (k >= K) break;
    out.push_back(k);
  }
  for (std::int64_t k = 1; k < K; k *= 2)
    if (k > dense) out.push_back(k);
  out.push_back(K);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double RegretSeries::cum_regret_at(std::int64_t k) const {
  auto it = std::lower_bound(points.begin(), points.end(), k,
                             [](const RegretPoint& p, std::int64_t e) { return p.episode < e; });
  if (it == points.end() || it->episode != k)
    throw std::out_of_range("episode " + std::to_string(k) + " was not recorded");
  return it->cum_regret;
}

namespace {

constexpr double kRegretRounding = 1e-9;

double clamp_rounding(double regret) {
  if (regret < -kRegretRounding)
    throw std::logic_error("policy value exceeds the optimum by " + std::to_string(-regret));
  return regret < 0.0 ? 0.0 : regret;
}

template <class Learner>
RegretSeries run_learner(const ExperimentConfig& cfg, const TabularMdp& mdp, const ExactSolution& sol,
                         std::uint64_t seed) {
  constexpr bool kIsAmb = std::is_same_v<Learner, AmbLearner>;
  const auto start = std::chrono::steady_clock::now();
  AmbConfig lc;
  lc.delta = cfg.delta;
  lc.horizon = mdp.horizon;
  lc.num_episodes = cfg.episodes;
  lc.bonus_constant = cfg.bonus_constant;
  Learner learner(MdpShape::of(mdp), lc);

  using Monitor = std::conditional_t<kIsAmb, AmbInvariantMonitor, UcbInvariantMonitor>;
  using Audit = std::conditional_t<kIsAmb, AmbBoundAudit, UcbBoundAudit>;
  std::optional<Monitor> monitor;
  std::optional<Audit> audit;
  if (cfg.check_invariants) monitor.emplace(learner.state());
  if (cfg.audit_bounds) audit.emplace(mdp, sol);

  RegretSeries series;
  series.seed = seed;
  series.config_hash = cfg.hash();
  series.num_episodes = cfg.episodes;
  const auto record = recorded_episodes(cfg.episodes, cfg.record);
  series.points.reserve(record.size());
  auto next_record = record.begin();

  EpisodeSampler sampler(mdp);
  PolicyEvaluator evaluator(mdp);
  EpisodeStreams streams(seed);
  DeterministicPolicy pi, last_pi;
  Trajectory traj;
  double inst = 0.0;
  double cum = 0.0;
  for (std::int64_t k = 1; k <= cfg.episodes; ++k) {
    learner.policy(pi);
    // Policies stabilise quickly, so re-evaluate only when one changes.
    if (k == 1 || pi.action != last_pi.action) {
      inst = clamp_rounding(sol.v0_star - evaluator.evaluate(pi));
      last_pi.action = pi.action;
    }
    cum += inst;
    const std::size_t decided = learner.decided_count();
    const std::size_t eliminated = learner.eliminated_pairs();

    sampler.sample(pi, streams, traj);
    traj.episode_index = k;
    if constexpr (kIsAmb) {
      if (audit) audit->before(learner.state());
    }
    learner.observe(traj);
    if (monitor) monitor->check(learner.state());
    if (audit) audit->after(learner.state());

    if (next_record != record.end() && *next_record == k) {
      series.points.push_back({k, inst, cum, decided, eliminated});
      ++next_record;
    }
  }

  if (monitor) {
    series.diagnostics.invariant_violations = monitor->log().count();
    series.diagnostics.invariant_messages = monitor->log().messages();
  }
  if (audit) {
    series.diagnostics.first_bound_violation = audit->first_bound_violation();
    if constexpr (kIsAmb) series.diagnostics.first_optimal_elimination = audit->first_optimal_elimination();
  }
  series.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return series;
}

}  // namespace

double regret_of_policy(const ExactSolution& solution, const TabularMdp& mdp, const DeterministicPolicy& pi) {
  return clamp_rounding(solution.v0_star - policy_value(mdp, pi));
}

RegretSeries run_cell(const ExperimentConfig& config, const TabularMdp& mdp, const ExactSolution& solution,
                      std::uint64_t seed) {
  config.validate();
  if (config.algorithm == Algorithm::amb) return run_learner<AmbLearner>(config, mdp, solution, seed);
  return run_learner<UcbLearner>(config, mdp, solution, seed);
}

RegretSeries run_cell(const ExperimentConfig& config, std::uint64_t seed) {
  config.validate();
  const TabularMdp mdp = make_environment(config.env);
  require_valid(mdp);
  const ExactSolution solution = backward_induction(mdp);
  return run_cell(config, mdp, solution, seed);
}

std::vector<RegretSeries> run_cells(const ExperimentConfig& config) {
  config.validate();
  const TabularMdp mdp = make_environment(config.env);
  require_valid(mdp);
  const ExactSolution solution = backward_induction(mdp);

  auto seeds = config.seeds;
  std::sort(seeds.begin(), seeds.end());
  std::vector<RegretSeries> out(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < seeds.size();) {
      try {
        out[i] = run_cell(config, mdp, solution, seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, seeds.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

const SummaryRow& RegretSummary::at(std::int64_t episode) const {
  auto it = std::lower_bound(rows.begin(), rows.end(), episode,
                             [](const SummaryRow& r, std::int64_t e) { return r.episode < e; });
  if (it == rows.end() || it->episode != episode)
    throw std::out_of_range("episode " + std::to_string(episode) + " not in summary");
  return *it;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return frac == 0.0 ? values[lo] : values[lo] + frac * (values[hi] - values[lo]);
}

RegretSummary aggregate(std::span<const RegretSeries> series) {
  if (series.empty()) throw std::invalid_argument("nothing to aggregate");
  const auto& ref = series.front();
  for (const auto& s : series) {
    if (s.num_episodes != ref.num_episodes || s.points.size() != ref.points.size())
      throw std::invalid_argument("series have different episode budgets or recording strides");
    for (std::size_t i = 0; i < s.points.size(); ++i)
      if (s.points[i].episode != ref.points[i].episode)
        throw std::invalid_argument("series have different recording strides");
  }
  RegretSummary summary;
  summary.runs = series.size();
  summary.num_episodes = ref.num_episodes;
  std::vector<double> column(series.size());
  for (std::size_t i = 0; i < ref.points.size(); ++i) {
    for (std::size_t j = 0; j < series.size(); ++j) column[j] = series[j].points[i].cum_regret;
    // Sorting first makes the mean independent of input order.
    std::sort(column.begin(), column.end());
    double total = 0.0;
    for (double v : column) total += v;
    summary.rows.push_back({ref.points[i].episode, total / static_cast<double>(column.size()),
                            quantile(column, 0.5), quantile(column, 0.1), quantile(column, 0.9)});
  }
  return summary;
}

LogFit fit_log_regret(std::span<const std::int64_t> episodes, std::span<const double> values, FitWindow window) {
  if (episodes.size() != values.size()) throw std::invalid_argument("episode and value counts differ");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    if (episodes[i] < window.first_episode || episodes[i] > window.last_episode) continue;
    if (episodes[i] < 1) throw std::invalid_argument("episodes must be positive");
    xs.push_back(std::log(static_cast<double>(episodes[i])));
    ys.push_back(values[i]);
  }
  if (xs.size() < 10) throw std::invalid_argument("fit window holds fewer than 10 points");
  if (std::ranges::min(xs) == std::ranges::max(xs)) throw std::invalid_argument("fit window covers a single episode");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit window covers a single episode");
  LogFit fit;
  fit.points = xs.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
    sse += r * r;
  }
  fit.rms_residual = std::sqrt(sse / n);
  const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
  const double range = *hi - *lo;
  fit.relative_residual = range > 0.0 ? fit.rms_residual / range : 0.0;
  fit.log_like = fit.relative_residual <= kLogFitThreshold;
  return fit;
}

LogFit fit_log_regret(const RegretSeries& series, FitWindow window) {
  std::vector<std::int64_t> ks;
  std::vector<double> ys;
  for (const auto& p : series.points) {
    ks.push_back(p.episode);
    ys.push_back(p.cum_regret);
  }
  return fit_log_regret(ks, ys, window);
}

LogFit fit_log_regret(const RegretSummary& summary, FitWindow window) {
  std::vector<std::int64_t> ks;
  std::vector<double> ys;
  for (const auto& r : summary.rows) {
    ks.push_back(r.episode);
    ys.push_back(r.mean);
  }
  return fit_log_regret(ks, ys, window);
}

}  // namespace amb
