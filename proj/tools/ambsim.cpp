// Command-line front end: instance generation, exact solving, learning runs
// and the invariant self-check.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "amb/amb_learner.hpp"
#include "amb/environments.hpp"
#include "amb/export.hpp"
#include "amb/harness.hpp"
#include "amb/mdp_io.hpp"
#include "amb/schedule.hpp"
#include "amb/solver.hpp"
#include "json.hpp"

namespace {

using Json = nlohmann::ordered_json;

struct RunFlags {
  std::string config_path;
  std::optional<std::string> env;
  std::optional<std::string> algo;
  std::optional<std::int64_t> episodes;
  std::optional<double> delta;
  std::optional<double> bonus_c;
  std::vector<std::uint64_t> seeds;
  std::optional<std::uint64_t> num_seeds;
  std::uint64_t base_seed = 0;
  std::optional<std::string> record;
  std::optional<std::string> out;
  std::optional<std::string> summary_out;
  std::optional<unsigned> threads;
  bool audit = false;
  bool json = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool with_algo) {
  cmd->add_option("--config", f.config_path, "JSON config file; flags override its values");
  cmd->add_option("--env", f.env, "instance spec, e.g. sj:n=8,delta_min=0.1");
  if (with_algo) cmd->add_option("--algo", f.algo, "amb or ucb");
  cmd->add_option("--episodes,-K", f.episodes, "episode budget K");
  cmd->add_option("--delta", f.delta, "failure probability");
  cmd->add_option("--bonus-c", f.bonus_c, "bonus constant c");
  cmd->add_option("--seeds", f.seeds, "explicit seed list")->delimiter(',');
  cmd->add_option("--num-seeds", f.num_seeds, "use seeds base..base+N-1");
  cmd->add_option("--base-seed", f.base_seed, "first seed for --num-seeds");
  cmd->add_option("--record", f.record, "all or log");
  cmd->add_option("--out", f.out, "output CSV");
  cmd->add_option("--summary-out", f.summary_out, "aggregated CSV");
  cmd->add_option("--threads", f.threads, "worker threads (0 = all cores)");
  cmd->add_flag("--audit", f.audit, "track confidence-bound validity against Q*");
  cmd->add_flag("--json", f.json, "write the series as JSON instead of CSV");
}

amb::ExperimentConfig resolve_config(const RunFlags& f) {
  amb::ExperimentConfig cfg;
  if (!f.config_path.empty()) cfg = amb::load_config(f.config_path);
  if (f.env) cfg.env = *f.env;
  if (f.algo) cfg.algorithm = amb::parse_algorithm(*f.algo);
  if (f.episodes) cfg.episodes = *f.episodes;
  if (f.delta) cfg.delta = *f.delta;
  if (f.bonus_c) cfg.bonus_constant = *f.bonus_c;
  if (!f.seeds.empty() && f.num_seeds) throw std::invalid_argument("--seeds and --num-seeds are exclusive");
  if (!f.seeds.empty()) cfg.seeds = f.seeds;
  if (f.num_seeds) {
    cfg.seeds.clear();
    for (std::uint64_t i = 0; i < *f.num_seeds; ++i) cfg.seeds.push_back(f.base_seed + i);
  }
  if (f.record) cfg.record = amb::parse_record_mode(*f.record);
  if (f.out) cfg.out = *f.out;
  if (f.summary_out) cfg.summary_out = *f.summary_out;
  if (f.threads) cfg.threads = *f.threads;
  if (f.audit) cfg.audit_bounds = true;
  cfg.validate();
  return cfg;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json diagnostics_json(const std::vector<amb::RegretSeries>& runs) {
  std::size_t violations = 0, bound_runs = 0, elim_runs = 0;
  for (const auto& r : runs) {
    violations += r.diagnostics.invariant_violations;
    bound_runs += r.diagnostics.first_bound_violation.has_value();
    elim_runs += r.diagnostics.first_optimal_elimination.has_value();
  }
  return {{"invariant_violations", violations},
          {"runs_with_bound_violation", bound_runs},
          {"runs_with_optimal_elimination", elim_runs}};
}

int cmd_gen(const std::string& env, const std::string& out) {
  const auto mdp = amb::make_environment(env);
  amb::require_valid(mdp);
  if (out.empty())
    std::cout << amb::mdp_to_text(mdp);
  else
    amb::save_mdp(mdp, out);
  return 0;
}

int cmd_solve(const std::string& env) {
  const auto mdp = amb::make_environment(env);
  amb::require_valid(mdp);
  const auto sol = amb::backward_induction(mdp);
  Json doc;
  doc["v0_star"] = sol.v0_star;
  doc["gap_min"] = std::isinf(sol.gap_min_global) ? Json("inf") : Json(sol.gap_min_global);
  doc["z_opt"] = sol.z_opt.size();
  doc["z_mul"] = sol.z_mul.size();
  Json states = Json::array();
  for (amb::StateId s = 0; s < mdp.num_states(); ++s) {
    Json gaps = Json::array();
    for (amb::ActionId a = 0; a < mdp.num_actions(s); ++a) gaps.push_back(sol.gap[mdp.pair(s, a)]);
    states.push_back({{"state", mdp.state_names[s]}, {"level", mdp.state_level[s]}, {"v_star", sol.v_star[s]},
                      {"gaps", std::move(gaps)}});
  }
  doc["states"] = std::move(states);
  std::cout << doc.dump(2) << '\n';
  return 0;
}

int cmd_run(const RunFlags& flags) {
  const auto cfg = resolve_config(flags);
  const auto runs = amb::run_cells(cfg);
  const std::string text = flags.json ? amb::series_to_json(runs) : amb::series_to_csv(runs);
  if (cfg.out.empty())
    std::cout << text;
  else
    amb::write_text(cfg.out, text);
  const auto summary = amb::aggregate(runs);
  if (!cfg.summary_out.empty()) amb::write_text(cfg.summary_out, amb::summary_to_csv(summary));
  if (!cfg.out.empty()) {
    Json report = {{"algo", amb::to_string(cfg.algorithm)},
                   {"episodes", cfg.episodes},
                   {"runs", runs.size()},
                   {"mean_cum_regret", summary.last().mean}};
    report.update(diagnostics_json(runs));
    std::cout << report.dump() << '\n';
  }
  return 0;
}

int cmd_compare(const RunFlags& flags) {
  auto cfg = resolve_config(flags);
  cfg.algorithm = amb::Algorithm::amb;
  const auto amb_runs = amb::run_cells(cfg);
  cfg.algorithm = amb::Algorithm::ucb;
  const auto ucb_runs = amb::run_cells(cfg);
  const auto a = amb::aggregate(amb_runs);
  const auto u = amb::aggregate(ucb_runs);

  std::string table = "episode,runs,amb_mean,amb_median,ucb_mean,ucb_median,ratio\n";
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& ra = a.rows[i];
    const auto& ru = u.rows[i];
    const double ratio = ru.mean > 0.0 ? ra.mean / ru.mean : std::nan("");
    table += std::to_string(ra.episode) + "," + std::to_string(a.runs) + "," + fmt(ra.mean) + "," + fmt(ra.median) +
             "," + fmt(ru.mean) + "," + fmt(ru.median) + "," + fmt(ratio) + "\n";
  }
  if (!cfg.out.empty()) amb::write_text(cfg.out, table);
  Json report = {{"episodes", cfg.episodes},
                 {"runs", a.runs},
                 {"amb_mean_cum_regret", a.last().mean},
                 {"ucb_mean_cum_regret", u.last().mean},
                 {"ratio", u.last().mean > 0.0 ? Json(a.last().mean / u.last().mean) : Json(nullptr)},
                 {"amb", diagnostics_json(amb_runs)},
                 {"ucb", diagnostics_json(ucb_runs)}};
  std::cout << (cfg.out.empty() ? table : "") << report.dump() << '\n';
  return 0;
}

// Short runs on every instance family with the invariant monitors switched
// on, plus the step-size identities.
int cmd_check(std::int64_t episodes) {
  const std::vector<std::string> envs = {"sj:n=8,delta_min=0.1", "tree:n=8,A=2,gamma=0.1",
                                         "random:levels=3/4/3,A=3,seed=11", "random:levels=5/5,A=2,seed=3,min_gap=0.1"};
  bool ok = true;
  for (const auto& env : envs) {
    for (auto algo : {amb::Algorithm::amb, amb::Algorithm::ucb}) {
      amb::ExperimentConfig cfg;
      cfg.env = env;
      cfg.algorithm = algo;
      cfg.episodes = episodes;
      cfg.seeds = {1, 2, 3};
      cfg.threads = 1;
      std::size_t violations = 0;
      bool monotone = true;
      for (const auto& run : amb::run_cells(cfg)) {
        violations += run.diagnostics.invariant_violations;
        for (std::size_t i = 1; i < run.points.size(); ++i) {
          const auto& p = run.points[i - 1];
          const auto& q = run.points[i];
          monotone = monotone && q.cum_regret >= p.cum_regret && q.decided_count >= p.decided_count &&
                     q.eliminated_pairs >= p.eliminated_pairs;
        }
      }
      const bool pass = violations == 0 && monotone;
      ok = ok && pass;
      std::cout << (pass ? "PASS " : "FAIL ") << amb::to_string(algo) << " invariants on " << env << " ("
                << violations << " violations)\n";
    }
  }
  double worst = 0.0;
  for (int H = 1; H <= 10; ++H) {
    for (std::int64_t n : {1, 2, 10, 100, 1000}) {
      const auto w = amb::alpha_weights(n, H);
      double sum = w.alpha0;
      for (double x : w.weights) sum += x;
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  }
  const bool weights_ok = worst <= 1e-9;
  ok = ok && weights_ok;
  std::cout << (weights_ok ? "PASS" : "FAIL") << " step-size weights sum to one (max error " << worst << ")\n";
  return ok ? 0 : 1;
}

void print_error(const std::string& command, const std::string& message) {
  std::cerr << Json{{"error", message}, {"command", command}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regret simulation for tabular episodic MDPs"};
  app.require_subcommand(1);

  std::string env, out;
  auto* gen = app.add_subcommand("gen", "write an instance file");
  gen->add_option("--env", env, "instance spec")->required();
  gen->add_option("--out", out, "output path (stdout if omitted)");

  auto* solve = app.add_subcommand("solve", "print V*, gaps, gap_min, |Z_opt|, |Z_mul|");
  solve->add_option("--env", env, "instance spec")->required();

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "run one algorithm over a set of seeds");
  add_run_flags(run, run_flags, true);

  RunFlags cmp_flags;
  auto* compare = app.add_subcommand("compare", "run amb and ucb on the same instance and seeds");
  add_run_flags(compare, cmp_flags, false);

  std::int64_t check_episodes = 2000;
  auto* check = app.add_subcommand("check", "run the invariant suites");
  check->add_option("--episodes,-K", check_episodes, "episodes per run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("parse", e.what());
    return 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (*gen) return cmd_gen(env, out);
    if (*solve) return cmd_solve(env);
    if (*run) return cmd_run(run_flags);
    if (*compare) return cmd_compare(cmp_flags);
    if (*check) return cmd_check(check_episodes);
  } catch (const std::exception& e) {
    print_error(name, e.what());
    return 1;
  }
  return 1;
}
