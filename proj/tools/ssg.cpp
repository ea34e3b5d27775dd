// Command-line driver: reads a JSON run config, executes one command, writes
// artifacts atomically into the output directory, and prints a single JSON
// summary line on stdout.
//
// Exit codes: 0 success; 1 solver non-convergence or failed check verdict;
// 2 config/schema violation.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ssg/analogy.hpp"
#include "ssg/analysis.hpp"
#include "ssg/io.hpp"
#include "ssg/misspec.hpp"
#include "ssg/nash.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ssg;

namespace {

struct Cli {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::optional<double> tol;
};

struct Emitter {
  fs::path dir;
  std::vector<std::string> written;

  void write(const std::string& name, const std::string& content) {
    fs::create_directories(dir);
    atomic_write(dir / name, content);
    written.push_back((dir / name).string());
  }
  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
};

int player_index(const Game& g, const json& cfg, const std::string& where) {
  const std::string role = detail::require(cfg, "player", where).get<std::string>();
  for (int i = 0; i < g.num_players(); ++i)
    if (g.roles[i] == role) return i;
  throw SchemaError("unknown player '" + role + "'", where + "/player");
}

int action_index(const Game& g, int i, const json& v, const std::string& where) {
  if (v.is_number_integer()) {
    const int a = v.get<int>();
    if (a < 0 || a >= g.num_actions(i)) throw SchemaError("action index out of range", where);
    return a;
  }
  const std::string label = v.get<std::string>();
  for (int a = 0; a < g.num_actions(i); ++a)
    if (g.actions[i][a] == label) return a;
  throw SchemaError("unknown action '" + label + "' for player " + g.roles[i], where);
}

std::vector<double> number_array(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw SchemaError("expected a nonempty number array", where);
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw SchemaError("expected numbers", where);
    out.push_back(v.get<double>());
  }
  return out;
}

json equilibrium_json(const Game& g, const EquilibriumResult& res) {
  json j;
  j["schema_version"] = 1;
  j["sigma"] = profile_to_json(g, res.sigma);
  j["residual"] = res.residual;
  j["status"] = res.status;
  j["method"] = res.method;
  j["iterations"] = res.iterations;
  if (!res.root_candidates.empty()) j["root_candidates"] = res.root_candidates;
  return j;
}

// ---------------------------------------------------------------------------

int cmd_solve(const json& cfg, Emitter& em, const Cli& cli, json& summary) {
  const ExtendedGame ext = extended_game_from_json(detail::require(cfg, "extended_game", ""));
  em.write_json("game.normalized.json", game_to_json(ext.game));
  const double tol = cli.tol.value_or(cfg.value("tol", 1e-8));
  const int max_iter = cfg.value("max_iter", 10000);
  const std::string method = cfg.value("method", std::string("auto"));
  Solver sv(ext);
  const EquilibriumResult res = sse_solve(sv, method, tol, max_iter);
  json eq = equilibrium_json(ext.game, res);
  json ties = json::array();
  for (int i = 0; i < ext.game.num_players(); ++i)
    if (sv.policy(i).root_tie) ties.push_back(ext.game.roles[i]);
  if (!ties.empty()) eq["root_tie_players"] = ties;
  em.write_json("equilibrium.json", eq);
  for (int i = 0; i < ext.game.num_players(); ++i)
    em.write("action_time_" + ext.game.roles[i] + ".csv", action_time_csv(res.joint[i]));
  summary["residual"] = res.residual;
  summary["sigma"] = profile_to_json(ext.game, res.sigma);
  return res.status == "converged" ? 0 : 1;
}

int cmd_stopping(const json& cfg, Emitter& em, const Cli&, json& summary) {
  const ExtendedGame ext = extended_game_from_json(detail::require(cfg, "extended_game", ""));
  em.write_json("game.normalized.json", game_to_json(ext.game));
  const int i = player_index(ext.game, cfg, "");
  StoppingProblem prob = ext.player_problem(i);
  SolveOptions opts;
  if (cfg.value("myopic", false)) opts.myopic = true;
  if (cfg.contains("verify_horizon")) opts.verify_horizon = cfg.at("verify_horizon").get<bool>();
  const StoppingPolicy pol = solve(prob, opts);

  std::vector<double> sigma;
  if (cfg.contains("sigma_true"))
    sigma = number_array(cfg.at("sigma_true"), "/sigma_true");
  else
    sigma = prob.prior.mean();
  if (static_cast<int>(sigma.size()) != prob.symbols())
    throw SchemaError("sigma_true length must match the observation alphabet", "/sigma_true");

  em.write_json("policy.json", policy_rows_json(pol));
  em.write("action_time.csv", action_time_csv(joint_action_time(pol, sigma)));
  const auto tail = stop_time_tail_under_prior(pol);
  std::ostringstream os;
  os << "t,tail\n";
  for (int t = 0; t <= pol.horizon; ++t) os << t << "," << fmt17(tail[t]) << "\n";
  em.write("tails.csv", os.str());
  summary["horizon"] = pol.horizon;
  summary["root_decision"] = pol.root_stops() ? "stop" : "continue";
  if (pol.root_tie) summary["root_tie"] = true;
  if (pol.knife_edge_stops > 0) summary["knife_edge_stops"] = pol.knife_edge_stops;
  return 0;
}

int cmd_boundaries(const json& cfg, Emitter& em, const Cli&, json& summary) {
  const ExtendedGame ext = extended_game_from_json(detail::require(cfg, "extended_game", ""));
  em.write_json("game.normalized.json", game_to_json(ext.game));
  const int i = player_index(ext.game, cfg, "");
  const Boundaries b = boundaries(ext.player_problem(i));
  em.write("boundaries.csv", boundaries_csv(b));
  summary["sigma_tilde"] = b.sigma_tilde;
  summary["horizon"] = b.horizon;
  return 0;
}

int cmd_dynamics(const json& cfg, Emitter& em, const Cli& cli, json& summary) {
  const ExtendedGame ext = extended_game_from_json(detail::require(cfg, "extended_game", ""));
  em.write_json("game.normalized.json", game_to_json(ext.game));
  Solver sv(ext);
  DynamicsVariant var;
  var.kind = cfg.value("variant", std::string("cesaro"));
  var.beta = cfg.value("beta", 0.9);
  var.population = cfg.value("population", 1);
  var.seed = cli.seed.value_or(cfg.value("seed", 0ULL));
  const int steps = cfg.value("steps", 1000);
  MixedProfile s0 = cfg.contains("sigma0")
                        ? profile_from_json(ext.game, cfg.at("sigma0"), "/sigma0")
                        : uniform_profile(ext.game);
  const DynamicsTrace trace = dynamics_run(sv, s0, var, steps);

  std::ostringstream os;
  os << "step,residual";
  for (int i = 0; i < ext.game.num_players(); ++i)
    for (int a = 0; a < ext.game.num_actions(i); ++a)
      os << "," << ext.game.roles[i] << ":" << ext.game.actions[i][a];
  os << "\n";
  for (std::size_t n = 0; n < trace.sigmas.size(); ++n) {
    os << n << ",";
    os << (n < trace.residuals.size() ? fmt17(trace.residuals[n]) : "");
    for (const auto& d : trace.sigmas[n].dist)
      for (double v : d) os << "," << fmt17(v);
    os << "\n";
  }
  em.write("trace.csv", os.str());
  summary["final_residual"] = trace.residuals.empty() ? 0.0 : trace.residuals.back();
  summary["seed"] = var.seed;
  return 0;
}

int cmd_sweep_costs(const json& cfg, Emitter& em, const Cli& cli, json& summary) {
  const ExtendedGame ext = extended_game_from_json(detail::require(cfg, "extended_game", ""));
  em.write_json("game.normalized.json", game_to_json(ext.game));
  const auto grid = number_array(detail::require(cfg, "cost_grid", ""), "/cost_grid");
  const double tol = cli.tol.value_or(cfg.value("tol", 1e-8));
  const bool warm = cfg.value("warm_start", true);
  const auto rows = cost_sweep(ext, grid, tol, cfg.value("max_iter", 10000), warm, cli.threads);
  em.write("sweep.csv", sweep_csv(ext.game, rows));
  bool all_ok = true;
  for (const auto& r : rows) all_ok = all_ok && r.status == "converged";
  summary["points"] = rows.size();
  summary["final_nash_distance"] = rows.back().nash_distance;
  return all_ok ? 0 : 1;
}

int cmd_reachability(const json& cfg, Emitter& em, const Cli&, json& summary) {
  const Game g = game_from_json(detail::require(cfg, "game", ""));
  em.write_json("game.normalized.json", game_to_json(g));
  const json& tj = detail::require(cfg, "target", "");
  std::vector<int> target;
  for (int i = 0; i < g.num_players(); ++i) {
    if (!tj.contains(g.roles[i]))
      throw SchemaError("missing target action for '" + g.roles[i] + "'", "/target");
    target.push_back(action_index(g, i, tj.at(g.roles[i]), "/target/" + g.roles[i]));
  }
  const MixedProfile center =
      profile_from_json(g, detail::require(cfg, "prior_center", ""), "/prior_center");
  const auto grid = number_array(detail::require(cfg, "cost_grid", ""), "/cost_grid");
  const double conc = cfg.value("concentration", 2.0);
  const auto rep = reachability_experiment(g, target, center, grid, conc,
                                           cfg.value("reach_tol", 0.05));
  em.write("sweep.csv", sweep_csv(g, rep.path));
  json j;
  j["schema_version"] = 1;
  j["reached"] = rep.reached;
  j["final_distance"] = rep.final_distance;
  em.write_json("reachability.json", j);
  summary["reached"] = rep.reached;
  summary["final_distance"] = rep.final_distance;
  return 0;
}

int cmd_rationalizability(const json& cfg, Emitter& em, const Cli& cli, json& summary) {
  const ExtendedGame ext = extended_game_from_json(detail::require(cfg, "extended_game", ""));
  em.write_json("game.normalized.json", game_to_json(ext.game));
  const auto grid = number_array(detail::require(cfg, "cost_grid", ""), "/cost_grid");
  const double eps = cfg.value("eps_supp", 1e-6);
  const double tol = cli.tol.value_or(cfg.value("tol", 1e-8));
  const auto rows = rationalizability_sweep(ext, grid, eps, tol, cfg.value("max_iter", 10000));
  std::ostringstream os;
  os << "cost,certified_k,status";
  for (int i = 0; i < ext.game.num_players(); ++i) os << ",support:" << ext.game.roles[i];
  os << "\n";
  bool all_ok = true;
  for (const auto& r : rows) {
    os << fmt17(r.cost) << "," << r.certified_k << "," << r.status;
    for (const auto& sup : r.support) {
      os << ",";
      for (std::size_t k = 0; k < sup.size(); ++k) os << (k ? " " : "") << sup[k];
    }
    os << "\n";
    all_ok = all_ok && r.status == "converged";
  }
  em.write("rationalizability.csv", os.str());
  summary["certified_k_final"] = rows.back().certified_k;
  return all_ok ? 0 : 1;
}

int cmd_misspec(const json& cfg, Emitter& em, const Cli&, json& summary) {
  const Game g = game_from_json(detail::require(cfg, "game", ""));
  em.write_json("game.normalized.json", game_to_json(g));
  const int i = player_index(g, cfg, "");
  const PriorSpec prior = prior_from_json(detail::require(cfg, "prior", ""), "/prior");
  const double cost = detail::require_number(cfg, "cost", "");
  const auto sigma = number_array(detail::require(cfg, "true_sigma", ""), "/true_sigma");
  const int probe = cfg.value("probe_depth", 30);

  const auto payoff = g.payoff_matrix(i);
  const int symbols = static_cast<int>(g.opp_profile_count(i));
  const int prior_symbols =
      prior.is_dirichlet ? prior.dirichlet.size() : prior.finite.alphabet_size();
  if (prior_symbols != symbols)
    throw SchemaError("prior alphabet must match the opponent-profile count", "/prior");
  if (static_cast<int>(sigma.size()) != symbols)
    throw SchemaError("true_sigma length must match the opponent-profile count", "/true_sigma");
  MisspecReport rep;
  if (prior.is_dirichlet)
    rep = misspec_probe_dirichlet(payoff, prior.dirichlet, cost, sigma);
  else
    rep = misspec_detector(payoff, prior.finite, cost, sigma, probe);

  json j;
  j["schema_version"] = 1;
  j["never_stop_mass"] = rep.never_stop_mass;
  j["stop_mass"] = rep.stop_mass;
  j["stop_mass_is_lower_bound"] = rep.lower_bound;
  j["probe_depth"] = rep.probe_depth;
  j["root_stop_value"] = rep.root_stop_value;
  j["root_expected_value"] = rep.root_expected_value;
  j["root_gain"] = rep.root_gain;
  j["gain_trace"] = rep.gain_trace;
  em.write_json("misspec.json", j);
  summary["never_stop_mass"] = rep.never_stop_mass;
  summary["root_gain"] = rep.root_gain;
  return 0;
}

int cmd_analogy(const json& cfg, Emitter& em, const Cli& cli, json& summary) {
  const ExtendedGame ext = extended_game_from_json(detail::require(cfg, "extended_game", ""));
  em.write_json("game.normalized.json", game_to_json(ext.game));
  if (ext.partitions.empty())
    throw SchemaError("analogy command requires 'partitions' in the extended game",
                      "/extended_game");
  const auto grid = number_array(detail::require(cfg, "cost_grid", ""), "/cost_grid");
  const double tol = cli.tol.value_or(cfg.value("tol", 1e-8));
  const auto rows = cost_sweep(ext, grid, tol, cfg.value("max_iter", 10000));
  em.write("sweep.csv", sweep_csv(ext.game, rows));
  const AbeeCheck chk = abee_check(ext.game, ext.partitions, rows.back().sigma,
                                   cfg.value("abee_tol", 0.05));
  json j;
  j["schema_version"] = 1;
  j["abee_satisfied"] = chk.satisfied;
  j["abee_worst_gap"] = chk.worst_gap;
  j["limit_sigma"] = profile_to_json(ext.game, rows.back().sigma);
  em.write_json("analogy.json", j);
  summary["abee_satisfied"] = chk.satisfied;
  summary["abee_worst_gap"] = chk.worst_gap;
  return chk.satisfied ? 0 : 1;
}

int cmd_check(const json& cfg, Emitter& em, const Cli&, json& summary) {
  const std::string suite = detail::require(cfg, "suite", "").get<std::string>();
  const ExtendedGame ext = extended_game_from_json(detail::require(cfg, "extended_game", ""));
  const int i = player_index(ext.game, cfg, "");
  const StoppingProblem prob = ext.player_problem(i);

  std::vector<double> sigma_grid;
  for (int k = 0; k <= 20; ++k) sigma_grid.push_back(k / 20.0);
  std::vector<int> t_grid;
  const int hb = horizon_bound(prob);
  for (int t = 0; t <= hb; ++t) t_grid.push_back(t);

  StaticsReport rep;
  if (suite == "statics-payoff") {
    const int target = action_index(ext.game, i, detail::require(cfg, "target_action", ""),
                                    "/target_action");
    const auto bonuses = number_array(detail::require(cfg, "bonus_grid", ""), "/bonus_grid");
    rep = comparative_statics_payoff(prob, target, bonuses, sigma_grid, t_grid);
  } else if (suite == "statics-prior") {
    const json& chain = detail::require(cfg, "prior_chain", "");
    std::vector<DirichletPrior> priors;
    for (const auto& pj : chain)
      priors.push_back(prior_from_json(pj, "/prior_chain").dirichlet);
    rep = comparative_statics_prior(prob, priors, sigma_grid, t_grid);
  } else if (suite == "statics-sigma") {
    rep = comparative_statics_sigma(prob, sigma_grid, t_grid);
  } else if (suite == "time-revealed") {
    const BinaryStructure bs = binary_structure(prob);
    if (!bs.sigma_tilde) throw SchemaError("no interior indifference point", "/extended_game");
    const double sigma = cfg.value("sigma_true", 0.5);
    const auto pol = solve(prob, no_value_tables());
    const auto tr = time_revealed_indifference(pol, {1.0 - sigma, sigma}, *bs.sigma_tilde);
    json j;
    j["schema_version"] = 1;
    j["depths"] = tr.depths;
    j["mean_distance"] = tr.mean_distance;
    j["mass"] = tr.mass;
    j["rank_correlation"] = tr.rank_correlation;
    j["monotone_pass"] = tr.monotone_pass;
    em.write_json("report.json", j);
    summary["pass"] = tr.monotone_pass;
    return tr.monotone_pass ? 0 : 1;
  } else {
    throw SchemaError("unknown check suite '" + suite + "'", "/suite");
  }

  // Grids out as CSV, verdict as JSON.
  std::ostringstream os;
  os << "param,sigma,t,cdf_target,cdf_other\n";
  for (std::size_t p = 0; p < rep.cdf.size(); ++p)
    for (std::size_t s = 0; s < rep.sigma_grid.size(); ++s)
      for (std::size_t t = 0; t < rep.t_grid.size(); ++t)
        os << fmt17(rep.params[p]) << "," << fmt17(rep.sigma_grid[s]) << "," << rep.t_grid[t]
           << "," << fmt17(rep.cdf[p][s][t]) << "," << fmt17(rep.cdf_other[p][s][t]) << "\n";
  em.write("grids.csv", os.str());
  json j;
  j["schema_version"] = 1;
  j["suite"] = suite;
  j["pass"] = rep.pass;
  j["worst_violation"] = rep.worst_violation;
  em.write_json("report.json", j);
  summary["pass"] = rep.pass;
  summary["worst_violation"] = rep.worst_violation;
  return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  Cli cli;
  CLI::App app{"sequential-sampling game solver"};
  app.add_option("--config", cli.config_path, "run configuration (JSON)")->required();
  app.add_option("--out", cli.out_dir, "output directory");
  std::uint64_t seed_opt = 0;
  auto* seed_flag = app.add_option("--seed", seed_opt, "override RNG seed");
  app.add_option("--threads", cli.threads, "worker threads for sweeps");
  double tol_opt = 0.0;
  auto* tol_flag = app.add_option("--tol", tol_opt, "override solver tolerance");
  auto* out_flag = app.get_option("--out");
  CLI11_PARSE(app, argc, argv);
  if (*seed_flag) cli.seed = seed_opt;
  if (*tol_flag) cli.tol = tol_opt;
  if (!*out_flag) {
    if (const char* env = std::getenv("SSG_OUT_DIR")) cli.out_dir = env;
  }

  json summary;
  summary["schema_version"] = 1;
  Emitter em;
  em.dir = cli.out_dir;
  int rc = 0;
  try {
    std::ifstream in(cli.config_path);
    if (!in) {
      std::cerr << "cannot read config: " << cli.config_path << "\n";
      return 2;
    }
    json cfg = json::parse(in, nullptr, true, true);  // allow comments
    const std::string command = detail::require(cfg, "command", "").get<std::string>();
    summary["command"] = command;

    if (command == "solve")
      rc = cmd_solve(cfg, em, cli, summary);
    else if (command == "stopping")
      rc = cmd_stopping(cfg, em, cli, summary);
    else if (command == "boundaries")
      rc = cmd_boundaries(cfg, em, cli, summary);
    else if (command == "dynamics")
      rc = cmd_dynamics(cfg, em, cli, summary);
    else if (command == "sweep-costs")
      rc = cmd_sweep_costs(cfg, em, cli, summary);
    else if (command == "reachability")
      rc = cmd_reachability(cfg, em, cli, summary);
    else if (command == "rationalizability")
      rc = cmd_rationalizability(cfg, em, cli, summary);
    else if (command == "misspec")
      rc = cmd_misspec(cfg, em, cli, summary);
    else if (command == "analogy")
      rc = cmd_analogy(cfg, em, cli, summary);
    else if (command == "check")
      rc = cmd_check(cfg, em, cli, summary);
    else
      throw SchemaError("unknown command '" + command + "'", "/command");
  } catch (const SchemaError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  summary["status"] = rc == 0 ? "ok" : "failed";
  summary["outputs"] = em.written;
  std::cout << summary.dump() << std::endl;
  return rc;
}
