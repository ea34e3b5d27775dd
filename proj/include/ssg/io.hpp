#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssg/belief.hpp"
#include "ssg/boundaries.hpp"
#include "ssg/distributions.hpp"
#include "ssg/equilibrium.hpp"
#include "ssg/errors.hpp"
#include "ssg/game.hpp"
#include "ssg/sweeps.hpp"

namespace ssg {

using nlohmann::json;

// 17 significant digits: doubles round-trip exactly through the text form.
inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Writes via a temporary file in the same directory, then renames; readers
// never observe a partially written file.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + tmp.string());
    out << content;
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

namespace detail {

inline const json& require(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw SchemaError("missing field '" + key + "'", where);
  return j.at(key);
}

inline double require_number(const json& j, const std::string& key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number()) throw SchemaError("field '" + key + "' must be a number", where + "/" + key);
  return v.get<double>();
}

// payoff tensor encode/decode: nested arrays over full profiles, role order,
// last role fastest.
inline json encode_payoff_rec(const Game& g, int i, int role, std::vector<int>& prof) {
  json arr = json::array();
  if (role == g.num_players()) throw Error("internal: payoff recursion overflow");
  for (int a = 0; a < g.num_actions(role); ++a) {
    prof[role] = a;
    if (role + 1 == g.num_players())
      arr.push_back(g.payoff_at(i, prof));
    else
      arr.push_back(encode_payoff_rec(g, i, role + 1, prof));
  }
  return arr;
}

inline void decode_payoff_rec(const json& node, const Game& g, int i, int role,
                              std::vector<int>& prof, std::vector<double>& out,
                              const std::string& where) {
  if (!node.is_array() || static_cast<int>(node.size()) != g.num_actions(role))
    throw SchemaError("payoff nesting must match the action counts", where);
  for (int a = 0; a < g.num_actions(role); ++a) {
    prof[role] = a;
    if (role + 1 == g.num_players()) {
      if (!node[a].is_number()) throw SchemaError("payoff entries must be numbers", where);
      out[g.profile_index(prof)] = node[a].get<double>();
    } else {
      decode_payoff_rec(node[a], g, i, role + 1, prof, out, where);
    }
  }
}

}  // namespace detail

inline json game_to_json(const Game& g) {
  json j;
  j["players"] = g.roles;
  json actions = json::object();
  for (int i = 0; i < g.num_players(); ++i) actions[g.roles[i]] = g.actions[i];
  j["actions"] = actions;
  json payoffs = json::object();
  for (int i = 0; i < g.num_players(); ++i) {
    std::vector<int> prof(g.num_players(), 0);
    payoffs[g.roles[i]] = detail::encode_payoff_rec(g, i, 0, prof);
  }
  j["payoffs"] = payoffs;
  return j;
}

inline Game game_from_json(const json& j, const std::string& where = "/game") {
  Game g;
  const json& players = detail::require(j, "players", where);
  if (!players.is_array() || players.size() < 2)
    throw SchemaError("'players' must list at least two names", where + "/players");
  for (const auto& p : players) {
    if (!p.is_string()) throw SchemaError("player names must be strings", where + "/players");
    g.roles.push_back(p.get<std::string>());
  }
  const json& actions = detail::require(j, "actions", where);
  for (const auto& role : g.roles) {
    if (!actions.contains(role))
      throw SchemaError("missing action list for player '" + role + "'", where + "/actions");
    const json& al = actions.at(role);
    if (!al.is_array() || al.empty())
      throw SchemaError("action list of '" + role + "' must be a nonempty array",
                        where + "/actions/" + role);
    std::vector<std::string> labels;
    for (const auto& a : al) labels.push_back(a.get<std::string>());
    g.actions.push_back(labels);
  }
  const json& payoffs = detail::require(j, "payoffs", where);
  for (int i = 0; i < g.num_players(); ++i) {
    if (!payoffs.contains(g.roles[i]))
      throw SchemaError("missing payoff tensor for player '" + g.roles[i] + "'",
                        where + "/payoffs");
    std::vector<double> flat(g.num_profiles(), 0.0);
    std::vector<int> prof(g.num_players(), 0);
    detail::decode_payoff_rec(payoffs.at(g.roles[i]), g, i, 0, prof, flat,
                              where + "/payoffs/" + g.roles[i]);
    g.payoff.push_back(flat);
  }
  try {
    g.validate();
  } catch (const Error& e) {
    throw SchemaError(e.what(), where);
  }
  return g;
}

inline json prior_to_json(const DirichletPrior& p) {
  return json{{"type", "dirichlet"}, {"alpha", p.alpha}};
}

inline json finite_prior_to_json(const FiniteSupportPrior& p) {
  return json{{"type", "finite"}, {"atoms", p.atoms}, {"weights", p.weights}};
}

struct PriorSpec {
  bool is_dirichlet = true;
  DirichletPrior dirichlet;
  FiniteSupportPrior finite;
};

inline PriorSpec prior_from_json(const json& j, const std::string& where) {
  PriorSpec out;
  const std::string type = detail::require(j, "type", where).get<std::string>();
  if (type == "dirichlet") {
    const json& alpha = detail::require(j, "alpha", where);
    if (!alpha.is_array() || alpha.empty())
      throw SchemaError("'alpha' must be a nonempty array", where + "/alpha");
    std::vector<double> a;
    for (const auto& v : alpha) a.push_back(v.get<double>());
    try {
      out.dirichlet = DirichletPrior(a);
    } catch (const Error& e) {
      throw SchemaError(e.what(), where + "/alpha");
    }
  } else if (type == "finite") {
    out.is_dirichlet = false;
    const json& atoms = detail::require(j, "atoms", where);
    const json& weights = detail::require(j, "weights", where);
    out.finite.atoms = atoms.get<std::vector<std::vector<double>>>();
    out.finite.weights = weights.get<std::vector<double>>();
    try {
      out.finite.validate();
    } catch (const Error& e) {
      throw SchemaError(e.what(), where);
    }
  } else {
    throw SchemaError("unknown prior type '" + type + "'", where + "/type");
  }
  return out;
}

inline json extended_game_to_json(const ExtendedGame& ext) {
  json j;
  j["game"] = game_to_json(ext.game);
  json priors = json::object(), costs = json::object();
  for (int i = 0; i < ext.game.num_players(); ++i) {
    priors[ext.game.roles[i]] = prior_to_json(ext.priors[i]);
    costs[ext.game.roles[i]] = ext.costs[i];
  }
  j["priors"] = priors;
  j["costs"] = costs;
  if (!ext.partitions.empty()) {
    json parts = json::object();
    for (int i = 0; i < ext.game.num_players(); ++i)
      if (!ext.partitions[i].empty()) parts[ext.game.roles[i]] = ext.partitions[i];
    j["partitions"] = parts;
  }
  return j;
}

inline ExtendedGame extended_game_from_json(const json& j, const std::string& where = "") {
  ExtendedGame ext;
  ext.game = game_from_json(detail::require(j, "game", where), where + "/game");
  const json& priors = detail::require(j, "priors", where);
  const json& costs = detail::require(j, "costs", where);
  if (j.contains("partitions")) ext.partitions.resize(ext.game.num_players());
  for (int i = 0; i < ext.game.num_players(); ++i) {
    const std::string& role = ext.game.roles[i];
    if (!priors.contains(role))
      throw SchemaError("missing prior for player '" + role + "'", where + "/priors");
    const PriorSpec spec = prior_from_json(priors.at(role), where + "/priors/" + role);
    if (!spec.is_dirichlet)
      throw SchemaError("equilibrium solving requires full-support dirichlet priors",
                        where + "/priors/" + role);
    ext.priors.push_back(spec.dirichlet);
    if (!costs.contains(role))
      throw SchemaError("missing cost for player '" + role + "'", where + "/costs");
    if (!costs.at(role).is_number() || costs.at(role).get<double>() <= 0.0)
      throw SchemaError("cost of '" + role + "' must be a positive number",
                        where + "/costs/" + role);
    ext.costs.push_back(costs.at(role).get<double>());
    if (j.contains("partitions") && j.at("partitions").contains(role))
      ext.partitions[i] = j.at("partitions").at(role).get<std::vector<int>>();
  }
  try {
    ext.validate();
  } catch (const Error& e) {
    throw SchemaError(e.what(), where);
  }
  return ext;
}

inline json profile_to_json(const Game& g, const MixedProfile& s) {
  json j = json::object();
  for (int i = 0; i < g.num_players(); ++i) j[g.roles[i]] = s.dist[i];
  return j;
}

inline MixedProfile profile_from_json(const Game& g, const json& j, const std::string& where) {
  MixedProfile s;
  for (int i = 0; i < g.num_players(); ++i) {
    if (!j.contains(g.roles[i]))
      throw SchemaError("missing distribution for player '" + g.roles[i] + "'", where);
    s.dist.push_back(j.at(g.roles[i]).get<std::vector<double>>());
  }
  try {
    s.validate(g);
  } catch (const Error& e) {
    throw SchemaError(e.what(), where);
  }
  return s;
}

// --- CSV emission ----------------------------------------------------------

inline std::string action_time_csv(const ActionTimeDistribution& d) {
  std::ostringstream os;
  os << "action,t,prob\n";
  for (std::size_t a = 0; a < d.p.size(); ++a)
    for (int t = 0; t <= d.horizon; ++t)
      os << a << "," << t << "," << fmt17(d.p[a][t]) << "\n";
  return os.str();
}

inline std::string boundaries_csv(const Boundaries& b) {
  std::ostringstream os;
  os << "t,lower,upper\n";
  for (int t = 0; t <= b.horizon; ++t)
    os << t << "," << fmt17(b.lower[t]) << "," << fmt17(b.upper[t]) << "\n";
  return os.str();
}

inline std::string sweep_csv(const Game& g, const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "cost,residual,status,iterations,nash_distance";
  for (int i = 0; i < g.num_players(); ++i)
    for (int a = 0; a < g.num_actions(i); ++a)
      os << "," << g.roles[i] << ":" << g.actions[i][a];
  os << "\n";
  for (const auto& r : rows) {
    os << fmt17(r.cost) << "," << fmt17(r.residual) << "," << r.status << "," << r.iterations
       << "," << fmt17(r.nash_distance);
    for (std::size_t i = 0; i < r.sigma.dist.size(); ++i)
      for (double v : r.sigma.dist[i]) os << "," << fmt17(v);
    os << "\n";
  }
  return os.str();
}

inline json policy_rows_json(const StoppingPolicy& pol) {
  json rows = json::array();
  CountLattice lat = pol.lattice();
  for (int t = 0; t <= pol.horizon; ++t) {
    std::vector<int> n = lat.first(t);
    std::int64_t node = 0;
    do {
      json row;
      row["depth"] = t;
      row["counts"] = n;
      row["decision"] = pol.stops(t, node) ? "stop" : "continue";
      if (pol.stops(t, node)) row["action"] = pol.chosen[t][node];
      if (pol.has_values) {
        row["value"] = pol.value[t][node];
        row["stop_value"] = pol.stop_value[t][node];
      }
      rows.push_back(row);
      ++node;
    } while (lat.next(n));
  }
  return rows;
}

}  // namespace ssg
