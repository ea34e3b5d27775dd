#pragma once

#include <cmath>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "ssg/dominance.hpp"
#include "ssg/equilibrium.hpp"
#include "ssg/nash.hpp"

namespace ssg {

struct SweepRow {
  double cost = 0.0;
  MixedProfile sigma;
  double residual = 0.0;
  std::string status;
  int iterations = 0;
  double nash_distance = std::numeric_limits<double>::quiet_NaN();
};

inline double profile_distance(const MixedProfile& a, const MixedProfile& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.dist.size(); ++i)
    for (std::size_t k = 0; k < a.dist[i].size(); ++k)
      d = std::max(d, std::fabs(a.dist[i][k] - b.dist[i][k]));
  return d;
}

// Equilibria along a decreasing cost grid, each solved against the same game
// and priors.  Warm starts reuse the previous point; every point is verified
// by an independent residual evaluation regardless of the path taken.
inline std::vector<SweepRow> cost_sweep(const ExtendedGame& ext,
                                        const std::vector<double>& cost_grid,
                                        double tol = 1e-8, int max_iter = 10000,
                                        bool warm_start = true, int threads = 1,
                                        bool myopic = false) {
  for (double c : cost_grid)
    if (!(c > 0.0)) throw DimensionError("cost grid must be strictly positive", -1, -1);

  std::vector<MixedProfile> nash;
  try {
    nash = nash_equilibria(ext.game);
  } catch (const UnsupportedError&) {
    // Distance column stays NaN for games outside the oracle's size limits.
  }

  auto solve_point = [&](double c, const std::optional<MixedProfile>& start) {
    Solver sv(ext.with_costs(c), false, myopic);
    EquilibriumResult res = sse_solve(sv, "auto", tol, max_iter, start, /*attach=*/false);
    SweepRow row;
    row.cost = c;
    row.sigma = res.sigma;
    row.residual = res.residual;
    row.status = res.status;
    row.iterations = res.iterations;
    if (!nash.empty()) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& ne : nash) best = std::min(best, profile_distance(res.sigma, ne));
      row.nash_distance = best;
    }
    return row;
  };

  std::vector<SweepRow> rows;
  if (threads > 1 && !warm_start) {
    std::vector<std::future<SweepRow>> futs;
    for (double c : cost_grid)
      futs.push_back(std::async(std::launch::async, solve_point, c, std::nullopt));
    for (auto& f : futs) rows.push_back(f.get());
  } else {
    std::optional<MixedProfile> start;
    for (double c : cost_grid) {
      rows.push_back(solve_point(c, start));
      if (warm_start) start = rows.back().sigma;
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Reachability of a pure profile along vanishing costs.

struct ReachabilityReport {
  bool reached = false;
  double final_distance = 0.0;
  std::vector<SweepRow> path;
};

// Builds Dirichlet priors whose mean is the product distribution induced by
// `prior_center` (an interior mixed profile) with the given concentration,
// runs the cost sweep, and reports whether the equilibrium path approaches
// the target pure profile.
inline ReachabilityReport reachability_experiment(const Game& game,
                                                  const std::vector<int>& target,
                                                  const MixedProfile& prior_center,
                                                  const std::vector<double>& cost_grid,
                                                  double concentration = 2.0,
                                                  double reach_tol = 0.05) {
  game.validate();
  prior_center.validate(game);
  if (static_cast<int>(target.size()) != game.num_players())
    throw DimensionError("target profile length mismatch", -1, -1);

  ExtendedGame ext;
  ext.game = game;
  ext.costs.assign(game.num_players(), cost_grid.front());
  for (int i = 0; i < game.num_players(); ++i) {
    auto mean = prior_center.opp_profile_dist(game, i);
    for (double& v : mean) {
      if (!(v > 0.0)) throw DimensionError("prior center must be interior", i, -1);
      v *= concentration;
    }
    ext.priors.emplace_back(mean);
  }

  ReachabilityReport rep;
  rep.path = cost_sweep(ext, cost_grid);

  MixedProfile pure = uniform_profile(game);
  for (int i = 0; i < game.num_players(); ++i) {
    for (auto& v : pure.dist[i]) v = 0.0;
    pure.dist[i][target[i]] = 1.0;
  }
  rep.final_distance = profile_distance(rep.path.back().sigma, pure);
  rep.reached = rep.path.back().status == "converged" && rep.final_distance < reach_tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Certified rationalizability level along a cost sweep.

struct RationalizabilityRow {
  double cost = 0.0;
  std::vector<std::vector<int>> support;  // per player, actions above threshold
  int certified_k = 0;                    // largest k with support inside A^k
  std::string status;
};

inline std::vector<RationalizabilityRow> rationalizability_sweep(
    const ExtendedGame& ext, const std::vector<double>& cost_grid, double eps_supp = 1e-6,
    double tol = 1e-8, int max_iter = 10000) {
  const RationalizableSets sets = k_rationalizable_sets(ext.game);
  // Certification is capped at the solvability depth: the last round that
  // actually eliminated something.  Beyond it A^k repeats, so higher k would
  // hold vacuously.
  const int depth = std::max(0, sets.fixed_point_round - 1);

  std::vector<RationalizabilityRow> rows;
  std::optional<MixedProfile> start;
  for (double c : cost_grid) {
    Solver sv(ext.with_costs(c));
    const EquilibriumResult res = sse_solve(sv, "auto", tol, max_iter, start, /*attach=*/false);
    start = res.sigma;

    RationalizabilityRow row;
    row.cost = c;
    row.status = res.status;
    row.support.resize(ext.game.num_players());
    for (int i = 0; i < ext.game.num_players(); ++i)
      for (int a = 0; a < ext.game.num_actions(i); ++a)
        if (res.sigma.dist[i][a] > eps_supp) row.support[i].push_back(a);

    int certified = 0;
    for (int k = 1; k <= depth; ++k) {
      bool ok = true;
      const auto& level = sets.at(k);
      for (int i = 0; i < ext.game.num_players() && ok; ++i)
        for (int a : row.support[i])
          if (std::find(level[i].begin(), level[i].end(), a) == level[i].end()) {
            ok = false;
            break;
          }
      if (ok)
        certified = k;
      else
        break;
    }
    row.certified_k = certified;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ssg
