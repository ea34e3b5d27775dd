#pragma once

#include <cstdint>
#include <vector>

#include "ssg/game.hpp"
#include "ssg/linprog.hpp"

namespace ssg {

// Strict dominance of a_i by a mixed strategy, tested against every opponent
// profile in `allowed`.  LP: maximize the minimum payoff gap
//   gamma* = max_{x in simplex} min_{s in allowed} ( sum_b x_b u(b,s) - u(a_i,s) )
// a_i is dominated iff gamma* exceeds the tie tolerance.  Never-best-response
// elimination with correlated conjectures reduces to exactly this test.
inline bool strictly_dominated(const Game& g, int i, int a_i,
                               const std::vector<std::int64_t>& allowed) {
  if (allowed.empty()) throw DimensionError("allowed opponent set is empty", i, a_i);
  const int na = g.num_actions(i);
  if (na == 1) return false;
  const double span = g.payoff_span() > 0 ? g.payoff_span() : 1.0;
  const double bound = 3.0 * span + 1.0;

  // Vars: x_0..x_{na-1}, gp, gm  (gamma = gp - gm, both bounded).
  const std::size_t nv = static_cast<std::size_t>(na) + 2;
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  for (std::int64_t s : allowed) {
    std::vector<double> row(nv, 0.0);
    for (int a = 0; a < na; ++a) row[a] = -g.payoff_vs_opp_profile(i, a, s);
    row[na] = 1.0;
    row[na + 1] = -1.0;
    A.push_back(row);
    b.push_back(-g.payoff_vs_opp_profile(i, a_i, s));
  }
  {  // sum x = 1 as two inequalities
    std::vector<double> row(nv, 0.0);
    for (int a = 0; a < na; ++a) row[a] = 1.0;
    A.push_back(row);
    b.push_back(1.0);
    for (int a = 0; a < na; ++a) row[a] = -1.0;
    row[na] = 0.0;
    row[na + 1] = 0.0;
    A.push_back(row);
    b.push_back(-1.0);
  }
  {  // keep gamma bounded so the polytope is bounded
    std::vector<double> row(nv, 0.0);
    row[na] = 1.0;
    A.push_back(row);
    b.push_back(bound);
    row[na] = 0.0;
    row[na + 1] = 1.0;
    A.push_back(row);
    b.push_back(bound);
  }
  std::vector<double> c(nv, 0.0);
  c[na] = 1.0;
  c[na + 1] = -1.0;

  const LpResult res = lp_solve(A, b, c);
  if (!res.feasible) throw LpError("dominance LP infeasible", detail::dump_lp(A, b, c));
  return res.objective > g.tie_tolerance();
}

inline bool strictly_dominated(const Game& g, int i, int a_i) {
  std::vector<std::int64_t> all(g.opp_profile_count(i));
  for (std::int64_t k = 0; k < g.opp_profile_count(i); ++k) all[k] = k;
  return strictly_dominated(g, i, a_i, all);
}

// Weak dominance: some mixture is >= against all opponent profiles and > on
// at least one.  Single LP: maximize the total slack subject to the weak
// inequalities; a_i is weakly dominated iff the optimum is positive.
inline bool weakly_dominated(const Game& g, int i, int a_i) {
  const int na = g.num_actions(i);
  if (na == 1) return false;
  const std::int64_t m = g.opp_profile_count(i);

  std::vector<std::vector<double>> A;
  std::vector<double> b;
  for (std::int64_t s = 0; s < m; ++s) {
    std::vector<double> row(na, 0.0);
    for (int a = 0; a < na; ++a) row[a] = -g.payoff_vs_opp_profile(i, a, s);
    A.push_back(row);
    b.push_back(-g.payoff_vs_opp_profile(i, a_i, s));
  }
  {
    std::vector<double> row(na, 1.0);
    A.push_back(row);
    b.push_back(1.0);
    for (auto& v : row) v = -1.0;
    A.push_back(row);
    b.push_back(-1.0);
  }
  std::vector<double> c(na, 0.0);
  double base = 0.0;
  for (std::int64_t s = 0; s < m; ++s) {
    for (int a = 0; a < na; ++a) c[a] += g.payoff_vs_opp_profile(i, a, s);
    base += g.payoff_vs_opp_profile(i, a_i, s);
  }
  const LpResult res = lp_solve(A, b, c);
  if (!res.feasible) return false;  // weak-dominance system has no solution
  return res.objective - base > g.tie_tolerance();
}

// Iterated elimination of strictly dominated actions with correlated
// conjectures.  sets[k][i] is the set of actions of player i surviving k
// rounds; sets[0] is the full action set and the fixed point is reached
// within sum_i |A_i| rounds.
struct RationalizableSets {
  std::vector<std::vector<std::vector<int>>> sets;  // [k][player][actions]
  int fixed_point_round = 0;                        // first k with sets[k] == sets[k-1]

  const std::vector<std::vector<int>>& at(int k) const {
    if (k < 0) throw DimensionError("k must be nonnegative", -1, k);
    const int kk = std::min<int>(k, static_cast<int>(sets.size()) - 1);
    return sets[kk];
  }
  const std::vector<std::vector<int>>& limit() const { return sets.back(); }
};

inline RationalizableSets k_rationalizable_sets(const Game& g, int max_k = -1) {
  RationalizableSets out;
  std::vector<std::vector<int>> cur(g.num_players());
  for (int i = 0; i < g.num_players(); ++i)
    for (int a = 0; a < g.num_actions(i); ++a) cur[i].push_back(a);
  out.sets.push_back(cur);

  int total_actions = 0;
  for (int i = 0; i < g.num_players(); ++i) total_actions += g.num_actions(i);
  const int cap = max_k >= 0 ? max_k : total_actions + 1;

  for (int k = 1; k <= cap; ++k) {
    std::vector<std::vector<int>> next(g.num_players());
    for (int i = 0; i < g.num_players(); ++i) {
      // Allowed opponent profiles: product of opponents' surviving sets.
      const auto js = g.opponents(i);
      std::vector<std::int64_t> allowed;
      for (std::int64_t p = 0; p < g.opp_profile_count(i); ++p) {
        const auto opp = g.opp_profile(i, p);
        bool ok = true;
        for (std::size_t q = 0; q < js.size(); ++q) {
          const auto& sj = cur[js[q]];
          if (std::find(sj.begin(), sj.end(), opp[q]) == sj.end()) {
            ok = false;
            break;
          }
        }
        if (ok) allowed.push_back(p);
      }
      for (int a : cur[i])
        if (!strictly_dominated(g, i, a, allowed)) next[i].push_back(a);
      if (next[i].empty()) next[i] = cur[i];  // cannot happen in finite games
    }
    const bool fixed = next == cur;
    cur = next;
    out.sets.push_back(cur);
    if (fixed) {
      out.fixed_point_round = k;
      break;
    }
  }
  if (out.fixed_point_round == 0) out.fixed_point_round = static_cast<int>(out.sets.size()) - 1;
  return out;
}

}  // namespace ssg
