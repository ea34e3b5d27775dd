#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "ssg/game.hpp"

namespace ssg {

// Nash equilibrium computation for small 2-player games; the vanishing-cost
// benchmark.  2x2: pure scan plus the interior indifference mix.  Up to 4x4:
// support enumeration with the indifference linear systems.  Every candidate
// is verified against the best-response conditions before being returned.

namespace detail {

// Solves M x = rhs by Gaussian elimination with partial pivoting.
// Returns false if the system is (numerically) singular.
inline bool gauss_solve(std::vector<std::vector<double>> M, std::vector<double> rhs,
                        std::vector<double>& x) {
  const int n = static_cast<int>(M.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(M[r][col]) > std::fabs(M[piv][col])) piv = r;
    if (std::fabs(M[piv][col]) < 1e-12) return false;
    std::swap(M[piv], M[col]);
    std::swap(rhs[piv], rhs[col]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = M[r][col] / M[col][col];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) M[r][c] -= f * M[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  x.assign(n, 0.0);
  for (int r = 0; r < n; ++r) x[r] = rhs[r] / M[r][r];
  return true;
}

inline bool is_nash(const Game& g, const MixedProfile& s, double tol) {
  for (int i = 0; i < g.num_players(); ++i) {
    const auto q = s.opp_profile_dist(g, i);
    double best = -1e300;
    std::vector<double> vals(g.num_actions(i));
    for (int a = 0; a < g.num_actions(i); ++a) {
      vals[a] = expected_payoff(g, i, a, q);
      best = std::max(best, vals[a]);
    }
    for (int a = 0; a < g.num_actions(i); ++a)
      if (s.dist[i][a] > 1e-9 && vals[a] < best - tol) return false;
  }
  return true;
}

inline bool same_profile(const MixedProfile& a, const MixedProfile& b, double tol) {
  for (std::size_t i = 0; i < a.dist.size(); ++i)
    for (std::size_t k = 0; k < a.dist[i].size(); ++k)
      if (std::fabs(a.dist[i][k] - b.dist[i][k]) > tol) return false;
  return true;
}

// All subsets of {0..n-1} of size k, lexicographic.
inline void subsets(int n, int k, std::vector<std::vector<int>>& out) {
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int v = start; v < n; ++v) {
      cur.push_back(v);
      rec(v + 1);
      cur.pop_back();
    }
  };
  rec(0);
}

}  // namespace detail

struct NashDiagnostics {
  int supports_tried = 0;
  int singular_systems = 0;  // skipped with a diagnostic
};

inline std::vector<MixedProfile> nash_equilibria(const Game& g,
                                                 NashDiagnostics* diag = nullptr) {
  g.validate();
  if (g.num_players() != 2)
    throw UnsupportedError("nash_equilibria supports exactly 2 players");
  if (g.num_actions(0) > 4 || g.num_actions(1) > 4)
    throw UnsupportedError("nash_equilibria supports at most 4 actions per player");

  const double tol = 1e-9 * std::max(1.0, g.payoff_span());
  std::vector<MixedProfile> found;
  NashDiagnostics local;
  NashDiagnostics& d = diag ? *diag : local;

  auto add = [&](const MixedProfile& s) {
    if (!detail::is_nash(g, s, tol)) return;
    for (const auto& e : found)
      if (detail::same_profile(e, s, 1e-8)) return;
    found.push_back(s);
  };

  const int n0 = g.num_actions(0), n1 = g.num_actions(1);

  // Pure profiles.
  for (int a = 0; a < n0; ++a) {
    for (int b = 0; b < n1; ++b) {
      MixedProfile s;
      s.dist = {std::vector<double>(n0, 0.0), std::vector<double>(n1, 0.0)};
      s.dist[0][a] = 1.0;
      s.dist[1][b] = 1.0;
      add(s);
    }
  }

  // Mixed supports: equal-cardinality support enumeration.  For each support
  // pair solve the two indifference systems (opponent mix must equalize the
  // supported payoffs); singular systems are skipped.
  for (int k = 2; k <= std::min(n0, n1); ++k) {
    std::vector<std::vector<int>> s0s, s1s;
    detail::subsets(n0, k, s0s);
    detail::subsets(n1, k, s1s);
    for (const auto& S0 : s0s) {
      for (const auto& S1 : s1s) {
        ++d.supports_tried;
        // sigma_1 on S1 making player 0 indifferent across S0 (+ sum = 1).
        // Unknowns: k probs + common value v.
        auto solve_side = [&](int me, const std::vector<int>& Sme,
                              const std::vector<int>& Sopp,
                              std::vector<double>& opp_mix) -> bool {
          const int kk = static_cast<int>(Sme.size());
          std::vector<std::vector<double>> M(kk + 1, std::vector<double>(kk + 1, 0.0));
          std::vector<double> rhs(kk + 1, 0.0);
          for (int r = 0; r < kk; ++r) {
            for (int c = 0; c < kk; ++c) {
              // payoff of my action Sme[r] against opp action Sopp[c]
              std::vector<int> prof(2);
              prof[me] = Sme[r];
              prof[1 - me] = Sopp[c];
              M[r][c] = g.payoff_at(me, prof);
            }
            M[r][kk] = -1.0;  // -v
            rhs[r] = 0.0;
          }
          for (int c = 0; c < kk; ++c) M[kk][c] = 1.0;
          rhs[kk] = 1.0;
          std::vector<double> x;
          if (!detail::gauss_solve(M, rhs, x)) {
            ++d.singular_systems;
            return false;
          }
          for (int c = 0; c < kk; ++c) {
            if (x[c] < -1e-9) return false;
            opp_mix[Sopp[c]] = std::max(0.0, x[c]);
          }
          return true;
        };
        std::vector<double> mix1(n1, 0.0), mix0(n0, 0.0);
        if (!solve_side(0, S0, S1, mix1)) continue;
        if (!solve_side(1, S1, S0, mix0)) continue;
        MixedProfile s;
        s.dist = {mix0, mix1};
        // Renormalize away clamp dust before verification.
        for (auto& dvec : s.dist) {
          double sum = 0.0;
          for (double p : dvec) sum += p;
          if (sum <= 0.0) continue;
          for (double& p : dvec) p /= sum;
        }
        add(s);
      }
    }
  }
  return found;
}

}  // namespace ssg
