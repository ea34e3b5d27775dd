#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "ssg/errors.hpp"

namespace ssg {

// A finite normal-form game.  Payoffs are stored per player as a flat tensor
// over full action profiles; profiles are indexed row-major in role order
// (the last role's action index varies fastest).  All opponent-profile
// alphabets downstream use the same lexicographic convention.
struct Game {
  std::vector<std::string> roles;                 // player names, role order
  std::vector<std::vector<std::string>> actions;  // action labels per player
  std::vector<std::vector<double>> payoff;        // [player][profile index]

  int num_players() const { return static_cast<int>(roles.size()); }
  int num_actions(int i) const { return static_cast<int>(actions[i].size()); }

  std::int64_t num_profiles() const {
    std::int64_t n = 1;
    for (const auto& a : actions) n *= static_cast<std::int64_t>(a.size());
    return n;
  }

  std::int64_t profile_index(const std::vector<int>& profile) const {
    std::int64_t idx = 0;
    for (int j = 0; j < num_players(); ++j) idx = idx * num_actions(j) + profile[j];
    return idx;
  }

  double payoff_at(int i, const std::vector<int>& profile) const {
    return payoff[i][profile_index(profile)];
  }

  // max - min over every payoff entry of every player; scale for tolerances.
  double payoff_span() const {
    double lo = payoff[0][0], hi = payoff[0][0];
    for (const auto& u : payoff)
      for (double v : u) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    return hi - lo;
  }

  // Scale-aware tolerance for knife-edge payoff comparisons.
  double tie_tolerance() const {
    const double s = payoff_span();
    return 1e-9 * (s > 0.0 ? s : 1.0);
  }

  void validate() const {
    if (num_players() < 2) throw DimensionError("game needs at least 2 players", -1, -1);
    for (int i = 0; i < num_players(); ++i) {
      if (actions[i].empty())
        throw DimensionError("player has no actions: " + roles[i], i, -1);
    }
    for (int i = 0; i < num_players(); ++i) {
      if (static_cast<std::int64_t>(payoff[i].size()) != num_profiles())
        throw DimensionError("payoff tensor size mismatch for " + roles[i], i, -1);
      for (double v : payoff[i])
        if (!std::isfinite(v))
          throw DimensionError("non-finite payoff entry for " + roles[i], i, -1);
    }
  }

  // --- opponent profile alphabet of player i (lexicographic, role order) ---

  std::vector<int> opponents(int i) const {
    std::vector<int> js;
    for (int j = 0; j < num_players(); ++j)
      if (j != i) js.push_back(j);
    return js;
  }

  std::int64_t opp_profile_count(int i) const {
    std::int64_t n = 1;
    for (int j : opponents(i)) n *= num_actions(j);
    return n;
  }

  // Decodes opponent-profile index k of player i into per-opponent action
  // indices (in role order, excluding i).
  std::vector<int> opp_profile(int i, std::int64_t k) const {
    const auto js = opponents(i);
    std::vector<int> prof(js.size());
    for (int p = static_cast<int>(js.size()) - 1; p >= 0; --p) {
      const int na = num_actions(js[p]);
      prof[p] = static_cast<int>(k % na);
      k /= na;
    }
    return prof;
  }

  double payoff_vs_opp_profile(int i, int a_i, std::int64_t k) const {
    const auto js = opponents(i);
    const auto opp = opp_profile(i, k);
    std::vector<int> full(num_players());
    full[i] = a_i;
    for (std::size_t p = 0; p < js.size(); ++p) full[js[p]] = opp[p];
    return payoff_at(i, full);
  }

  // Payoff matrix of player i over (own action, opponent profile symbol);
  // the interface between the game and the sampling machinery.
  std::vector<std::vector<double>> payoff_matrix(int i) const {
    const std::int64_t m = opp_profile_count(i);
    std::vector<std::vector<double>> u(num_actions(i), std::vector<double>(m));
    for (int a = 0; a < num_actions(i); ++a)
      for (std::int64_t k = 0; k < m; ++k) u[a][k] = payoff_vs_opp_profile(i, a, k);
    return u;
  }
};

// A profile of independent mixed strategies.
struct MixedProfile {
  std::vector<std::vector<double>> dist;  // [player][action]

  void validate(const Game& g) const {
    if (static_cast<int>(dist.size()) != g.num_players())
      throw DimensionError("profile has wrong number of players", -1, -1);
    for (int i = 0; i < g.num_players(); ++i) {
      if (static_cast<int>(dist[i].size()) != g.num_actions(i))
        throw DimensionError("distribution length mismatch for " + g.roles[i], i, -1);
      double s = 0.0;
      for (double p : dist[i]) {
        if (p < -1e-12) throw DimensionError("negative probability for " + g.roles[i], i, -1);
        s += p;
      }
      if (std::fabs(s - 1.0) > 1e-12)
        throw DimensionError("probabilities do not sum to 1 for " + g.roles[i], i, -1);
    }
  }

  // Product distribution over player i's opponent-profile alphabet.
  std::vector<double> opp_profile_dist(const Game& g, int i) const {
    const auto js = g.opponents(i);
    const std::int64_t m = g.opp_profile_count(i);
    std::vector<double> q(m, 1.0);
    for (std::int64_t k = 0; k < m; ++k) {
      const auto opp = g.opp_profile(i, k);
      for (std::size_t p = 0; p < js.size(); ++p) q[k] *= dist[js[p]][opp[p]];
    }
    return q;
  }
};

inline MixedProfile uniform_profile(const Game& g) {
  MixedProfile s;
  s.dist.resize(g.num_players());
  for (int i = 0; i < g.num_players(); ++i)
    s.dist[i].assign(g.num_actions(i), 1.0 / g.num_actions(i));
  return s;
}

// Linear expected payoff of a pure action against a distribution over the
// opponent-profile alphabet.
inline double expected_payoff(const Game& g, int i, int a_i,
                              const std::vector<double>& sigma_minus_i) {
  if (static_cast<std::int64_t>(sigma_minus_i.size()) != g.opp_profile_count(i))
    throw DimensionError("opponent distribution length mismatch for " + g.roles[i], i,
                         static_cast<int>(sigma_minus_i.size()));
  double v = 0.0;
  for (std::int64_t k = 0; k < g.opp_profile_count(i); ++k)
    v += sigma_minus_i[k] * g.payoff_vs_opp_profile(i, a_i, k);
  return v;
}

struct BestResponse {
  std::vector<int> actions;  // all maximizers within tie tolerance
  double value = 0.0;
};

inline BestResponse best_responses(const Game& g, int i,
                                   const std::vector<double>& sigma_minus_i) {
  BestResponse br;
  std::vector<double> vals(g.num_actions(i));
  for (int a = 0; a < g.num_actions(i); ++a) vals[a] = expected_payoff(g, i, a, sigma_minus_i);
  br.value = *std::max_element(vals.begin(), vals.end());
  const double eps = g.tie_tolerance();
  for (int a = 0; a < g.num_actions(i); ++a)
    if (vals[a] >= br.value - eps) br.actions.push_back(a);
  return br;
}

// Adds a constant bonus g_bonus >= 0 to u_i(a_i, .); the constant-bonus
// specialization of the incentive order on payoffs.
inline Game payoff_bonus(const Game& g, int i, int a_i, double g_bonus) {
  if (g_bonus < 0.0) throw DimensionError("bonus must be nonnegative", i, a_i);
  Game out = g;
  for (std::int64_t k = 0; k < g.opp_profile_count(i); ++k) {
    const auto js = g.opponents(i);
    const auto opp = g.opp_profile(i, k);
    std::vector<int> full(g.num_players());
    full[i] = a_i;
    for (std::size_t p = 0; p < js.size(); ++p) full[js[p]] = opp[p];
    out.payoff[i][g.profile_index(full)] += g_bonus;
  }
  return out;
}

}  // namespace ssg
