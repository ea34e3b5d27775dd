#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ssg/equilibrium.hpp"
#include "ssg/game.hpp"

namespace ssg {

// Deterministic analogy partition: opponent profiles of player i are merged
// into observation classes; payoffs against a class are the arithmetic mean
// of the merged profiles and beliefs live on the class simplex.
struct AnalogyTransform {
  int player = 0;
  std::vector<int> partition;  // profile index -> class
  int classes = 0;
  std::vector<int> class_size;
  std::vector<std::vector<double>> payoff;  // coarsened [action][class]
};

inline AnalogyTransform analogy_transform(const Game& g, int i,
                                          const std::vector<int>& partition) {
  g.validate();
  const std::int64_t np = g.opp_profile_count(i);
  if (static_cast<std::int64_t>(partition.size()) != np)
    throw AlphabetError("partition must cover every opponent profile");
  AnalogyTransform out;
  out.player = i;
  out.partition = partition;
  int mx = -1;
  for (int z : partition) {
    if (z < 0) throw AlphabetError("negative class index");
    mx = std::max(mx, z);
  }
  out.classes = mx + 1;
  if (out.classes > np) throw AlphabetError("more classes than profiles");
  out.class_size.assign(out.classes, 0);
  for (int z : partition) out.class_size[z] += 1;
  for (int c = 0; c < out.classes; ++c)
    if (out.class_size[c] == 0)
      throw AlphabetError("partition not surjective: empty class " + std::to_string(c));

  out.payoff.assign(g.num_actions(i), std::vector<double>(out.classes, 0.0));
  for (int a = 0; a < g.num_actions(i); ++a)
    for (std::int64_t k = 0; k < np; ++k)
      out.payoff[a][partition[k]] +=
          g.payoff_vs_opp_profile(i, a, k) / static_cast<double>(out.class_size[partition[k]]);
  return out;
}

// Fixed-point conditions for an analogy-based expectation equilibrium of a
// game with per-player deterministic partitions: each player's support must
// best-respond to the class frequencies of the others, evaluated through the
// class-mean payoffs.
struct AbeeCheck {
  bool satisfied = false;
  double worst_gap = 0.0;  // optimality gap of the worst supported action
};

inline AbeeCheck abee_check(const Game& g, const std::vector<std::vector<int>>& partitions,
                            const MixedProfile& sigma, double tol = 0.05,
                            double support_eps = 1e-6) {
  sigma.validate(g);
  AbeeCheck out;
  out.worst_gap = 0.0;
  for (int i = 0; i < g.num_players(); ++i) {
    const bool identity = partitions.empty() || partitions[i].empty();
    const std::vector<int>* part = identity ? nullptr : &partitions[i];
    const std::int64_t np = g.opp_profile_count(i);

    const int classes = identity
                            ? static_cast<int>(np)
                            : 1 + *std::max_element(part->begin(), part->end());
    std::vector<double> q(classes, 0.0);
    const auto prof_dist = sigma.opp_profile_dist(g, i);
    std::vector<int> class_size(classes, 0);
    for (std::int64_t k = 0; k < np; ++k) {
      const int z = identity ? static_cast<int>(k) : (*part)[k];
      q[z] += prof_dist[k];
      class_size[z] += 1;
    }
    std::vector<double> vals(g.num_actions(i), 0.0);
    for (int a = 0; a < g.num_actions(i); ++a) {
      for (std::int64_t k = 0; k < np; ++k) {
        const int z = identity ? static_cast<int>(k) : (*part)[k];
        vals[a] += q[z] * g.payoff_vs_opp_profile(i, a, k) / class_size[z];
      }
    }
    const double best = *std::max_element(vals.begin(), vals.end());
    for (int a = 0; a < g.num_actions(i); ++a)
      if (sigma.dist[i][a] > support_eps) out.worst_gap = std::max(out.worst_gap, best - vals[a]);
  }
  out.satisfied = out.worst_gap <= tol;
  return out;
}

// Extended game whose players observe analogy classes; feeds the usual
// equilibrium machinery.
inline ExtendedGame analogy_extended_game(const Game& g,
                                          const std::vector<std::vector<int>>& partitions,
                                          const std::vector<DirichletPrior>& priors,
                                          const std::vector<double>& costs) {
  ExtendedGame ext;
  ext.game = g;
  ext.partitions = partitions;
  ext.priors = priors;
  ext.costs = costs;
  ext.validate();
  return ext;
}

}  // namespace ssg
