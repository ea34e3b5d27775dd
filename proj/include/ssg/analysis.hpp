#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ssg/boundaries.hpp"
#include "ssg/distributions.hpp"
#include "ssg/stopping.hpp"

namespace ssg {

// Executable monotone-comparative-statics reports.  A report stores the full
// grids it was computed from, so every verdict can be recomputed from the
// report alone.  Verdicts use weak inequalities with 1e-10 slack.
struct StaticsReport {
  std::string kind;                       // "payoff" | "prior" | "sigma"
  std::vector<double> params;             // bonus values / chain index / unused
  std::vector<double> sigma_grid;
  std::vector<int> t_grid;
  // cdf[param][sigma][t] = P(choose target and tau <= t)
  std::vector<std::vector<std::vector<double>>> cdf;
  // complementary family P(choose something else and tau <= t)
  std::vector<std::vector<std::vector<double>>> cdf_other;
  bool pass = false;
  double worst_violation = 0.0;

  static constexpr double kSlack = 1e-10;

  void finalize_monotone() {
    worst_violation = 0.0;
    for (std::size_t p = 0; p + 1 < cdf.size(); ++p)
      for (std::size_t s = 0; s < sigma_grid.size(); ++s)
        for (std::size_t t = 0; t < t_grid.size(); ++t) {
          worst_violation = std::max(worst_violation, cdf[p][s][t] - cdf[p + 1][s][t]);
          worst_violation =
              std::max(worst_violation, cdf_other[p + 1][s][t] - cdf_other[p][s][t]);
        }
    pass = worst_violation <= kSlack;
  }
};

namespace detail {

inline void tabulate(const StoppingPolicy& pol, int target_action,
                     const std::vector<std::vector<double>>& sigma_points,
                     const std::vector<int>& t_grid, std::vector<std::vector<double>>& cdf,
                     std::vector<std::vector<double>>& cdf_other) {
  cdf.clear();
  cdf_other.clear();
  for (const auto& s : sigma_points) {
    const ActionTimeDistribution d = joint_action_time(pol, s);
    std::vector<double> row, row_o;
    for (int t : t_grid) {
      double tgt = d.joint_cdf(target_action, t);
      double oth = 0.0;
      for (int a = 0; a < pol.num_actions(); ++a)
        if (a != target_action) oth += d.joint_cdf(a, t);
      row.push_back(tgt);
      row_o.push_back(oth);
    }
    cdf.push_back(row);
    cdf_other.push_back(row_o);
  }
}

inline std::vector<std::vector<double>> binary_points(const std::vector<double>& sigma_grid) {
  std::vector<std::vector<double>> pts;
  for (double s : sigma_grid) pts.push_back({1.0 - s, s});
  return pts;
}

}  // namespace detail

// Joint choice/time distributions across a rising constant bonus on one
// action: the target family must rise cellwise and the complementary family
// fall.  `sigma_points` are full distributions over the alphabet, so any
// finite action count and alphabet is covered.
inline StaticsReport comparative_statics_payoff(const StoppingProblem& base, int target_action,
                                                const std::vector<double>& bonus_grid,
                                                const std::vector<std::vector<double>>& sigma_points,
                                                const std::vector<int>& t_grid) {
  for (std::size_t k = 0; k + 1 < bonus_grid.size(); ++k)
    if (!(bonus_grid[k] <= bonus_grid[k + 1]) || bonus_grid[k] < 0.0)
      throw DimensionError("bonus grid must be nonnegative and nondecreasing", -1, -1);

  StaticsReport rep;
  rep.kind = "payoff";
  rep.params = bonus_grid;
  for (std::size_t k = 0; k < sigma_points.size(); ++k)
    rep.sigma_grid.push_back(static_cast<double>(k));
  rep.t_grid = t_grid;
  for (double g : bonus_grid) {
    StoppingProblem p = base;
    for (int y = 0; y < p.symbols(); ++y) p.payoff[target_action][y] += g;
    const StoppingPolicy pol = solve(p, no_value_tables());
    std::vector<std::vector<double>> cdf, cdf_other;
    detail::tabulate(pol, target_action, sigma_points, t_grid, cdf, cdf_other);
    rep.cdf.push_back(cdf);
    rep.cdf_other.push_back(cdf_other);
  }
  rep.finalize_monotone();
  return rep;
}

inline StaticsReport comparative_statics_payoff(const StoppingProblem& base, int target_action,
                                                const std::vector<double>& bonus_grid,
                                                const std::vector<double>& sigma_grid,
                                                const std::vector<int>& t_grid) {
  if (base.symbols() != 2)
    throw UnsupportedError("scalar sigma grids are for binary alphabets");
  StaticsReport rep = comparative_statics_payoff(base, target_action, bonus_grid,
                                                 detail::binary_points(sigma_grid), t_grid);
  rep.sigma_grid = sigma_grid;
  return rep;
}

// Same grids across a chain of Beta priors that must be ordered by strong
// stochastic dominance; target is the action optimal at mean 1.
inline StaticsReport comparative_statics_prior(const StoppingProblem& base,
                                               const std::vector<DirichletPrior>& chain,
                                               const std::vector<double>& sigma_grid,
                                               const std::vector<int>& t_grid) {
  if (base.num_actions() != 2 || base.symbols() != 2)
    throw UnsupportedError("prior statics require a binary action set and alphabet");
  for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
    const SsdOrder ord = ssd_compare(chain[k + 1], chain[k]);
    if (ord != SsdOrder::p_dominates && ord != SsdOrder::equal)
      throw DimensionError("prior chain not SSD-increasing at index " + std::to_string(k),
                           -1, static_cast<int>(k));
  }
  const BinaryStructure bs = binary_structure(base);
  const int target = bs.d1 > 0.0 ? 1 : 0;

  StaticsReport rep;
  rep.kind = "prior";
  rep.sigma_grid = sigma_grid;
  rep.t_grid = t_grid;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    rep.params.push_back(static_cast<double>(k));
    StoppingProblem p = base;
    p.prior = chain[k];
    const StoppingPolicy pol = solve(p, no_value_tables());
    std::vector<std::vector<double>> cdf, cdf_other;
    detail::tabulate(pol, target, detail::binary_points(sigma_grid), t_grid, cdf, cdf_other);
    rep.cdf.push_back(cdf);
    rep.cdf_other.push_back(cdf_other);
  }
  rep.finalize_monotone();
  return rep;
}

// Monotonicity in the true distribution itself: one policy, the joint CDF of
// the high action must rise in sigma cell by cell; additionally the exact
// polynomial representation is extracted (modest horizons) and its derivative
// checked nonnegative on [0,1).
inline StaticsReport comparative_statics_sigma(const StoppingProblem& base,
                                               const std::vector<double>& sigma_grid,
                                               const std::vector<int>& t_grid) {
  if (base.num_actions() != 2 || base.symbols() != 2)
    throw UnsupportedError("sigma statics require a binary action set and alphabet");
  const BinaryStructure bs = binary_structure(base);
  const int target = bs.d1 > 0.0 ? 1 : 0;
  const StoppingPolicy pol = solve(base, no_value_tables());

  StaticsReport rep;
  rep.kind = "sigma";
  rep.sigma_grid = sigma_grid;
  rep.t_grid = t_grid;
  rep.params = {0.0};
  std::vector<std::vector<double>> cdf, cdf_other;
  detail::tabulate(pol, target, detail::binary_points(sigma_grid), t_grid, cdf, cdf_other);
  rep.cdf.push_back(cdf);
  rep.cdf_other.push_back(cdf_other);

  // Monotonicity across the sigma axis at every t.
  rep.worst_violation = 0.0;
  for (std::size_t s = 0; s + 1 < sigma_grid.size(); ++s)
    for (std::size_t t = 0; t < t_grid.size(); ++t)
      rep.worst_violation = std::max(rep.worst_violation, cdf[s][t] - cdf[s + 1][t]);

  // Exact derivative nonnegativity via the dual-number pass on a fine grid.
  for (double x = 0.0; x < 1.0; x += 1e-2) {
    const JointDerivatives jd = joint_action_time_derivative(pol, x);
    for (int t : t_grid)
      rep.worst_violation = std::max(rep.worst_violation, -jd.joint_cdf_derivative(target, t));
  }
  // Polynomial route, when the horizon permits a stable expansion.
  if (pol.horizon <= 40) {
    const auto coeff = choice_polynomial(pol, target, pol.horizon);
    const auto dcoeff = polynomial_derivative(coeff);
    for (double x = 0.0; x < 1.0; x += 1e-3)
      rep.worst_violation = std::max(rep.worst_violation, -polynomial_eval(dcoeff, x));
  }
  rep.pass = rep.worst_violation <= StaticsReport::kSlack;
  return rep;
}

// ---------------------------------------------------------------------------
// Time-revealed indifference: longer decision times mean stopping beliefs
// closer to the indifference point.

struct TimeRevealedReport {
  std::vector<int> depths;                // depths with positive stop mass
  std::vector<double> mean_distance;      // E[|mean - sigma_tilde| | tau = t]
  std::vector<double> mass;               // P(tau = t)
  double rank_correlation = 0.0;          // weighted, expected negative
  bool monotone_pass = false;
};

inline TimeRevealedReport time_revealed_indifference(const StoppingPolicy& pol,
                                                     const std::vector<double>& sigma_true,
                                                     double sigma_tilde) {
  if (pol.symbols() != 2) throw UnsupportedError("time-revealed analysis requires binary alphabet");
  const auto atoms = stopping_belief_distribution(pol, sigma_true);

  TimeRevealedReport rep;
  std::vector<double> num(pol.horizon + 1, 0.0), den(pol.horizon + 1, 0.0);
  for (const auto& a : atoms) {
    den[a.depth] += a.prob;
    num[a.depth] += a.prob * std::fabs(a.mean[1] - sigma_tilde);
  }
  for (int t = 0; t <= pol.horizon; ++t) {
    if (den[t] > 0.0) {
      rep.depths.push_back(t);
      rep.mass.push_back(den[t]);
      rep.mean_distance.push_back(num[t] / den[t]);
    }
  }
  rep.monotone_pass = true;
  for (std::size_t k = 0; k + 1 < rep.mean_distance.size(); ++k)
    if (rep.mean_distance[k + 1] > rep.mean_distance[k] + 1e-10) rep.monotone_pass = false;

  // Weighted Spearman correlation between depth and distance over the atoms.
  if (atoms.size() >= 2) {
    auto weighted_ranks = [&](auto&& key) {
      std::vector<double> r(atoms.size(), 0.0);
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        double below = 0.0, equal = 0.0;
        for (std::size_t j = 0; j < atoms.size(); ++j) {
          const double ki = key(atoms[i]), kj = key(atoms[j]);
          if (kj < ki) below += atoms[j].prob;
          if (kj == ki) equal += atoms[j].prob;
        }
        r[i] = below + 0.5 * equal;
      }
      return r;
    };
    const auto rt = weighted_ranks([](const StoppingBeliefAtom& a) { return double(a.depth); });
    const auto rd = weighted_ranks([&](const StoppingBeliefAtom& a) {
      return std::fabs(a.mean[1] - sigma_tilde);
    });
    double W = 0.0, mt = 0.0, md = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      W += atoms[i].prob;
      mt += atoms[i].prob * rt[i];
      md += atoms[i].prob * rd[i];
    }
    mt /= W;
    md /= W;
    double cov = 0.0, vt = 0.0, vd = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      cov += atoms[i].prob * (rt[i] - mt) * (rd[i] - md);
      vt += atoms[i].prob * (rt[i] - mt) * (rt[i] - mt);
      vd += atoms[i].prob * (rd[i] - md) * (rd[i] - md);
    }
    rep.rank_correlation = (vt > 0.0 && vd > 0.0) ? cov / std::sqrt(vt * vd) : 0.0;
  }
  return rep;
}

}  // namespace ssg
