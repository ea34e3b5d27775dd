#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ssg/belief.hpp"
#include "ssg/distributions.hpp"
#include "ssg/lattice.hpp"
#include "ssg/stopping.hpp"

namespace ssg {

// Probe for non-existence under misspecified (finite-support) priors.  The
// player continues for sure wherever the one-step gain exceeds the cost, and
// stops for sure wherever even the full-information gain is below it; in the
// residual band stopping is assumed, so for non-degenerate true distributions
// the reported stopping mass is a lower bound (flagged).  On absorbing
// deterministic paths the classification is exact.
struct MisspecReport {
  std::vector<double> true_sigma;
  double never_stop_mass = 0.0;   // mass still sampling at the probe depth
  double stop_mass = 0.0;         // mass classified as stopped within the probe
  bool lower_bound = false;       // some mass stopped only by assumption
  int probe_depth = 0;

  double root_stop_value = 0.0;      // v at the prior
  double root_expected_value = 0.0;  // E[v(posterior)] one step ahead
  double root_gain = 0.0;            // the myopic gain at the prior
  std::vector<double> gain_trace;    // gain along the deterministic path, if any
};

namespace detail {

struct FiniteBeliefEval {
  double v = 0.0;        // stop value
  double expected_v = 0.0;  // E[v(posterior after one observation)]
  double full_info = 0.0;   // E[max_a u(a, atom)] under the posterior
  std::vector<double> predictive;
};

// Posterior of a finite-support prior given observation counts, and the
// one-step quantities at that belief.
inline FiniteBeliefEval eval_finite_belief(const std::vector<std::vector<double>>& payoff,
                                           const FiniteSupportPrior& prior,
                                           const std::vector<int>& counts) {
  const int m = static_cast<int>(prior.alphabet_size());
  const int na = static_cast<int>(payoff.size());
  const std::size_t J = prior.atoms.size();

  std::vector<double> w(J, 0.0);
  double z = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    double lw = prior.weights[j];
    for (int y = 0; y < m; ++y)
      for (int k = 0; k < counts[y]; ++k) lw *= prior.atoms[j][y];
    w[j] = lw;
    z += lw;
  }
  if (z <= 0.0) throw ZeroLikelihoodError("posterior undefined: zero likelihood counts");
  for (double& x : w) x /= z;

  auto value_at = [&](const std::vector<double>& weights) {
    std::vector<double> mean(m, 0.0);
    for (std::size_t j = 0; j < J; ++j)
      for (int y = 0; y < m; ++y) mean[y] += weights[j] * prior.atoms[j][y];
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < na; ++a) {
      double v = 0.0;
      for (int y = 0; y < m; ++y) v += mean[y] * payoff[a][y];
      best = std::max(best, v);
    }
    return best;
  };

  FiniteBeliefEval out;
  out.v = value_at(w);
  out.predictive.assign(m, 0.0);
  for (std::size_t j = 0; j < J; ++j)
    for (int y = 0; y < m; ++y) out.predictive[y] += w[j] * prior.atoms[j][y];
  out.expected_v = 0.0;
  for (int y = 0; y < m; ++y) {
    if (out.predictive[y] <= 0.0) continue;
    std::vector<double> wy(J);
    double zy = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      wy[j] = w[j] * prior.atoms[j][y];
      zy += wy[j];
    }
    for (double& x : wy) x /= zy;
    out.expected_v += out.predictive[y] * value_at(wy);
  }
  out.full_info = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < na; ++a) {
      double v = 0.0;
      for (int y = 0; y < m; ++y) v += prior.atoms[j][y] * payoff[a][y];
      best = std::max(best, v);
    }
    out.full_info += w[j] * best;
  }
  return out;
}

}  // namespace detail

inline MisspecReport misspec_detector(const std::vector<std::vector<double>>& payoff,
                                      const FiniteSupportPrior& prior, double cost,
                                      const std::vector<double>& true_sigma, int probe_depth) {
  prior.validate();
  const int m = prior.alphabet_size();
  if (static_cast<int>(true_sigma.size()) != m)
    throw AlphabetError("true distribution length does not match the atom alphabet");

  MisspecReport rep;
  rep.true_sigma = true_sigma;
  rep.probe_depth = probe_depth;

  double span = 0.0;
  {
    double lo = payoff[0][0], hi = payoff[0][0];
    for (const auto& row : payoff)
      for (double v : row) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    span = hi - lo;
  }
  const double eps = 1e-9 * (span > 0.0 ? span : 1.0);

  {
    const auto root = detail::eval_finite_belief(payoff, prior, std::vector<int>(m, 0));
    rep.root_stop_value = root.v;
    rep.root_expected_value = root.expected_v;
    rep.root_gain = root.expected_v - root.v;
  }

  // Counts are sufficient for the posterior (exchangeable likelihoods), so
  // the probe walks the count lattice instead of the sequence tree.
  CountLattice lat(m, probe_depth);
  std::vector<double> w{1.0}, wnext;
  std::vector<int> child;

  // Deterministic absorbing path for the gain trace.
  int det_symbol = -1;
  for (int y = 0; y < m; ++y)
    if (true_sigma[y] == 1.0) det_symbol = y;

  for (int t = 0; t <= probe_depth; ++t) {
    if (t < probe_depth) wnext.assign(static_cast<std::size_t>(lat.slice_size(t + 1)), 0.0);
    std::vector<int> n = lat.first(t);
    std::int64_t node = 0;
    do {
      const double weight = w[node];
      if (weight > 0.0) {
        bool evaluate_trace = false;
        if (det_symbol >= 0 && n[det_symbol] == t) evaluate_trace = true;
        detail::FiniteBeliefEval ev;
        bool have_ev = false;
        auto ensure_ev = [&] {
          if (!have_ev) {
            ev = detail::eval_finite_belief(payoff, prior, n);
            have_ev = true;
          }
        };
        ensure_ev();
        if (evaluate_trace && t < probe_depth) rep.gain_trace.push_back(ev.expected_v - ev.v);

        const bool surely_continue = ev.expected_v - ev.v > cost + eps;
        const bool surely_stop = ev.full_info - ev.v <= cost + eps;
        if (t == probe_depth) {
          if (surely_continue)
            rep.never_stop_mass += weight;
          else
            rep.stop_mass += weight;  // stopped at or before the probe depth
          if (!surely_continue && !surely_stop) rep.lower_bound = true;
        } else if (surely_continue) {
          child = n;
          for (int y = 0; y < m; ++y) {
            if (true_sigma[y] > 0.0) {
              child[y] += 1;
              wnext[lat.rank(child)] += weight * true_sigma[y];
              child[y] -= 1;
            }
          }
        } else {
          rep.stop_mass += weight;
          if (!surely_stop) rep.lower_bound = true;
        }
      }
      ++node;
    } while (lat.next(n));
    if (t < probe_depth) w.swap(wnext);
  }
  return rep;
}

// Control probe: with a full-support Dirichlet prior the horizon bound makes
// absorption certain, so the never-stop mass is exactly zero for any true
// distribution.
inline MisspecReport misspec_probe_dirichlet(const std::vector<std::vector<double>>& payoff,
                                             const DirichletPrior& prior, double cost,
                                             const std::vector<double>& true_sigma) {
  StoppingProblem p{payoff, prior, cost, 0.0};
  const StoppingPolicy pol = solve(p, no_value_tables());
  const ActionTimeDistribution d = joint_action_time(pol, true_sigma);
  MisspecReport rep;
  rep.true_sigma = true_sigma;
  rep.probe_depth = pol.horizon;
  rep.stop_mass = d.total_mass();
  rep.never_stop_mass = std::max(0.0, 1.0 - rep.stop_mass);
  return rep;
}

}  // namespace ssg
