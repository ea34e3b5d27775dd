#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssg/distributions.hpp"
#include "ssg/game.hpp"
#include "ssg/rng.hpp"
#include "ssg/stopping.hpp"

namespace ssg {

// A normal-form game extended with per-player sampling primitives: a
// full-support Dirichlet prior over the observation alphabet and a positive
// per-observation cost.  The observation alphabet of player i is their
// opponent-profile alphabet, optionally coarsened by a surjective partition
// (observation classes); the default is the identity.
struct ExtendedGame {
  Game game;
  std::vector<DirichletPrior> priors;  // per player, over their alphabet
  std::vector<double> costs;
  std::vector<std::vector<int>> partitions;  // per player, profile -> class; empty = identity

  int alphabet_size(int i) const {
    if (!partitions.empty() && !partitions[i].empty()) {
      int mx = 0;
      for (int z : partitions[i]) mx = std::max(mx, z);
      return mx + 1;
    }
    return static_cast<int>(game.opp_profile_count(i));
  }

  // Symbol of an opponent-profile index.
  int symbol_of(int i, std::int64_t profile) const {
    if (!partitions.empty() && !partitions[i].empty())
      return partitions[i][static_cast<std::size_t>(profile)];
    return static_cast<int>(profile);
  }

  void validate() const {
    game.validate();
    const int n = game.num_players();
    if (static_cast<int>(priors.size()) != n || static_cast<int>(costs.size()) != n)
      throw DimensionError("priors/costs must cover every player", -1, -1);
    for (int i = 0; i < n; ++i) {
      if (!(costs[i] > 0.0))
        throw DimensionError("sampling cost must be positive for " + game.roles[i], i, -1);
      if (priors[i].size() != alphabet_size(i))
        throw AlphabetError("prior alphabet mismatch for " + game.roles[i]);
      if (!partitions.empty() && !partitions[i].empty()) {
        if (static_cast<std::int64_t>(partitions[i].size()) != game.opp_profile_count(i))
          throw AlphabetError("partition does not cover the opponent profiles of " +
                              game.roles[i]);
        std::vector<bool> hit(alphabet_size(i), false);
        for (int z : partitions[i]) {
          if (z < 0) throw AlphabetError("negative class index");
          hit[z] = true;
        }
        for (bool h : hit)
          if (!h) throw AlphabetError("partition not surjective for " + game.roles[i]);
      }
    }
  }

  // Player i's stopping problem.  With a partition, payoffs against a class
  // are the arithmetic mean of the merged opponent profiles.
  StoppingProblem player_problem(int i) const {
    StoppingProblem p;
    const int ns = alphabet_size(i);
    const std::int64_t np = game.opp_profile_count(i);
    p.payoff.assign(game.num_actions(i), std::vector<double>(ns, 0.0));
    std::vector<int> class_size(ns, 0);
    for (std::int64_t k = 0; k < np; ++k) class_size[symbol_of(i, k)] += 1;
    for (int a = 0; a < game.num_actions(i); ++a)
      for (std::int64_t k = 0; k < np; ++k)
        p.payoff[a][symbol_of(i, k)] += game.payoff_vs_opp_profile(i, a, k) /
                                        static_cast<double>(class_size[symbol_of(i, k)]);
    p.prior = priors[i];
    p.cost = costs[i];
    p.scale = game.payoff_span();
    return p;
  }

  ExtendedGame with_costs(double c) const {
    ExtendedGame out = *this;
    for (double& v : out.costs) v = c;
    return out;
  }

  // Distribution over player i's observation alphabet induced by the
  // opponents' mixed strategies (product over opponents, then class sums).
  std::vector<double> symbol_dist(int i, const MixedProfile& s) const {
    const auto q = s.opp_profile_dist(game, i);
    std::vector<double> out(alphabet_size(i), 0.0);
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(q.size()); ++k)
      out[symbol_of(i, k)] += q[k];
    return out;
  }
};

// Immutable bundle of solved policies for an extended game; the best-response
// map evaluates forward passes against them.
class Solver {
 public:
  explicit Solver(ExtendedGame ext, bool keep_values = false, bool myopic = false)
      : ext_(std::move(ext)) {
    ext_.validate();
    SolveOptions opts;
    opts.keep_values = keep_values;
    opts.myopic = myopic;
    for (int i = 0; i < ext_.game.num_players(); ++i)
      policies_.push_back(solve(ext_.player_problem(i), opts));
  }

  const ExtendedGame& ext() const { return ext_; }
  const StoppingPolicy& policy(int i) const { return policies_[i]; }

  // b_i: opponents' action distributions -> player i's action distribution.
  std::vector<double> best_response_map(int i, const MixedProfile& sigma) const {
    return action_distribution(policies_[i], ext_.symbol_dist(i, sigma));
  }

  MixedProfile apply_b(const MixedProfile& sigma) const {
    MixedProfile out = sigma;
    for (int i = 0; i < ext_.game.num_players(); ++i) out.dist[i] = best_response_map(i, sigma);
    return out;
  }

  double residual(const MixedProfile& sigma) const {
    const MixedProfile b = apply_b(sigma);
    double r = 0.0;
    for (std::size_t i = 0; i < sigma.dist.size(); ++i)
      for (std::size_t a = 0; a < sigma.dist[i].size(); ++a)
        r = std::max(r, std::fabs(b.dist[i][a] - sigma.dist[i][a]));
    return r;
  }

  MixedProfile prior_mean_profile() const {
    // Marginal prior means mapped back onto own-action spaces are not well
    // defined in general, so the default start is uniform.
    return uniform_profile(ext_.game);
  }

 private:
  ExtendedGame ext_;
  std::vector<StoppingPolicy> policies_;
};

struct EquilibriumResult {
  MixedProfile sigma;
  double residual = 0.0;
  std::string status;  // "converged" | "max_iter"
  std::string method;  // "bisection" | "damped"
  int iterations = 0;
  std::vector<double> root_candidates;  // 2x2 composed-map roots (P of action 1)
  std::vector<ActionTimeDistribution> joint;                 // per player at sigma
  std::vector<std::vector<StoppingBeliefAtom>> stop_beliefs;  // per player at sigma
};

namespace detail {

// Forward passes conserve mass only to rounding; iterating b amplifies a
// sub-stochastic drift exponentially (the deficit compounds once per
// observation), so every iterate is projected back onto the simplex.
inline void renormalize(MixedProfile& s) {
  for (auto& d : s.dist) {
    double sum = 0.0;
    for (double v : d) sum += v;
    if (sum > 0.0)
      for (double& v : d) v /= sum;
  }
}

// Composed best-response map for 2x2 games: x = P(player 0 plays action 1).
inline double composed_map(const Solver& sv, double x) {
  const auto& g = sv.ext().game;
  MixedProfile s = uniform_profile(g);
  s.dist[0] = {1.0 - x, x};
  const auto b1 = sv.best_response_map(1, s);
  s.dist[1] = b1;
  const auto b0 = sv.best_response_map(0, s);
  return b0[1];
}

inline void attach_distributions(const Solver& sv, EquilibriumResult& res) {
  const int n = sv.ext().game.num_players();
  for (int i = 0; i < n; ++i) {
    const auto q = sv.ext().symbol_dist(i, res.sigma);
    res.joint.push_back(joint_action_time(sv.policy(i), q));
    res.stop_beliefs.push_back(stopping_belief_distribution(sv.policy(i), q));
  }
}

inline EquilibriumResult solve_damped(const Solver& sv, MixedProfile sigma, double tol,
                                      int max_iter) {
  EquilibriumResult res;
  res.method = "damped";
  double lambda = 0.5;
  double prev_res = std::numeric_limits<double>::infinity();
  MixedProfile avg = sigma;  // Cesaro accumulator
  int avg_count = 1;
  bool cesaro = false;
  for (int it = 1; it <= max_iter; ++it) {
    const MixedProfile b = sv.apply_b(sigma);
    double r = 0.0;
    for (std::size_t i = 0; i < sigma.dist.size(); ++i)
      for (std::size_t a = 0; a < sigma.dist[i].size(); ++a)
        r = std::max(r, std::fabs(b.dist[i][a] - sigma.dist[i][a]));
    if (r <= tol) {
      res.sigma = sigma;
      res.residual = r;
      res.status = "converged";
      res.iterations = it;
      return res;
    }
    if (r > prev_res * (1.0 + 1e-12)) lambda = std::max(lambda * 0.5, 1.0 / 64.0);
    prev_res = r;
    // Cesaro fallback for oscillatory orbits in the second half of the budget.
    if (!cesaro && it > max_iter / 2) cesaro = true;
    for (std::size_t i = 0; i < sigma.dist.size(); ++i)
      for (std::size_t a = 0; a < sigma.dist[i].size(); ++a)
        sigma.dist[i][a] = (1.0 - lambda) * sigma.dist[i][a] + lambda * b.dist[i][a];
    renormalize(sigma);
    if (cesaro) {
      ++avg_count;
      for (std::size_t i = 0; i < sigma.dist.size(); ++i)
        for (std::size_t a = 0; a < sigma.dist[i].size(); ++a)
          avg.dist[i][a] += (sigma.dist[i][a] - avg.dist[i][a]) / avg_count;
    } else {
      avg = sigma;
      avg_count = 1;
    }
  }
  // Report the better of the last iterate and the Cesaro mean.
  const double r_last = sv.residual(sigma);
  const double r_avg = sv.residual(avg);
  if (r_avg < r_last) sigma = avg;
  res.sigma = sigma;
  res.residual = std::min(r_avg, r_last);
  res.status = res.residual <= tol ? "converged" : "max_iter";
  res.iterations = max_iter;
  return res;
}

}  // namespace detail

// Sequential sampling equilibrium: sigma with b(sigma) = sigma.  2x2 games
// use the monotone composed map and bisection; everything else runs a damped
// iteration with a Cesaro fallback.  Non-convergence is reported in the
// status, never silently.
inline EquilibriumResult sse_solve(const Solver& sv, const std::string& method = "auto",
                                   double tol = 1e-8, int max_iter = 10000,
                                   std::optional<MixedProfile> start = std::nullopt,
                                   bool attach = true) {
  const auto& g = sv.ext().game;
  const bool is_2x2 = g.num_players() == 2 && g.num_actions(0) == 2 && g.num_actions(1) == 2;
  std::string m = method;
  if (m == "auto") m = is_2x2 ? "bisection" : "damped";
  if (m == "bisection" && !is_2x2)
    throw UnsupportedError("bisection requires a 2-player 2-action game");

  EquilibriumResult res;
  if (m == "bisection") {
    // Bracket every root of f(x) - x on a scan grid, bisect each bracket.
    const int kGrid = 100;
    std::vector<double> xs(kGrid + 1), gs(kGrid + 1);
    for (int k = 0; k <= kGrid; ++k) {
      xs[k] = static_cast<double>(k) / kGrid;
      gs[k] = detail::composed_map(sv, xs[k]) - xs[k];
    }
    std::vector<double> roots;
    for (int k = 0; k <= kGrid; ++k)
      if (std::fabs(gs[k]) < 1e-13) roots.push_back(xs[k]);
    for (int k = 0; k < kGrid; ++k) {
      if (gs[k] == 0.0 || gs[k + 1] == 0.0) continue;
      if ((gs[k] > 0.0) != (gs[k + 1] > 0.0)) {
        double lo = xs[k], hi = xs[k + 1];
        double glo = gs[k];
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double gm = detail::composed_map(sv, mid) - mid;
          if ((gm > 0.0) == (glo > 0.0)) {
            lo = mid;
            glo = gm;
          } else {
            hi = mid;
          }
        }
        roots.push_back(0.5 * (lo + hi));
      }
    }
    if (roots.empty()) roots.push_back(0.5);  // cannot happen: f maps [0,1] into itself
    // Deduplicate.
    std::sort(roots.begin(), roots.end());
    std::vector<double> uniq;
    for (double r : roots)
      if (uniq.empty() || r - uniq.back() > 1e-9) uniq.push_back(r);
    res.root_candidates = uniq;
    // Choose the root nearest to a short damped orbit from the start point
    // (keeps basins meaningful when several equilibria exist).
    double pick = uniq.front();
    if (uniq.size() > 1) {
      MixedProfile s0 = start.value_or(sv.prior_mean_profile());
      const EquilibriumResult probe = detail::solve_damped(sv, s0, 1e-4, 300);
      const double target = probe.sigma.dist[0][1];
      double bestd = std::numeric_limits<double>::infinity();
      for (double r : uniq) {
        if (std::fabs(r - target) < bestd) {
          bestd = std::fabs(r - target);
          pick = r;
        }
      }
    }
    MixedProfile s = uniform_profile(g);
    s.dist[0] = {1.0 - pick, pick};
    s.dist[1] = sv.best_response_map(1, s);
    res.sigma = s;
    res.residual = sv.residual(s);
    res.method = "bisection";
    res.iterations = static_cast<int>(uniq.size());
    res.status = res.residual <= tol ? "converged" : "max_iter";
  } else {
    MixedProfile s0 = start.value_or(sv.prior_mean_profile());
    res = detail::solve_damped(sv, s0, tol, max_iter);
  }
  if (attach) detail::attach_distributions(sv, res);
  return res;
}

inline EquilibriumResult sse_solve(const ExtendedGame& ext, const std::string& method = "auto",
                                   double tol = 1e-8, int max_iter = 10000) {
  Solver sv(ext);
  return sse_solve(sv, method, tol, max_iter);
}

// ---------------------------------------------------------------------------
// Dynamic sequential sampling processes.

struct DynamicsTrace {
  std::string variant;
  std::uint64_t seed = 0;
  std::vector<MixedProfile> sigmas;     // sigma^0 ... sigma^N
  std::vector<double> residuals;        // ||b(sigma^n) - sigma^n||_inf per step
};

struct DynamicsVariant {
  std::string kind = "cesaro";  // "cesaro" | "exponential" | "finite_population"
  double beta = 0.9;            // exponential discount
  int population = 1;           // agents per role per period
  std::uint64_t seed = 0;
};

inline DynamicsTrace dynamics_run(const Solver& sv, const MixedProfile& sigma0,
                                  const DynamicsVariant& variant, int steps,
                                  bool keep_path = true) {
  sigma0.validate(sv.ext().game);
  if (variant.kind == "exponential" && !(variant.beta > 0.0 && variant.beta < 1.0))
    throw DimensionError("exponential discount beta must lie in (0,1)", -1, -1);
  if (variant.kind == "finite_population" && variant.population < 1)
    throw DimensionError("population size must be >= 1", -1, -1);

  DynamicsTrace trace;
  trace.variant = variant.kind;
  trace.seed = variant.seed;
  SplitMix64 rng(variant.seed);

  MixedProfile sigma = sigma0;
  if (keep_path) trace.sigmas.push_back(sigma);
  const int n = sv.ext().game.num_players();
  for (int step = 1; step <= steps; ++step) {
    const MixedProfile b = sv.apply_b(sigma);
    double r = 0.0;
    for (int i = 0; i < n; ++i)
      for (std::size_t a = 0; a < sigma.dist[i].size(); ++a)
        r = std::max(r, std::fabs(b.dist[i][a] - sigma.dist[i][a]));
    trace.residuals.push_back(r);

    if (variant.kind == "cesaro") {
      const double w = 1.0 / (step + 1.0);
      for (int i = 0; i < n; ++i)
        for (std::size_t a = 0; a < sigma.dist[i].size(); ++a)
          sigma.dist[i][a] = w * b.dist[i][a] + (1.0 - w) * sigma.dist[i][a];
    } else if (variant.kind == "exponential") {
      for (int i = 0; i < n; ++i)
        for (std::size_t a = 0; a < sigma.dist[i].size(); ++a)
          sigma.dist[i][a] =
              variant.beta * sigma.dist[i][a] + (1.0 - variant.beta) * b.dist[i][a];
    } else if (variant.kind == "finite_population") {
      // Each period a finite population per role draws actions from b; the
      // empirical frequency of the period enters the running average.
      const double w = 1.0 / (step + 1.0);
      for (int i = 0; i < n; ++i) {
        std::vector<double> freq(sigma.dist[i].size(), 0.0);
        for (int k = 0; k < variant.population; ++k)
          freq[rng.sample(b.dist[i])] += 1.0 / variant.population;
        for (std::size_t a = 0; a < sigma.dist[i].size(); ++a)
          sigma.dist[i][a] = w * freq[a] + (1.0 - w) * sigma.dist[i][a];
      }
    } else {
      throw UnsupportedError("unknown dynamics variant: " + variant.kind);
    }
    detail::renormalize(sigma);
    if (keep_path) trace.sigmas.push_back(sigma);
  }
  if (!keep_path) trace.sigmas.push_back(sigma);
  return trace;
}

// ---------------------------------------------------------------------------
// Local stability of the continuous-time best-response dynamics at a fixed
// point of a 2x2 extended game.  The Jacobian is [[-1, b0'], [b1', -1]] with
// eigenvalues -1 +- sqrt(b0' b1').

struct StabilityReport {
  double b0_prime = 0.0;  // exact polynomial derivative
  double b1_prime = 0.0;
  double b0_prime_fd = 0.0;  // central differences, cross-check
  double b1_prime_fd = 0.0;
  std::complex<double> eig1, eig2;
  bool stable = false;
  bool boundary = false;  // fixed point on the simplex boundary
};

inline StabilityReport stability_check(const Solver& sv, const MixedProfile& sigma_star,
                                       double h = 1e-4) {
  const auto& g = sv.ext().game;
  if (g.num_players() != 2 || g.num_actions(0) != 2 || g.num_actions(1) != 2)
    throw UnsupportedError("stability_check requires a 2-player 2-action game");
  StabilityReport rep;
  const double x1 = sigma_star.dist[1][1];  // opponent prob feeding player 0
  const double x0 = sigma_star.dist[0][1];

  rep.boundary = x0 < 1e-9 || x0 > 1.0 - 1e-9 || x1 < 1e-9 || x1 > 1.0 - 1e-9;

  rep.b0_prime = action_distribution_derivative(sv.policy(0), x1).dprob[1];
  rep.b1_prime = action_distribution_derivative(sv.policy(1), x0).dprob[1];

  auto b_scalar = [&](int i, double x) {
    const std::vector<double> q{1.0 - x, x};
    return action_distribution(sv.policy(i), q)[1];
  };
  auto fd = [&](int i, double x) {
    const double lo = std::max(0.0, x - h), hi = std::min(1.0, x + h);
    return (b_scalar(i, hi) - b_scalar(i, lo)) / (hi - lo);
  };
  rep.b0_prime_fd = fd(0, x1);
  rep.b1_prime_fd = fd(1, x0);

  const double prod = rep.b0_prime * rep.b1_prime;
  const std::complex<double> root = std::sqrt(std::complex<double>(prod, 0.0));
  rep.eig1 = std::complex<double>(-1.0, 0.0) + root;
  rep.eig2 = std::complex<double>(-1.0, 0.0) - root;
  rep.stable = std::max(rep.eig1.real(), rep.eig2.real()) < 0.0;
  return rep;
}

}  // namespace ssg
