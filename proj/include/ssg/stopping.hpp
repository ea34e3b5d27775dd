#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "ssg/belief.hpp"
#include "ssg/errors.hpp"
#include "ssg/lattice.hpp"

namespace ssg {

// One player's costly sampling problem: payoff matrix over (own action,
// observation symbol), a Dirichlet prior over the symbol distribution, and a
// per-observation cost.
struct StoppingProblem {
  std::vector<std::vector<double>> payoff;  // [own action][symbol]
  DirichletPrior prior;
  double cost = 0.0;
  // Tolerance scale; defaults to the matrix span but the game adapters set it
  // to the span of the full game so knife-edge classification is uniform.
  double scale = 0.0;

  int num_actions() const { return static_cast<int>(payoff.size()); }
  int symbols() const { return payoff.empty() ? 0 : static_cast<int>(payoff[0].size()); }

  double matrix_span() const {
    double lo = payoff[0][0], hi = payoff[0][0];
    for (const auto& row : payoff)
      for (double v : row) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    return hi - lo;
  }

  double span() const { return scale > 0.0 ? scale : std::max(matrix_span(), 0.0); }
  double eps_stop() const {
    const double s = span();
    return 1e-9 * (s > 0.0 ? s : 1.0);
  }

  void validate() const {
    if (payoff.empty() || payoff[0].empty()) throw DimensionError("empty payoff matrix", -1, -1);
    if (prior.size() != symbols())
      throw AlphabetError("prior alphabet does not match the payoff matrix");
    if (!(cost > 0.0)) throw DimensionError("observation cost must be positive", -1, -1);
  }

  double stop_value(const std::vector<double>& mean, int* best = nullptr,
                    std::uint32_t* tie_mask = nullptr) const {
    double bestv = -std::numeric_limits<double>::infinity();
    int besta = 0;
    for (int a = 0; a < num_actions(); ++a) {
      double v = 0.0;
      for (int y = 0; y < symbols(); ++y) v += mean[y] * payoff[a][y];
      if (v > bestv) {
        bestv = v;
        besta = a;
      }
    }
    if (best) *best = besta;
    if (tie_mask) {
      std::uint32_t mask = 0;
      const double eps = 1e-9 * (span() > 0.0 ? span() : 1.0);
      for (int a = 0; a < num_actions(); ++a) {
        double v = 0.0;
        for (int y = 0; y < symbols(); ++y) v += mean[y] * payoff[a][y];
        if (v >= bestv - eps) mask |= (1u << a);
      }
      *tie_mask = mask;
    }
    return bestv;
  }
};

// Binary-game summary: payoff difference of action 1 over action 0 as a
// function of the scalar mean, and the interior indifference point if any.
struct BinaryStructure {
  double d0 = 0.0;   // u(1,.) - u(0,.) at mean 0
  double d1 = 0.0;   // at mean 1
  bool increasing = false;
  std::optional<double> sigma_tilde;  // interior indifference point
  double gain_const = 0.0;            // |d1 - d0| * st * (1 - st)
};

inline BinaryStructure binary_structure(const StoppingProblem& p) {
  if (p.num_actions() != 2 || p.symbols() != 2)
    throw UnsupportedError("binary structure requires 2 actions and a binary alphabet");
  BinaryStructure s;
  s.d0 = p.payoff[1][0] - p.payoff[0][0];
  s.d1 = p.payoff[1][1] - p.payoff[0][1];
  s.increasing = s.d1 >= s.d0;
  if ((s.d0 < 0.0 && s.d1 > 0.0) || (s.d0 > 0.0 && s.d1 < 0.0)) {
    const double st = s.d0 / (s.d0 - s.d1);
    s.sigma_tilde = st;
    s.gain_const = std::fabs(s.d1 - s.d0) * st * (1.0 - st);
  }
  return s;
}

namespace detail {

// True if some action is (weakly) best against every symbol; then sampling
// has no value at any belief.
inline bool has_dominant_action(const StoppingProblem& p) {
  const double eps = p.eps_stop();
  for (int a = 0; a < p.num_actions(); ++a) {
    bool dominant = true;
    for (int y = 0; y < p.symbols() && dominant; ++y)
      for (int b = 0; b < p.num_actions(); ++b)
        if (p.payoff[b][y] > p.payoff[a][y] + eps) {
          dominant = false;
          break;
        }
    if (dominant) return true;
  }
  return false;
}

}  // namespace detail

// Depth beyond which stopping is optimal at every reachable belief.
//
// Binary 2-action case: closed form from the collapsing-boundary analysis.
// The one-step gain of a Beta belief with parameter sum s is at most
// K/(s+1) with K = |d1-d0| * st*(1-st), so sampling never pays once
// s >= K/c - 1; the count depth bounds the parameter sum from below.
//
// General alphabets: the one-step gain at depth t is at most
// 2L/(alpha0+t+1) where L is the largest per-action payoff span; the bound
// is decreasing, so once it drops below c the problem is monotone and
// stopping is optimal everywhere at and beyond that depth.
inline int horizon_bound(const StoppingProblem& p) {
  p.validate();
  if (detail::has_dominant_action(p)) return 0;
  if (p.num_actions() == 2 && p.symbols() == 2) {
    const BinaryStructure s = binary_structure(p);
    if (!s.sigma_tilde) return 0;
    const double raw = s.gain_const / p.cost - 1.0;
    return std::max(0, static_cast<int>(std::ceil(raw - 1e-9)));
  }
  double L = 0.0;
  for (int a = 0; a < p.num_actions(); ++a) {
    double lo = p.payoff[a][0], hi = p.payoff[a][0];
    for (int y = 0; y < p.symbols(); ++y) {
      lo = std::min(lo, p.payoff[a][y]);
      hi = std::max(hi, p.payoff[a][y]);
    }
    L = std::max(L, hi - lo);
  }
  if (L <= 0.0) return 0;
  const double raw = 2.0 * L / p.cost - p.prior.alpha0 - 1.0;
  return std::max(0, static_cast<int>(std::ceil(raw - 1e-9)));
}

enum class Decision : std::uint8_t { Continue = 0, Stop = 1 };

// Solved optimal-stopping policy on the count lattice.  Node ranks within a
// depth slice follow CountLattice ordering.
struct StoppingPolicy {
  std::vector<std::vector<double>> payoff;
  DirichletPrior prior;
  double cost = 0.0;
  double scale = 0.0;
  double eps_stop = 0.0;
  int horizon = 0;

  std::vector<std::vector<std::uint8_t>> decision;  // [t][node]
  std::vector<std::vector<std::int16_t>> chosen;    // [t][node], stop nodes
  bool has_values = false;
  std::vector<std::vector<double>> value;       // V
  std::vector<std::vector<double>> stop_value;  // v
  // The lowest-index tie-break can only bind at the root (depth >= 1 stops
  // have unique best responses); flagged so callers can surface it.
  bool root_tie = false;
  // Stops decided inside the eps_stop band around indifference between
  // stopping and continuing (knife-edge costs).
  std::int64_t knife_edge_stops = 0;

  int symbols() const { return payoff.empty() ? 0 : static_cast<int>(payoff[0].size()); }
  int num_actions() const { return static_cast<int>(payoff.size()); }
  CountLattice lattice() const { return CountLattice(symbols(), horizon); }

  bool stops(int t, std::int64_t node) const { return decision[t][node] != 0; }

  std::vector<double> node_mean(const std::vector<int>& counts) const {
    std::vector<double> m(symbols());
    double tot = prior.alpha0;
    for (int y = 0; y < symbols(); ++y) tot += counts[y];
    for (int y = 0; y < symbols(); ++y) m[y] = (prior.alpha[y] + counts[y]) / tot;
    return m;
  }

  // Stop-value and best-response data recomputed from counts (the tied set is
  // derived rather than stored).
  double node_stop_value(const std::vector<int>& counts, int* best = nullptr,
                         std::uint32_t* ties = nullptr) const {
    StoppingProblem p{payoff, prior, cost, scale};
    return p.stop_value(node_mean(counts), best, ties);
  }

  bool root_stops() const { return stops(0, 0); }
};

struct SolveOptions {
  bool keep_values = true;
  // Doubling self-check for the general-alphabet horizon bound: re-solve with
  // twice the horizon (streaming, values only) and require the same root
  // policy.  On by default exactly where the bound is heuristic.
  std::optional<bool> verify_horizon;
  bool myopic = false;  // stop on one-step lookahead of v instead of V
  // Solve on a deeper lattice than the bound requires (never shallower).
  std::optional<int> horizon_override;
};

inline SolveOptions no_value_tables() {
  SolveOptions o;
  o.keep_values = false;
  return o;
}

namespace detail {

// Streaming backward pass that returns only the root (decision, V, chosen).
struct RootInfo {
  Decision decision;
  double value;
  int chosen;
};

inline RootInfo solve_root_only(const StoppingProblem& p, int horizon, bool myopic) {
  const int m = p.symbols();
  CountLattice lat(m, horizon);
  const double eps = p.eps_stop();
  std::vector<double> next;  // V at depth t+1
  std::vector<double> cur;
  RootInfo out{Decision::Stop, 0.0, 0};
  std::vector<double> mean(m), mean2(m);
  std::vector<int> child;
  for (int t = horizon; t >= 0; --t) {
    cur.assign(static_cast<std::size_t>(lat.slice_size(t)), 0.0);
    std::vector<int> n = lat.first(t);
    std::int64_t node = 0;
    do {
      double tot = p.prior.alpha0 + t;
      for (int y = 0; y < m; ++y) mean[y] = (p.prior.alpha[y] + n[y]) / tot;
      int best = 0;
      const double v = p.stop_value(mean, &best);
      bool stop = true;
      double V = v;
      if (t < horizon) {
        double cont = -p.cost;
        child = n;
        for (int y = 0; y < m; ++y) {
          child[y] += 1;
          cont += mean[y] * next[lat.rank(child)];
          child[y] -= 1;
        }
        if (myopic) {
          double myo = -p.cost;
          // one-step lookahead of v only
          child = n;
          for (int y = 0; y < m; ++y) {
            child[y] += 1;
            const double tot2 = tot + 1.0;
            for (int z = 0; z < m; ++z) mean2[z] = (p.prior.alpha[z] + child[z]) / tot2;
            myo += mean[y] * p.stop_value(mean2);
            child[y] -= 1;
          }
          stop = myo <= v + eps;
        } else {
          stop = cont <= v + eps;
        }
        if (!stop) V = cont;
      }
      cur[node] = V;
      if (t == 0) out = RootInfo{stop ? Decision::Stop : Decision::Continue, V, best};
      ++node;
    } while (lat.next(n));
    next.swap(cur);
  }
  return out;
}

}  // namespace detail

// Backward recursion from the horizon to the root.  At each node the stop
// value is the best expected payoff at the posterior mean; the continuation
// value subtracts the cost from the predictive average of the children.  A
// node stops as soon as continuing does not strictly beat stopping by more
// than eps_stop (earliest optimal stopping).
inline StoppingPolicy solve(const StoppingProblem& p, const SolveOptions& opts = {}) {
  p.validate();
  int horizon = horizon_bound(p);
  if (opts.horizon_override) horizon = std::max(horizon, *opts.horizon_override);
  const int m = p.symbols();

  StoppingPolicy pol;
  pol.payoff = p.payoff;
  pol.prior = p.prior;
  pol.cost = p.cost;
  pol.scale = p.span();
  pol.eps_stop = p.eps_stop();
  pol.horizon = horizon;
  pol.has_values = opts.keep_values;
  pol.decision.resize(horizon + 1);
  pol.chosen.resize(horizon + 1);
  if (opts.keep_values) {
    pol.value.resize(horizon + 1);
    pol.stop_value.resize(horizon + 1);
  }

  CountLattice lat(m, horizon);
  const double eps = p.eps_stop();
  std::vector<double> next;
  std::vector<double> cur;
  std::vector<double> mean(m), mean2(m);
  std::vector<int> child;

  for (int t = horizon; t >= 0; --t) {
    const std::int64_t sz = lat.slice_size(t);
    cur.assign(static_cast<std::size_t>(sz), 0.0);
    pol.decision[t].assign(static_cast<std::size_t>(sz), 1);
    pol.chosen[t].assign(static_cast<std::size_t>(sz), 0);
    if (opts.keep_values) {
      pol.value[t].assign(static_cast<std::size_t>(sz), 0.0);
      pol.stop_value[t].assign(static_cast<std::size_t>(sz), 0.0);
    }
    std::vector<int> n = lat.first(t);
    std::int64_t node = 0;
    do {
      const double tot = p.prior.alpha0 + t;
      for (int y = 0; y < m; ++y) mean[y] = (p.prior.alpha[y] + n[y]) / tot;
      int best = 0;
      const double v = p.stop_value(mean, &best);
      bool stop = true;
      double V = v;
      if (t < horizon) {
        double cont = -p.cost;
        child = n;
        for (int y = 0; y < m; ++y) {
          child[y] += 1;
          cont += mean[y] * next[lat.rank(child)];
          child[y] -= 1;
        }
        if (opts.myopic) {
          double myo = -p.cost;
          child = n;
          for (int y = 0; y < m; ++y) {
            child[y] += 1;
            const double tot2 = tot + 1.0;
            for (int z = 0; z < m; ++z) mean2[z] = (p.prior.alpha[z] + child[z]) / tot2;
            myo += mean[y] * p.stop_value(mean2);
            child[y] -= 1;
          }
          stop = myo <= v + eps;
        } else {
          stop = cont <= v + eps;
        }
        if (stop && std::fabs(cont - v) <= eps) pol.knife_edge_stops += 1;
        if (!stop) V = cont;
      }
      cur[node] = V;
      pol.decision[t][node] = stop ? 1 : 0;
      pol.chosen[t][node] = static_cast<std::int16_t>(best);
      if (opts.keep_values) {
        pol.value[t][node] = V;
        pol.stop_value[t][node] = v;
      }
      ++node;
    } while (lat.next(n));
    next.swap(cur);
  }

  if (pol.decision[0][0] != 0) {
    std::uint32_t ties = 0;
    std::vector<int> root(m, 0);
    pol.node_stop_value(root, nullptr, &ties);
    pol.root_tie = (ties & (ties - 1)) != 0;
  }

  const bool general = !(p.num_actions() == 2 && m == 2);
  const bool verify =
      opts.verify_horizon.value_or(general && horizon > 0 && !opts.horizon_override);
  if (verify) {
    const auto doubled = detail::solve_root_only(p, 2 * horizon, opts.myopic);
    const bool root_stop = pol.decision[0][0] != 0;
    if ((doubled.decision == Decision::Stop) != root_stop ||
        (root_stop && doubled.chosen != pol.chosen[0][0])) {
      throw Error("horizon doubling self-check failed: root policy changed");
    }
  }
  return pol;
}

inline StoppingPolicy myopic_policy(const StoppingProblem& p, SolveOptions opts = {}) {
  opts.myopic = true;
  return solve(p, opts);
}

}  // namespace ssg
