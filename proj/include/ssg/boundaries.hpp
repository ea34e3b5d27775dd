#pragma once

#include <cmath>
#include <vector>

#include "ssg/stopping.hpp"

namespace ssg {

// Collapsing stopping boundaries for binary problems with Beta beliefs.  The
// curve is parametrized by the Beta parameter sum s (the decision-time axis):
// a belief with parameter sum s and mean sigma continues iff
// sigma in (lower(s), upper(s)); the thresholds collapse to the indifference
// point at the horizon.
struct Boundaries {
  double sigma_tilde = 0.0;
  int horizon = 0;
  std::vector<double> lower;  // [s], s = 0..horizon
  std::vector<double> upper;
};

namespace detail {

// Root decision for the Beta belief with mean sigma and parameter sum s:
// does the player stop, and which action would they take?  Streaming solve,
// nothing stored.
struct RootStop {
  bool stops = false;
  int choice = 0;
};

inline RootStop beta_root_decision(const StoppingProblem& base, double sigma, double s) {
  const BinaryStructure bs = binary_structure(base);
  StoppingProblem p = base;
  const double ssafe = std::max(s, 1e-9);
  const double lo = 1e-12;
  const double sg = std::min(std::max(sigma, lo), 1.0 - lo);
  p.prior = DirichletPrior({ssafe * (1.0 - sg), ssafe * sg});
  // Remaining horizon in observation depth: stopping is guaranteed once the
  // parameter sum reaches K/c - 1.
  int rem = 0;
  if (bs.sigma_tilde) {
    const double raw = bs.gain_const / p.cost - 1.0 - ssafe;
    rem = std::max(0, static_cast<int>(std::ceil(raw - 1e-9)));
  }
  const auto root = detail::solve_root_only(p, rem, false);
  return {root.decision == Decision::Stop, root.chosen};
}

}  // namespace detail

// Threshold scan.  For each parameter sum the stop-and-choose-high region is
// an upper interval of means and the stop-and-choose-low region a lower
// interval, so both thresholds are found by bisection.
inline Boundaries boundaries(const StoppingProblem& p, double mean_resolution = 1e-6) {
  p.validate();
  if (p.num_actions() != 2 || p.symbols() != 2)
    throw UnsupportedError("boundaries require a binary action set and alphabet");
  const BinaryStructure bs = binary_structure(p);
  if (!bs.sigma_tilde) throw UnsupportedError("no indifference point; boundaries undefined");

  Boundaries out;
  out.sigma_tilde = *bs.sigma_tilde;
  out.horizon = horizon_bound(p);
  out.lower.assign(out.horizon + 1, out.sigma_tilde);
  out.upper.assign(out.horizon + 1, out.sigma_tilde);

  // Action chosen in the high-mean stop region (the one optimal at mean 1).
  const int high_action = bs.d1 > 0.0 ? 1 : 0;

  for (int s = 0; s <= out.horizon; ++s) {
    // Upper threshold: smallest mean that stops choosing the high action.
    {
      double lo = out.sigma_tilde, hi = 1.0;
      const auto at_hi = detail::beta_root_decision(p, hi, s);
      if (!(at_hi.stops && at_hi.choice == high_action)) {
        out.upper[s] = 1.0;
      } else {
        const auto at_lo = detail::beta_root_decision(p, lo, s);
        if (at_lo.stops) {
          out.upper[s] = out.sigma_tilde;
        } else {
          while (hi - lo > mean_resolution) {
            const double mid = 0.5 * (lo + hi);
            const auto d = detail::beta_root_decision(p, mid, s);
            if (d.stops && d.choice == high_action)
              hi = mid;
            else
              lo = mid;
          }
          out.upper[s] = hi;
        }
      }
    }
    // Lower threshold: largest mean that stops choosing the low action.
    {
      double lo = 0.0, hi = out.sigma_tilde;
      const auto at_lo = detail::beta_root_decision(p, lo, s);
      if (!(at_lo.stops && at_lo.choice == (1 - high_action))) {
        out.lower[s] = 0.0;
      } else {
        const auto at_hi = detail::beta_root_decision(p, hi, s);
        if (at_hi.stops) {
          out.lower[s] = out.sigma_tilde;
        } else {
          while (hi - lo > mean_resolution) {
            const double mid = 0.5 * (lo + hi);
            const auto d = detail::beta_root_decision(p, mid, s);
            if (d.stops && d.choice == (1 - high_action))
              lo = mid;
            else
              hi = mid;
          }
          out.lower[s] = lo;
        }
      }
    }
  }
  return out;
}

// Boundary pair at an arbitrary real parameter sum (used to check deposited
// stopping beliefs against the continuation region at their depth).
inline std::pair<double, double> boundaries_at(const StoppingProblem& p, double s,
                                               double mean_resolution = 1e-6) {
  const BinaryStructure bs = binary_structure(p);
  if (!bs.sigma_tilde) throw UnsupportedError("no indifference point; boundaries undefined");
  const double st = *bs.sigma_tilde;
  const int high_action = bs.d1 > 0.0 ? 1 : 0;

  double up = st;
  {
    double lo = st, hi = 1.0;
    const auto at_hi = detail::beta_root_decision(p, hi, s);
    if (!(at_hi.stops && at_hi.choice == high_action)) {
      up = 1.0;
    } else if (detail::beta_root_decision(p, lo, s).stops) {
      up = st;
    } else {
      while (hi - lo > mean_resolution) {
        const double mid = 0.5 * (lo + hi);
        const auto d = detail::beta_root_decision(p, mid, s);
        if (d.stops && d.choice == high_action)
          hi = mid;
        else
          lo = mid;
      }
      up = hi;
    }
  }
  double low = st;
  {
    double lo = 0.0, hi = st;
    const auto at_lo = detail::beta_root_decision(p, lo, s);
    if (!(at_lo.stops && at_lo.choice == (1 - high_action))) {
      low = 0.0;
    } else if (detail::beta_root_decision(p, hi, s).stops) {
      low = st;
    } else {
      while (hi - lo > mean_resolution) {
        const double mid = 0.5 * (lo + hi);
        const auto d = detail::beta_root_decision(p, mid, s);
        if (d.stops && d.choice == (1 - high_action))
          lo = mid;
        else
          hi = mid;
      }
      low = lo;
    }
  }
  return {low, up};
}

}  // namespace ssg
