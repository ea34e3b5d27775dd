#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ssg/stopping.hpp"

namespace ssg {

// Exact joint law of (chosen action, stopping depth) induced by a policy when
// observations are i.i.d. from a fixed symbol distribution.  Every entry is a
// polynomial in the symbol probabilities, evaluated by the forward pass
// without sampling.
struct ActionTimeDistribution {
  std::vector<std::vector<double>> p;  // [action][t]
  int horizon = 0;

  double total_mass() const {
    double s = 0.0;
    for (const auto& row : p)
      for (double v : row) s += v;
    return s;
  }

  std::vector<double> action_marginal() const {
    std::vector<double> m(p.size(), 0.0);
    for (std::size_t a = 0; a < p.size(); ++a)
      for (double v : p[a]) m[a] += v;
    return m;
  }

  std::vector<double> time_marginal() const {
    std::vector<double> m(horizon + 1, 0.0);
    for (const auto& row : p)
      for (int t = 0; t <= horizon; ++t) m[t] += row[t];
    return m;
  }

  // P(action = a and tau <= t); the object the comparative statics order.
  double joint_cdf(int a, int t) const {
    double s = 0.0;
    for (int q = 0; q <= std::min(t, horizon); ++q) s += p[a][q];
    return s;
  }

  // CDF of tau conditional on choosing a; empty support yields 1 everywhere.
  std::vector<double> conditional_time_cdf(int a) const {
    std::vector<double> cdf(horizon + 1, 0.0);
    const double mass = [&] {
      double s = 0.0;
      for (double v : p[a]) s += v;
      return s;
    }();
    double acc = 0.0;
    for (int t = 0; t <= horizon; ++t) {
      acc += p[a][t];
      cdf[t] = mass > 0.0 ? acc / mass : 1.0;
    }
    return cdf;
  }
};

inline ActionTimeDistribution joint_action_time(const StoppingPolicy& pol,
                                                const std::vector<double>& sigma_true) {
  if (static_cast<int>(sigma_true.size()) != pol.symbols())
    throw AlphabetError("true distribution length does not match the alphabet");
  const int m = pol.symbols();
  CountLattice lat = pol.lattice();

  ActionTimeDistribution out;
  out.horizon = pol.horizon;
  out.p.assign(pol.num_actions(), std::vector<double>(pol.horizon + 1, 0.0));

  std::vector<double> w{1.0}, wnext;
  std::vector<int> child;
  for (int t = 0; t <= pol.horizon; ++t) {
    if (t < pol.horizon) wnext.assign(static_cast<std::size_t>(lat.slice_size(t + 1)), 0.0);
    std::vector<int> n = lat.first(t);
    std::int64_t node = 0;
    do {
      const double weight = w[node];
      if (weight != 0.0) {
        if (pol.stops(t, node)) {
          out.p[pol.chosen[t][node]][t] += weight;
        } else {
          child = n;
          for (int y = 0; y < m; ++y) {
            if (sigma_true[y] != 0.0) {
              child[y] += 1;
              wnext[lat.rank(child)] += weight * sigma_true[y];
              child[y] -= 1;
            }
          }
        }
      }
      ++node;
    } while (lat.next(n));
    if (t < pol.horizon) w.swap(wnext);
  }
  return out;
}

// Binary convenience: sigma is P(symbol 1).
inline ActionTimeDistribution joint_action_time(const StoppingPolicy& pol, double sigma) {
  return joint_action_time(pol, std::vector<double>{1.0 - sigma, sigma});
}

// Action marginal of the joint law: the best-response map ingredient.
inline std::vector<double> action_distribution(const StoppingPolicy& pol,
                                               const std::vector<double>& sigma_true) {
  return joint_action_time(pol, sigma_true).action_marginal();
}

// Forward pass carrying d/dsigma alongside the weight (binary alphabet).
// Exact, since each path weight is a polynomial in sigma.
struct JointDerivatives {
  std::vector<std::vector<double>> p;   // [action][t]
  std::vector<std::vector<double>> dp;  // [action][t]
  int horizon = 0;

  double joint_cdf_derivative(int a, int t) const {
    double s = 0.0;
    for (int q = 0; q <= std::min(t, horizon); ++q) s += dp[a][q];
    return s;
  }
};

inline JointDerivatives joint_action_time_derivative(const StoppingPolicy& pol, double sigma) {
  if (pol.symbols() != 2) throw UnsupportedError("derivative pass requires a binary alphabet");
  CountLattice lat = pol.lattice();
  JointDerivatives out;
  out.horizon = pol.horizon;
  out.p.assign(pol.num_actions(), std::vector<double>(pol.horizon + 1, 0.0));
  out.dp.assign(pol.num_actions(), std::vector<double>(pol.horizon + 1, 0.0));
  const double q[2] = {1.0 - sigma, sigma};
  const double dq[2] = {-1.0, 1.0};

  std::vector<double> w{1.0}, dw{0.0}, wn, dwn;
  std::vector<int> child;
  for (int t = 0; t <= pol.horizon; ++t) {
    if (t < pol.horizon) {
      wn.assign(static_cast<std::size_t>(lat.slice_size(t + 1)), 0.0);
      dwn.assign(static_cast<std::size_t>(lat.slice_size(t + 1)), 0.0);
    }
    std::vector<int> n = lat.first(t);
    std::int64_t node = 0;
    do {
      if (pol.stops(t, node)) {
        out.p[pol.chosen[t][node]][t] += w[node];
        out.dp[pol.chosen[t][node]][t] += dw[node];
      } else {
        child = n;
        for (int y = 0; y < 2; ++y) {
          child[y] += 1;
          const std::int64_t r = lat.rank(child);
          wn[r] += w[node] * q[y];
          dwn[r] += dw[node] * q[y] + w[node] * dq[y];
          child[y] -= 1;
        }
      }
      ++node;
    } while (lat.next(n));
    if (t < pol.horizon) {
      w.swap(wn);
      dw.swap(dwn);
    }
  }
  return out;
}

struct ActionDerivatives {
  std::vector<double> prob;
  std::vector<double> dprob;
};

inline ActionDerivatives action_distribution_derivative(const StoppingPolicy& pol, double sigma) {
  const JointDerivatives jd = joint_action_time_derivative(pol, sigma);
  ActionDerivatives out;
  out.prob.assign(pol.num_actions(), 0.0);
  out.dprob.assign(pol.num_actions(), 0.0);
  for (int a = 0; a < pol.num_actions(); ++a)
    for (int t = 0; t <= jd.horizon; ++t) {
      out.prob[a] += jd.p[a][t];
      out.dprob[a] += jd.dp[a][t];
    }
  return out;
}

// Power-basis coefficients of the polynomial sigma -> P(choose `action` and
// tau <= t_cap).  Exact integer path counts expanded against the Bernstein
// monomials; intended for modest horizons where the expansion is stable.
inline std::vector<double> choice_polynomial(const StoppingPolicy& pol, int action, int t_cap) {
  if (pol.symbols() != 2) throw UnsupportedError("polynomial extraction requires binary alphabet");
  if (pol.horizon > 40)
    throw UnsupportedError("polynomial extraction limited to horizon <= 40");
  CountLattice lat = pol.lattice();
  // Path counts: forward pass with unit weights.
  std::vector<double> w{1.0}, wn;
  std::vector<double> coeff(pol.horizon + 1, 0.0);
  // binomials up to horizon
  std::vector<std::vector<double>> C(pol.horizon + 1, std::vector<double>(pol.horizon + 1, 0.0));
  for (int i = 0; i <= pol.horizon; ++i) {
    C[i][0] = 1.0;
    for (int j = 1; j <= i; ++j) C[i][j] = C[i - 1][j - 1] + (i - 1 >= j ? C[i - 1][j] : 0.0);
  }
  std::vector<int> child;
  for (int t = 0; t <= pol.horizon; ++t) {
    if (t < pol.horizon) wn.assign(static_cast<std::size_t>(lat.slice_size(t + 1)), 0.0);
    std::vector<int> n = lat.first(t);
    std::int64_t node = 0;
    do {
      if (pol.stops(t, node)) {
        if (pol.chosen[t][node] == action && t <= t_cap) {
          // count * sigma^{n1} (1-sigma)^{n0}
          const int n0 = n[0], n1 = n[1];
          for (int j = 0; j <= n0; ++j)
            coeff[n1 + j] += w[node] * C[n0][j] * ((j % 2 == 0) ? 1.0 : -1.0);
        }
      } else {
        child = n;
        for (int y = 0; y < 2; ++y) {
          child[y] += 1;
          wn[lat.rank(child)] += w[node];
          child[y] -= 1;
        }
      }
      ++node;
    } while (lat.next(n));
    if (t < pol.horizon) w.swap(wn);
  }
  return coeff;
}

inline double polynomial_eval(const std::vector<double>& coeff, double x) {
  double v = 0.0;
  for (int k = static_cast<int>(coeff.size()) - 1; k >= 0; --k) v = v * x + coeff[k];
  return v;
}

inline std::vector<double> polynomial_derivative(const std::vector<double>& coeff) {
  std::vector<double> d;
  for (std::size_t k = 1; k < coeff.size(); ++k) d.push_back(coeff[k] * static_cast<double>(k));
  if (d.empty()) d.push_back(0.0);
  return d;
}

// Exact prior-predictive tail P(tau > T) for T in [0, horizon]: the forward
// pass reweights by the predictive probabilities (Polya urn) instead of a
// fixed sigma.
inline std::vector<double> stop_time_tail_under_prior(const StoppingPolicy& pol) {
  const int m = pol.symbols();
  CountLattice lat = pol.lattice();
  std::vector<double> stop_mass(pol.horizon + 1, 0.0);

  std::vector<double> w{1.0}, wnext;
  std::vector<int> child;
  for (int t = 0; t <= pol.horizon; ++t) {
    if (t < pol.horizon) wnext.assign(static_cast<std::size_t>(lat.slice_size(t + 1)), 0.0);
    std::vector<int> n = lat.first(t);
    std::int64_t node = 0;
    do {
      const double weight = w[node];
      if (weight != 0.0) {
        if (pol.stops(t, node)) {
          stop_mass[t] += weight;
        } else {
          const double tot = pol.prior.alpha0 + t;
          child = n;
          for (int y = 0; y < m; ++y) {
            child[y] += 1;
            wnext[lat.rank(child)] += weight * (pol.prior.alpha[y] + n[y]) / tot;
            child[y] -= 1;
          }
        }
      }
      ++node;
    } while (lat.next(n));
    if (t < pol.horizon) w.swap(wnext);
  }

  std::vector<double> tail(pol.horizon + 1, 0.0);
  double acc = 0.0;
  for (int t = 0; t <= pol.horizon; ++t) {
    acc += stop_mass[t];
    tail[t] = std::max(0.0, 1.0 - acc);
  }
  return tail;
}

// Law of (posterior mean at stop, depth) under a fixed true distribution.
struct StoppingBeliefAtom {
  int depth = 0;
  std::vector<double> mean;
  double prob = 0.0;
};

inline std::vector<StoppingBeliefAtom> stopping_belief_distribution(
    const StoppingPolicy& pol, const std::vector<double>& sigma_true) {
  if (static_cast<int>(sigma_true.size()) != pol.symbols())
    throw AlphabetError("true distribution length does not match the alphabet");
  const int m = pol.symbols();
  CountLattice lat = pol.lattice();
  std::vector<StoppingBeliefAtom> atoms;

  std::vector<double> w{1.0}, wnext;
  std::vector<int> child;
  for (int t = 0; t <= pol.horizon; ++t) {
    if (t < pol.horizon) wnext.assign(static_cast<std::size_t>(lat.slice_size(t + 1)), 0.0);
    std::vector<int> n = lat.first(t);
    std::int64_t node = 0;
    do {
      const double weight = w[node];
      if (weight != 0.0) {
        if (pol.stops(t, node)) {
          atoms.push_back({t, pol.node_mean(n), weight});
        } else {
          child = n;
          for (int y = 0; y < m; ++y) {
            if (sigma_true[y] != 0.0) {
              child[y] += 1;
              wnext[lat.rank(child)] += weight * sigma_true[y];
              child[y] -= 1;
            }
          }
        }
      }
      ++node;
    } while (lat.next(n));
    if (t < pol.horizon) w.swap(wnext);
  }
  return atoms;
}

inline std::vector<StoppingBeliefAtom> stopping_belief_distribution(const StoppingPolicy& pol,
                                                                    double sigma) {
  return stopping_belief_distribution(pol, std::vector<double>{1.0 - sigma, sigma});
}

}  // namespace ssg
