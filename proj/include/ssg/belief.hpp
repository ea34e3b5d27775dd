#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "ssg/errors.hpp"

namespace ssg {

// Conjugate full-support prior over an opponent-profile alphabet.  The
// parameter vector is indexed by the owning player's opponent-profile
// ordering; with a binary alphabet this is a Beta prior.
struct DirichletPrior {
  std::vector<double> alpha;
  double alpha0 = 0.0;

  DirichletPrior() = default;
  explicit DirichletPrior(std::vector<double> a) : alpha(std::move(a)) {
    for (double v : alpha)
      if (!(v > 0.0)) throw DimensionError("Dirichlet parameters must be positive", -1, -1);
    alpha0 = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  }

  int size() const { return static_cast<int>(alpha.size()); }

  std::vector<double> mean() const {
    std::vector<double> m(alpha.size());
    for (std::size_t k = 0; k < alpha.size(); ++k) m[k] = alpha[k] / alpha0;
    return m;
  }
};

// Beta(a, b) over a binary alphabet: a pseudo-observations of symbol 1, b of
// symbol 0.  The alpha vector itself is always indexed by symbol, so
// alpha = (b, a) and the scalar mean P(symbol 1) equals a / (a + b).
inline DirichletPrior beta_prior(double a, double b) { return DirichletPrior({b, a}); }

// Prior plus observation counts; exchangeability makes counts a sufficient
// statistic for the whole sample path.
struct PosteriorState {
  DirichletPrior prior;
  std::vector<int> counts;
  int depth = 0;

  explicit PosteriorState(DirichletPrior p)
      : prior(std::move(p)), counts(prior.alpha.size(), 0) {}

  PosteriorState(DirichletPrior p, std::vector<int> n) : prior(std::move(p)), counts(std::move(n)) {
    if (counts.size() != prior.alpha.size())
      throw AlphabetError("count vector length does not match the alphabet");
    depth = 0;
    for (int c : counts) {
      if (c < 0) throw AlphabetError("negative observation count");
      depth += c;
    }
  }

  double param(int y) const { return prior.alpha[y] + counts[y]; }
  double param0() const { return prior.alpha0 + depth; }
};

inline PosteriorState update(const PosteriorState& s, int y) {
  if (y < 0 || y >= s.prior.size())
    throw AlphabetError("symbol " + std::to_string(y) + " outside alphabet of size " +
                        std::to_string(s.prior.size()));
  PosteriorState out = s;
  out.counts[y] += 1;
  out.depth += 1;
  return out;
}

inline std::vector<double> posterior_mean(const PosteriorState& s) {
  std::vector<double> m(s.prior.size());
  for (int y = 0; y < s.prior.size(); ++y) m[y] = s.param(y) / s.param0();
  return m;
}

// Scalar summary of a binary-alphabet state: posterior mean of P(symbol 1).
inline double binary_mean(const PosteriorState& s) {
  if (s.prior.size() != 2) throw UnsupportedError("binary_mean requires a binary alphabet");
  return s.param(1) / s.param0();
}

// One-step-ahead probability of observing y; for a Dirichlet this coincides
// with the posterior mean component.
inline double predictive_prob(const PosteriorState& s, int y) {
  if (y < 0 || y >= s.prior.size())
    throw AlphabetError("symbol " + std::to_string(y) + " outside alphabet of size " +
                        std::to_string(s.prior.size()));
  return s.param(y) / s.param0();
}

// Finitely many atoms over the alphabet simplex.  Exists to exercise the
// misspecification analysis; not admissible in equilibrium solving since it
// violates full support.
struct FiniteSupportPrior {
  std::vector<std::vector<double>> atoms;  // each a distribution over the alphabet
  std::vector<double> weights;

  void validate() const {
    if (atoms.size() != weights.size())
      throw DimensionError("atom/weight count mismatch", -1, -1);
    double ws = 0.0;
    for (double w : weights) {
      if (w < -1e-12) throw DimensionError("negative atom weight", -1, -1);
      ws += w;
    }
    if (std::fabs(ws - 1.0) > 1e-9) throw DimensionError("atom weights must sum to 1", -1, -1);
    for (const auto& a : atoms) {
      double s = 0.0;
      for (double p : a) {
        if (p < -1e-12) throw DimensionError("negative atom probability", -1, -1);
        s += p;
      }
      if (std::fabs(s - 1.0) > 1e-9) throw DimensionError("atom must be a distribution", -1, -1);
    }
  }

  int alphabet_size() const { return atoms.empty() ? 0 : static_cast<int>(atoms[0].size()); }

  std::vector<double> mean() const {
    std::vector<double> m(alphabet_size(), 0.0);
    for (std::size_t j = 0; j < atoms.size(); ++j)
      for (int y = 0; y < alphabet_size(); ++y) m[y] += weights[j] * atoms[j][y];
    return m;
  }

  double predictive(int y) const { return mean()[y]; }
};

// Bayes reweighting of a finite-support prior on observing y.
inline FiniteSupportPrior update_finite(const FiniteSupportPrior& prior, int y) {
  if (y < 0 || y >= prior.alphabet_size())
    throw AlphabetError("symbol outside atom alphabet");
  FiniteSupportPrior out = prior;
  double z = 0.0;
  for (std::size_t j = 0; j < prior.atoms.size(); ++j) {
    out.weights[j] = prior.weights[j] * prior.atoms[j][y];
    z += out.weights[j];
  }
  if (z <= 0.0)
    throw ZeroLikelihoodError("all atoms assign zero probability to symbol " + std::to_string(y));
  for (double& w : out.weights) w /= z;
  return out;
}

// Strong stochastic dominance comparison within the Beta family: the density
// ratio x^(a'-a) (1-x)^(b'-b) is monotone increasing iff a' >= a and b' <= b.
enum class SsdOrder { p_dominates, q_dominates, equal, incomparable };

inline SsdOrder ssd_compare(const DirichletPrior& p, const DirichletPrior& q) {
  if (p.size() != 2 || q.size() != 2)
    throw UnsupportedError("ssd_compare requires a binary alphabet (Beta priors)");
  const double a = p.alpha[0], b = p.alpha[1];
  const double c = q.alpha[0], d = q.alpha[1];
  // Convention: alpha[0] is the weight on symbol 1... no; index 0 is symbol 0.
  // "p dominates q" means p's posterior FOSD-dominates q's after every
  // history, i.e. p puts more weight on high values of P(symbol 1).
  // With alpha = (alpha_0, alpha_1) over symbols {0,1} and the mean of
  // interest P(1) = alpha_1/alpha0, dominance requires alpha_1 up, alpha_0
  // down.
  const bool p_ge = (b >= d) && (a <= c);
  const bool q_ge = (d >= b) && (c <= a);
  if (p_ge && q_ge) return SsdOrder::equal;
  if (p_ge) return SsdOrder::p_dominates;
  if (q_ge) return SsdOrder::q_dominates;
  return SsdOrder::incomparable;
}

}  // namespace ssg
