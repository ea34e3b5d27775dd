#pragma once

#include <cstdint>
#include <vector>

#include "ssg/errors.hpp"

namespace ssg {

// The belief-count lattice: states of the sampling process are count vectors
// over the observation alphabet.  Depth-t slice = all count vectors summing
// to t, ordered lexicographically; ranks are computed combinatorially so the
// slices are never materialized.
class CountLattice {
 public:
  CountLattice(int symbols, int horizon) : m_(symbols), horizon_(horizon) {
    // C(n, k) for n <= horizon + symbols; doubles are exact well past any
    // lattice size we can afford to iterate.
    const int n = horizon_ + m_ + 1;
    binom_.assign(n + 1, std::vector<double>(m_ + 1, 0.0));
    for (int i = 0; i <= n; ++i) {
      binom_[i][0] = 1.0;
      for (int k = 1; k <= m_; ++k) {
        binom_[i][k] = (i == 0) ? 0.0 : binom_[i - 1][k - 1] + binom_[i - 1][k];
      }
    }
  }

  int symbols() const { return m_; }
  int horizon() const { return horizon_; }

  // Number of count vectors with sum t: C(t + m - 1, m - 1).
  std::int64_t slice_size(int t) const {
    return static_cast<std::int64_t>(compositions(t, m_));
  }

  // Lexicographic rank of count vector n within its depth slice.
  std::int64_t rank(const std::vector<int>& n) const {
    std::int64_t r = 0;
    int rem = 0;
    for (int v : n) rem += v;
    for (int j = 0; j < m_ - 1; ++j) {
      const int k = m_ - j - 1;  // remaining free coordinates after j
      // sum over v < n[j] of compositions(rem - v, k)
      // = C(rem + k, k) - C(rem - n[j] + k, k)   (hockey stick)
      r += static_cast<std::int64_t>(choose(rem + k, k) - choose(rem - n[j] + k, k));
      rem -= n[j];
    }
    return r;
  }

  // Advances `n` to the next count vector of the same sum in ascending
  // lexicographic order; returns false after the last one.
  // The first vector of a slice is (0, ..., 0, t).
  bool next(std::vector<int>& n) const {
    int tail = 0;
    for (int j = m_ - 2; j >= 0; --j) {
      tail += n[j + 1];
      if (tail > 0) {
        n[j] += 1;
        for (int q = j + 1; q < m_; ++q) n[q] = 0;
        n[m_ - 1] = tail - 1;
        return true;
      }
    }
    return false;
  }

  std::vector<int> first(int t) const {
    std::vector<int> n(m_, 0);
    n[m_ - 1] = t;
    return n;
  }

 private:
  double compositions(int s, int k) const { return choose(s + k - 1, k - 1); }
  double choose(int n, int k) const {
    if (k < 0 || n < 0 || k > n) return 0.0;
    if (k > m_) throw Error("binomial table too narrow");
    return binom_[n][k];
  }

  int m_;
  int horizon_;
  std::vector<std::vector<double>> binom_;
};

}  // namespace ssg
