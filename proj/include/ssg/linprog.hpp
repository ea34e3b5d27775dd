#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "ssg/errors.hpp"

namespace ssg {

// Dense two-phase primal simplex for the tiny LPs used by the dominance
// tests.  Problem form:
//
//   maximize    c.x
//   subject to  A x <= b,   x >= 0
//
// b may have negative entries (phase 1 drives artificials out of the basis).
// Bland's rule, so no cycling.  Sizes here are a handful of rows/columns, so
// no effort is spent on numerics beyond a fixed pivot tolerance.

struct LpResult {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> x;
};

namespace detail {

inline std::string dump_lp(const std::vector<std::vector<double>>& A,
                           const std::vector<double>& b,
                           const std::vector<double>& c) {
  std::ostringstream os;
  os << "max c.x s.t. Ax<=b, x>=0; c=[";
  for (double v : c) os << v << " ";
  os << "], rows:\n";
  for (std::size_t i = 0; i < A.size(); ++i) {
    os << "  [";
    for (double v : A[i]) os << v << " ";
    os << "] <= " << b[i] << "\n";
  }
  return os.str();
}

}  // namespace detail

inline LpResult lp_solve(const std::vector<std::vector<double>>& A,
                         const std::vector<double>& b,
                         const std::vector<double>& c) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  constexpr double kEps = 1e-11;

  // Tableau with slack variables and one artificial per negative-b row.
  // Columns: [x(0..n-1) | slack(0..m-1) | artificial... | rhs]
  std::size_t n_art = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (b[i] < -kEps) ++n_art;
  const std::size_t cols = n + m + n_art + 1;
  std::vector<std::vector<double>> T(m, std::vector<double>(cols, 0.0));
  std::vector<int> basis(m);

  std::size_t art = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double sgn = b[i] < -kEps ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) T[i][j] = sgn * A[i][j];
    T[i][n + i] = sgn;  // slack
    T[i][cols - 1] = sgn * b[i];
    if (sgn < 0) {
      T[i][n + m + art] = 1.0;
      basis[i] = static_cast<int>(n + m + art);
      ++art;
    } else {
      basis[i] = static_cast<int>(n + i);
    }
  }

  auto pivot = [&](std::size_t pr, std::size_t pc) {
    const double pv = T[pr][pc];
    for (std::size_t j = 0; j < cols; ++j) T[pr][j] /= pv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == pr) continue;
      const double f = T[i][pc];
      if (std::fabs(f) < kEps) continue;
      for (std::size_t j = 0; j < cols; ++j) T[i][j] -= f * T[pr][j];
    }
    basis[pr] = static_cast<int>(pc);
  };

  // Runs simplex on the current tableau for objective row `z` (reduced costs
  // maintained in-place).  Returns false on unbounded.
  auto run = [&](std::vector<double>& z, std::size_t usable_cols) -> bool {
    for (int iter = 0; iter < 10000; ++iter) {
      // Bland: first column with positive reduced cost.
      std::size_t pc = usable_cols;
      for (std::size_t j = 0; j < usable_cols; ++j) {
        if (z[j] > kEps) {
          pc = j;
          break;
        }
      }
      if (pc == usable_cols) return true;  // optimal
      // Ratio test, Bland tie-break on basis index.
      std::size_t pr = m;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        if (T[i][pc] > kEps) {
          const double r = T[i][cols - 1] / T[i][pc];
          if (r < best - kEps ||
              (r < best + kEps && (pr == m || basis[i] < basis[pr]))) {
            best = r;
            pr = i;
          }
        }
      }
      if (pr == m) return false;  // unbounded
      pivot(pr, pc);
      // Update reduced-cost row.
      const double f = z[pc];
      for (std::size_t j = 0; j < cols; ++j) z[j] -= f * T[pr][j];
    }
    return false;
  };

  // Phase 1: minimize sum of artificials.
  if (n_art > 0) {
    std::vector<double> z(cols, 0.0);
    for (std::size_t j = n + m; j < n + m + n_art; ++j) z[j] = -1.0;
    // Express objective in terms of nonbasic vars.
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] >= static_cast<int>(n + m)) {
        for (std::size_t j = 0; j < cols; ++j) z[j] += T[i][j];
      }
    }
    if (!run(z, n + m + n_art)) return {};  // cannot happen: bounded below
    // The reduced-cost row's rhs holds minus the phase-1 objective, so a
    // positive residual means some artificial is stuck above zero.
    if (z[cols - 1] > 1e-7) return {};  // infeasible
    // Drive any artificial still in the basis out (degenerate).
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] >= static_cast<int>(n + m)) {
        std::size_t pc = cols;
        for (std::size_t j = 0; j < n + m; ++j) {
          if (std::fabs(T[i][j]) > kEps) {
            pc = j;
            break;
          }
        }
        if (pc < cols) pivot(i, pc);
        // else: redundant row, leave the artificial at value 0.
      }
    }
  }

  // Phase 2.
  std::vector<double> z(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) z[j] = c[j];
  for (std::size_t i = 0; i < m; ++i) {
    const int bj = basis[i];
    if (bj < static_cast<int>(n) && std::fabs(c[bj]) > 0.0) {
      const double f = z[bj];
      (void)f;
    }
  }
  // Reduce objective row against the basis.
  for (std::size_t i = 0; i < m; ++i) {
    const int bj = basis[i];
    if (bj < static_cast<int>(n)) {
      const double f = z[bj];
      if (std::fabs(f) > 0.0)
        for (std::size_t j = 0; j < cols; ++j) z[j] -= f * T[i][j];
    }
  }
  if (!run(z, n + m)) {
    throw LpError("LP unbounded", detail::dump_lp(A, b, c));
  }

  LpResult res;
  res.feasible = true;
  res.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < static_cast<int>(n)) res.x[basis[i]] = T[i][cols - 1];
  }
  res.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) res.objective += c[j] * res.x[j];
  return res;
}

}  // namespace ssg
