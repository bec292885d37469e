#pragma once

// Independent reference computations used to freeze expected values. None of
// these call into the library code paths they check.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

/// Counts unit pixels covered by integer boxes (left, top, width, height) on
/// a grid of the given extent.
inline double raster_iou(int l1, int t1, int w1, int h1, int l2, int t2, int w2, int h2,
                         int extent) {
  long inter = 0, uni = 0;
  for (int y = 0; y < extent; ++y) {
    for (int x = 0; x < extent; ++x) {
      const bool a = x >= l1 && x < l1 + w1 && y >= t1 && y < t1 + h1;
      const bool b = x >= l2 && x < l2 + w2 && y >= t2 && y < t2 + h2;
      inter += (a && b);
      uni += (a || b);
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

struct BruteForceResult {
  std::size_t cardinality = 0;
  double cost = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // lexicographically smallest
};

/// Enumerates every injective row→column map (rows ≤ cols is not required:
/// rows may also stay unmatched). Optimum: most admissible pairs, then least
/// cost, then lexicographically smallest match list. Infinite entries are
/// inadmissible.
inline BruteForceResult brute_force_assignment(const std::vector<std::vector<double>>& m) {
  const std::size_t rows = m.size();
  const std::size_t cols = rows == 0 ? 0 : m[0].size();
  BruteForceResult best;
  bool have = false;
  std::vector<std::pair<std::size_t, std::size_t>> cur;
  std::vector<char> used(cols, 0);

  auto better = [&](std::size_t card, double cost,
                    const std::vector<std::pair<std::size_t, std::size_t>>& list) {
    if (!have) return true;
    if (card != best.cardinality) return card > best.cardinality;
    if (cost != best.cost) return cost < best.cost;
    return list < best.matches;
  };

  auto rec = [&](auto&& self, std::size_t r, double cost) -> void {
    if (r == rows) {
      if (better(cur.size(), cost, cur)) {
        best.cardinality = cur.size();
        best.cost = cost;
        best.matches = cur;
        have = true;
      }
      return;
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (used[c] || !std::isfinite(m[r][c])) continue;
      used[c] = 1;
      cur.emplace_back(r, c);
      self(self, r + 1, cost + m[r][c]);
      cur.pop_back();
      used[c] = 0;
    }
    self(self, r + 1, cost);  // row r unmatched
  };
  rec(rec, 0, 0.0);
  return best;
}

/// Scalar random-walk model: x₁ ~ N(m0, p0), x_t = a·x_{t−1} + w (var q),
/// z_t = x_t + v (var r). Returns the MAP estimate of x_T given z_1..z_T by
/// solving the stacked weighted normal equations directly.
inline double batch_last_state(double m0, double p0, double a, double q, double r,
                               const std::vector<double>& z) {
  const int n = static_cast<int>(z.size());
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  info(0, 0) += 1.0 / p0;
  rhs(0) += m0 / p0;
  for (int t = 0; t < n; ++t) {
    info(t, t) += 1.0 / r;
    rhs(t) += z[t] / r;
  }
  for (int t = 1; t < n; ++t) {
    // (x_t − a x_{t−1})² / q
    info(t, t) += 1.0 / q;
    info(t - 1, t - 1) += a * a / q;
    info(t, t - 1) -= a / q;
    info(t - 1, t) -= a / q;
  }
  const Eigen::VectorXd x = info.ldlt().solve(rhs);
  return x(n - 1);
}

/// Chi-square CDF for even degrees of freedom k = 2m:
/// 1 − e^{−x/2} Σ_{i<m} (x/2)^i / i!.
inline double chi2_cdf_even(double x, int k) {
  const int m = k / 2;
  double term = 1.0, sum = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i > 0) term *= (x / 2.0) / i;
    sum += term;
  }
  return 1.0 - std::exp(-x / 2.0) * sum;
}

inline double gaussian_pdf(double x, double mean, double var) {
  return std::exp(-0.5 * (x - mean) * (x - mean) / var) /
         std::sqrt(2.0 * std::numbers::pi * var);
}

/// Composite Simpson rule on [lo, hi] with an even number of intervals.
template <class F>
double simpson(F f, double lo, double hi, int intervals) {
  const double h = (hi - lo) / intervals;
  double s = f(lo) + f(hi);
  for (int i = 1; i < intervals; ++i) s += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace oracle
