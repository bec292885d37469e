#include "ensmot/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ensmot {

double AssociationResult::total_cost(const CostMatrix& costs) const {
  double sum = 0.0;
  for (const auto& [r, c] : matches) sum += costs(r, c);
  return sum;
}

namespace {

struct SquareProblem {
  std::size_t n = 0;
  std::vector<double> cost;  // n×n, row-major
  double at(std::size_t r, std::size_t c) const { return cost[r * n + c]; }
};

struct HungarianSolution {
  std::vector<double> u;  // row potentials
  std::vector<double> v;  // column potentials
  std::vector<std::size_t> col_of_row;
};

// O(n³) shortest augmenting path Hungarian method on a dense square matrix.
// Returns potentials satisfying cost(i,j) − u[i] − v[j] ≥ 0 with equality on
// the returned matching.
HungarianSolution hungarian(const SquareProblem& p) {
  const std::size_t n = p.n;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  // 1-based internally; index 0 is the virtual root.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> row_of_col(n + 1, 0), way(n + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    row_of_col[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = row_of_col[j0];
      double delta = kInf;
      std::size_t j1 = kNone;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = p.at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of_col[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of_col[j0] = row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  HungarianSolution sol;
  sol.u.assign(u.begin() + 1, u.end());
  sol.v.assign(v.begin() + 1, v.end());
  sol.col_of_row.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) sol.col_of_row[row_of_col[j] - 1] = j - 1;
  return sol;
}

// Walks the optimal face of the assignment polytope (perfect matchings on
// tight edges) to pick the lexicographically smallest real match list.
class LexicographicRefiner {
 public:
  LexicographicRefiner(const CostMatrix& costs, const SquareProblem& square,
                       const HungarianSolution& sol, double tol)
      : costs_(costs),
        n_(square.n),
        tight_(square.n * square.n, 0),
        col_of_row_(sol.col_of_row),
        row_of_col_(square.n),
        row_fixed_(square.n, 0),
        col_fixed_(square.n, 0),
        row_nonmatch_(square.n, 0),
        visited_(square.n, 0) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        tight_[i * n_ + j] = (square.at(i, j) - sol.u[i] - sol.v[j]) <= tol;
      }
      // The solver's own matching is tight by construction.
      tight_[i * n_ + col_of_row_[i]] = 1;
      row_of_col_[col_of_row_[i]] = i;
    }
  }

  void run() {
    for (std::size_t r = 0; r < costs_.rows(); ++r) {
      bool matched = false;
      for (std::size_t c = 0; c < costs_.cols() && !matched; ++c) {
        if (!is_real(r, c) || col_fixed_[c] || !tight_[r * n_ + c]) continue;
        matched = try_force(r, c);
      }
      if (!matched) {
        // The current column of r is necessarily a non-match; keep r free to
        // move between non-match columns while later rows are resolved.
        row_nonmatch_[r] = 1;
      }
    }
  }

  AssociationResult result() const {
    AssociationResult res;
    std::vector<char> det_used(costs_.cols(), 0);
    for (std::size_t r = 0; r < costs_.rows(); ++r) {
      const std::size_t c = col_of_row_[r];
      if (is_real(r, c)) {
        res.matches.emplace_back(r, c);
        det_used[c] = 1;
      } else {
        res.unmatched_tracks.push_back(r);
      }
    }
    for (std::size_t c = 0; c < costs_.cols(); ++c) {
      if (!det_used[c]) res.unmatched_detections.push_back(c);
    }
    return res;
  }

 private:
  bool is_real(std::size_t r, std::size_t c) const {
    return r < costs_.rows() && c < costs_.cols() && costs_.admissible(r, c);
  }

  bool allowed(std::size_t r, std::size_t c) const {
    if (col_fixed_[c] || !tight_[r * n_ + c]) return false;
    if (row_nonmatch_[r] && is_real(r, c)) return false;
    return true;
  }

  bool try_force(std::size_t r, std::size_t c) {
    if (col_of_row_[r] == c) {
      row_fixed_[r] = col_fixed_[c] = 1;
      return true;
    }
    const auto saved_col_of_row = col_of_row_;
    const auto saved_row_of_col = row_of_col_;

    const std::size_t freed = col_of_row_[r];
    const std::size_t displaced = row_of_col_[c];
    row_fixed_[r] = col_fixed_[c] = 1;
    col_of_row_[r] = c;
    row_of_col_[c] = r;
    free_col_ = freed;
    free_col_open_ = true;

    std::fill(visited_.begin(), visited_.end(), 0);
    if (augment(displaced)) return true;

    row_fixed_[r] = col_fixed_[c] = 0;
    col_of_row_ = saved_col_of_row;
    row_of_col_ = saved_row_of_col;
    return false;
  }

  // Kuhn-style alternating path from an unassigned row to the freed column.
  bool augment(std::size_t row) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (visited_[j] || !allowed(row, j)) continue;
      visited_[j] = 1;
      if ((j == free_col_ && free_col_open_) ||
          (j != free_col_ && augment(row_of_col_[j]))) {
        if (j == free_col_) free_col_open_ = false;
        col_of_row_[row] = j;
        row_of_col_[j] = row;
        return true;
      }
    }
    return false;
  }

  const CostMatrix& costs_;
  std::size_t n_;
  std::vector<char> tight_;
  std::vector<std::size_t> col_of_row_;
  std::vector<std::size_t> row_of_col_;
  std::vector<char> row_fixed_;
  std::vector<char> col_fixed_;
  std::vector<char> row_nonmatch_;
  std::vector<char> visited_;
  std::size_t free_col_ = 0;
  bool free_col_open_ = false;
};

}  // namespace

AssociationResult solve_assignment(const CostMatrix& costs) {
  AssociationResult res;
  if (costs.rows() == 0 || costs.cols() == 0) {
    for (std::size_t r = 0; r < costs.rows(); ++r) res.unmatched_tracks.push_back(r);
    for (std::size_t c = 0; c < costs.cols(); ++c) res.unmatched_detections.push_back(c);
    return res;
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < costs.rows(); ++r) {
    for (std::size_t c = 0; c < costs.cols(); ++c) {
      if (!costs.admissible(r, c)) continue;
      lo = std::min(lo, costs(r, c));
      hi = std::max(hi, costs(r, c));
    }
  }
  if (!(lo <= hi)) {
    for (std::size_t r = 0; r < costs.rows(); ++r) res.unmatched_tracks.push_back(r);
    for (std::size_t c = 0; c < costs.cols(); ++c) res.unmatched_detections.push_back(c);
    return res;
  }

  SquareProblem square;
  square.n = std::max(costs.rows(), costs.cols());
  const double span = hi - lo;
  // Any perfect matching using k inadmissible pairs costs at least k·big, and
  // the admissible part never exceeds n·span < big, so the solver maximizes
  // admissible cardinality before minimizing cost.
  const double big = static_cast<double>(square.n) * span + 1.0;
  square.cost.assign(square.n * square.n, 0.0);
  for (std::size_t r = 0; r < costs.rows(); ++r) {
    for (std::size_t c = 0; c < costs.cols(); ++c) {
      square.cost[r * square.n + c] = costs.admissible(r, c) ? costs(r, c) - lo : big;
    }
  }

  const HungarianSolution sol = hungarian(square);
  const double tol = 64.0 * std::numeric_limits<double>::epsilon() *
                     static_cast<double>(square.n) * (big + 1.0);
  LexicographicRefiner refiner(costs, square, sol, tol);
  refiner.run();
  return refiner.result();
}

}  // namespace ensmot
