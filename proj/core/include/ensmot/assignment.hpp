#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace ensmot {

inline constexpr double kInadmissible = std::numeric_limits<double>::infinity();

/// Dense row-major cost matrix (rows = tracks, cols = detections).
/// kInadmissible marks pairs that may never be matched.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  bool admissible(std::size_t r, std::size_t c) const {
    return (*this)(r, c) != kInadmissible;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using Match = std::pair<std::size_t, std::size_t>;

struct AssociationResult {
  std::vector<Match> matches;  // sorted by row
  std::vector<std::size_t> unmatched_tracks;
  std::vector<std::size_t> unmatched_detections;

  double total_cost(const CostMatrix& costs) const;
};

/// Optimal matching over admissible entries.
///
/// The matrix is padded to square and solved with the Hungarian method;
/// inadmissible entries are never matched. Among matchings of maximum
/// admissible cardinality the total cost is minimal, and among equal-cost
/// optima the match list sorted by (row, col) is lexicographically smallest.
AssociationResult solve_assignment(const CostMatrix& costs);

}  // namespace ensmot
