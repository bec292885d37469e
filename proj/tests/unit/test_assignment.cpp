#include <doctest.h>

#include <random>

#include "ensmot/assignment.hpp"
#include "oracles.hpp"

using namespace ensmot;

namespace {

CostMatrix from_rows(const std::vector<std::vector<double>>& rows) {
  CostMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  return m;
}

void check_partition(const AssociationResult& res, std::size_t rows, std::size_t cols) {
  std::vector<int> row_seen(rows, 0), col_seen(cols, 0);
  for (const auto& [r, c] : res.matches) {
    ++row_seen[r];
    ++col_seen[c];
  }
  for (auto r : res.unmatched_tracks) ++row_seen[r];
  for (auto c : res.unmatched_detections) ++col_seen[c];
  for (int v : row_seen) CHECK(v == 1);
  for (int v : col_seen) CHECK(v == 1);
}

std::vector<std::vector<double>> random_matrix(std::mt19937_64& rng, std::size_t rows,
                                               std::size_t cols, int max_cost,
                                               double inf_prob) {
  std::uniform_int_distribution<int> cost(0, max_cost);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::vector<double>> m(rows, std::vector<double>(cols));
  for (auto& row : m)
    for (auto& v : row) v = coin(rng) < inf_prob ? kInadmissible : cost(rng);
  return m;
}

}  // namespace

TEST_CASE("assignment examples") {
  SUBCASE("empty") {
    const auto res = solve_assignment(CostMatrix{});
    CHECK(res.matches.empty());
    CHECK(res.unmatched_tracks.empty());
    CHECK(res.unmatched_detections.empty());

    const auto rows_only = solve_assignment(CostMatrix(3, 0));
    CHECK(rows_only.unmatched_tracks.size() == 3);
  }

  SUBCASE("1x1") {
    const auto res = solve_assignment(from_rows({{42.5}}));
    REQUIRE(res.matches.size() == 1);
    CHECK(res.matches[0] == Match{0, 0});
  }

  SUBCASE("2x2 diagonal") {
    const auto m = from_rows({{1, 2}, {2, 1}});
    const auto brute = oracle::brute_force_assignment({{1, 2}, {2, 1}});
    CHECK(brute.cost == 2.0);
    const auto res = solve_assignment(m);
    CHECK(res.matches == std::vector<Match>{{0, 0}, {1, 1}});
    CHECK(res.total_cost(m) == 2.0);
  }

  SUBCASE("inadmissible pairs are never matched") {
    const auto m = from_rows({{kInadmissible, 1}, {kInadmissible, 5}});
    const auto res = solve_assignment(m);
    CHECK(res.matches == std::vector<Match>{{0, 1}});
    CHECK(res.unmatched_tracks == std::vector<std::size_t>{1});
    CHECK(res.unmatched_detections == std::vector<std::size_t>{0});
  }

  SUBCASE("all inadmissible") {
    const auto res = solve_assignment(from_rows({{kInadmissible, kInadmissible}}));
    CHECK(res.matches.empty());
    CHECK(res.unmatched_tracks.size() == 1);
    CHECK(res.unmatched_detections.size() == 2);
  }

  SUBCASE("equal-cost optima pick the lexicographically smallest list") {
    const auto res = solve_assignment(from_rows({{3, 3, 3}, {3, 3, 3}}));
    CHECK(res.matches == std::vector<Match>{{0, 0}, {1, 1}});
    const auto tall = solve_assignment(from_rows({{1}, {1}, {1}}));
    CHECK(tall.matches == std::vector<Match>{{0, 0}});
  }

  SUBCASE("negative costs") {
    const auto m = from_rows({{-5, 0}, {0, -5}});
    CHECK(solve_assignment(m).total_cost(m) == -10.0);
  }
}

TEST_CASE("3x3 random matrices match exhaustive permutations") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto raw = random_matrix(rng, 3, 3, 20, 0.0);
    const auto m = from_rows(raw);
    const auto res = solve_assignment(m);
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> perm{0, 1, 2};
    do {
      best = std::min(best, raw[0][perm[0]] + raw[1][perm[1]] + raw[2][perm[2]]);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(res.total_cost(m) == best);
  }
}

TEST_CASE("brute-force oracle agreement up to 7x7 with inadmissible entries") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> dim(1, 7);
  for (int trial = 0; trial < 600; ++trial) {
    const std::size_t rows = dim(rng), cols = dim(rng);
    const double inf_prob = (trial % 3 == 0) ? 0.0 : 0.3;
    // Small cost range forces many ties, exercising the tie-break.
    const int max_cost = (trial % 2 == 0) ? 100 : 3;
    const auto raw = random_matrix(rng, rows, cols, max_cost, inf_prob);
    const auto m = from_rows(raw);
    const auto res = solve_assignment(m);
    const auto brute = oracle::brute_force_assignment(raw);
    check_partition(res, rows, cols);
    CHECK(res.matches.size() == brute.cardinality);
    CHECK(res.total_cost(m) == brute.cost);
    CHECK(res.matches == brute.matches);
  }
}

TEST_CASE("scaling costs preserves the matching") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto raw = random_matrix(rng, 5, 6, 50, 0.2);
    const auto m = from_rows(raw);
    const double k = scale(rng);
    CostMatrix scaled = m;
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < m.cols(); ++c)
        if (m.admissible(r, c)) scaled(r, c) = m(r, c) * k;
    CHECK(solve_assignment(m).matches == solve_assignment(scaled).matches);
  }
}
