#include <doctest.h>

#include <random>

#include "ensmot/association.hpp"
#include "oracles.hpp"

using namespace ensmot;

namespace {

Detection det_at(double cx, double cy, double w, double h) {
  return Detection(2, BoundingBox::from_center(cx, cy, w, h), 0.9);
}

KalmanTrackState predicted_at(double cx, double cy, double w, double h, const MotionModel& model) {
  return predict(initiate(det_at(cx, cy, w, h), model), model, 1);
}

// Diagonal of S = H P Hᵀ + R, computed by hand from the model's pieces.
std::array<double, 4> innovation_diag(const KalmanTrackState& s, const MotionModel& model) {
  const double r = model.scales().meas_sigma_scale * s.mean(3);
  std::array<double, 4> out{};
  for (int i = 0; i < 4; ++i) out[i] = s.covariance(i, i) + r * r;
  return out;
}

// −log N(z; mean, diag S) as a product of independent scalar densities.
double scalar_nll(const KalmanTrackState& s, const Detection& d, const MotionModel& model) {
  const auto diag = innovation_diag(s, model);
  const double z[4] = {d.box().center_x(), d.box().center_y(), d.box().width(), d.box().height()};
  double nll = 0.0;
  for (int i = 0; i < 4; ++i) nll -= std::log(oracle::gaussian_pdf(z[i], s.mean(i), diag[i]));
  return nll;
}

}  // namespace

TEST_CASE("default gate is the 95% chi-square quantile for 4 dof") {
  CHECK(oracle::chi2_cdf_even(kChi2Gate4Dof95, 4) == doctest::Approx(0.95).epsilon(1e-4));
  CHECK(oracle::chi2_cdf_even(kChi2Gate4Dof95 - 0.01, 4) < 0.95);
}

TEST_CASE("association examples") {
  const MotionModel model;
  const AssociationParams params;

  SUBCASE("track atop its detection") {
    const auto s = predicted_at(100, 100, 20, 40, model);
    const std::vector<Detection> dets{Detection(2, s.box(), 0.9)};
    const auto res = associate(std::vector{s}, dets, params, model);
    CHECK(res.matches == std::vector<Match>{{0, 0}});
  }

  SUBCASE("detection a hundred box heights away is gated out") {
    const auto s = predicted_at(100, 100, 20, 40, model);
    const Detection far = det_at(100 + 100 * 40, 100, 20, 40);
    // The predictive covariance is diagonal here; only cx differs.
    const double sxx = innovation_diag(s, model)[0];
    const double d2 = (100.0 * 40) * (100.0 * 40) / sxx;
    CHECK(d2 > 1000.0 * kChi2Gate4Dof95);
    CHECK(gating_distance(s, far, model) == doctest::Approx(d2).epsilon(1e-9));
    const auto res = associate(std::vector{s}, std::vector{far}, params, model);
    CHECK(res.matches.empty());
    CHECK(res.unmatched_tracks == std::vector<std::size_t>{0});
    CHECK(res.unmatched_detections == std::vector<std::size_t>{0});
  }

  SUBCASE("swapped detections pair each track with its nearer detection") {
    const std::vector<KalmanTrackState> tracks{predicted_at(100, 100, 20, 40, model),
                                               predicted_at(130, 100, 20, 40, model)};
    const std::vector<Detection> dets{det_at(131, 101, 20, 40), det_at(99, 99, 20, 40)};
    const double straight = scalar_nll(tracks[0], dets[0], model) + scalar_nll(tracks[1], dets[1], model);
    const double crossed = scalar_nll(tracks[0], dets[1], model) + scalar_nll(tracks[1], dets[0], model);
    REQUIRE(crossed < straight);
    CHECK(-log_likelihood(tracks[0], dets[1], model) ==
          doctest::Approx(scalar_nll(tracks[0], dets[1], model)).epsilon(1e-9));
    const auto res = associate(tracks, dets, params, model);
    CHECK(res.matches == std::vector<Match>{{0, 1}, {1, 0}});
  }

  SUBCASE("IoU floor demotes statistically plausible but disjoint matches") {
    KalmanTrackState s = predicted_at(100, 100, 20, 40, model);
    s.covariance *= 1e4;
    const Detection d = det_at(160, 100, 20, 40);
    REQUIRE(gating_distance(s, d, model) <= kChi2Gate4Dof95);
    REQUIRE(iou(s.box(), d.box()) == 0.0);
    const auto kept = associate(std::vector{s}, std::vector{d}, AssociationParams{kChi2Gate4Dof95, 0.0}, model);
    CHECK(kept.matches.size() == 1);
    const auto res = associate(std::vector{s}, std::vector{d}, params, model);
    CHECK(res.matches.empty());
    CHECK(res.unmatched_tracks.size() == 1);
    CHECK(res.unmatched_detections.size() == 1);
  }
}

TEST_CASE("likelihood costs are offset to zero and respect the gate") {
  const MotionModel model;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> pos(0, 400), jitter(-15, 15), size(20, 80);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<KalmanTrackState> tracks;
    std::vector<Detection> dets;
    for (int k = 0; k < 6; ++k) {
      const double cx = pos(rng), cy = pos(rng), h = size(rng);
      tracks.push_back(predicted_at(cx, cy, 0.4 * h, h, model));
      dets.push_back(det_at(cx + jitter(rng), cy + jitter(rng), 0.4 * h, h));
    }
    std::size_t prev_admissible = 0;
    for (double gate : {1.0, 4.0, 9.488, 30.0, 1e3, 1e6}) {
      const CostMatrix costs = likelihood_costs(tracks, dets, gate, model);
      std::size_t admissible = 0;
      double lo = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < costs.rows(); ++k) {
        for (std::size_t i = 0; i < costs.cols(); ++i) {
          const bool inside = gating_distance(tracks[k], dets[i], model) <= gate;
          CHECK(costs.admissible(k, i) == inside);
          if (!inside) continue;
          ++admissible;
          CHECK(costs(k, i) >= 0.0);
          lo = std::min(lo, costs(k, i));
        }
      }
      if (admissible > 0) CHECK(lo == 0.0);
      CHECK(admissible >= prev_admissible);
      prev_admissible = admissible;

      const auto res = associate(tracks, dets, AssociationParams{gate, 0.1}, model);
      std::vector<int> seen_t(tracks.size(), 0), seen_d(dets.size(), 0);
      for (const auto& [k, i] : res.matches) {
        ++seen_t[k];
        ++seen_d[i];
      }
      for (auto k : res.unmatched_tracks) ++seen_t[k];
      for (auto i : res.unmatched_detections) ++seen_d[i];
      for (int v : seen_t) CHECK(v == 1);
      for (int v : seen_d) CHECK(v == 1);
    }
  }
}
