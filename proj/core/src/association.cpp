#include "ensmot/association.hpp"

#include <algorithm>
#include <limits>

namespace ensmot {

CostMatrix likelihood_costs(std::span<const KalmanTrackState> predicted,
                            std::span<const Detection> dets, double gate_chi2,
                            const MotionModel& model) {
  CostMatrix costs(predicted.size(), dets.size(), kInadmissible);
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < predicted.size(); ++k) {
    for (std::size_t i = 0; i < dets.size(); ++i) {
      const MeasurementVector z = to_measurement(dets[i].box());
      const auto inn = kalman::innovation<kStateDim, kMeasurementDim>(
          predicted[k], z, model.observation(), model.measurement_noise(predicted[k].mean));
      const double d2 = inn.mahalanobis_sq();
      if (!(d2 <= gate_chi2)) continue;
      const double nll = 0.5 * (d2 + inn.log_det() +
                                kMeasurementDim * std::log(2.0 * std::numbers::pi));
      costs(k, i) = nll;
      lo = std::min(lo, nll);
    }
  }
  for (std::size_t k = 0; k < costs.rows(); ++k) {
    for (std::size_t i = 0; i < costs.cols(); ++i) {
      if (costs.admissible(k, i)) costs(k, i) -= lo;
    }
  }
  return costs;
}

AssociationResult associate(std::span<const KalmanTrackState> predicted,
                            std::span<const Detection> dets, const AssociationParams& params,
                            const MotionModel& model) {
  const CostMatrix costs = likelihood_costs(predicted, dets, params.gate_chi2, model);
  AssociationResult solved = solve_assignment(costs);
  if (params.min_iou <= 0.0) return solved;

  AssociationResult out;
  out.unmatched_tracks = std::move(solved.unmatched_tracks);
  out.unmatched_detections = std::move(solved.unmatched_detections);
  for (const auto& [k, i] : solved.matches) {
    const bool overlap_ok = predicted[k].has_valid_box() &&
                            iou(predicted[k].box(), dets[i].box()) >= params.min_iou;
    if (overlap_ok) {
      out.matches.emplace_back(k, i);
    } else {
      out.unmatched_tracks.push_back(k);
      out.unmatched_detections.push_back(i);
    }
  }
  std::sort(out.unmatched_tracks.begin(), out.unmatched_tracks.end());
  std::sort(out.unmatched_detections.begin(), out.unmatched_detections.end());
  return out;
}

}  // namespace ensmot
