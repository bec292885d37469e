#pragma once

#include <span>

#include "ensmot/assignment.hpp"
#include "ensmot/geometry.hpp"
#include "ensmot/kalman.hpp"

namespace ensmot {

/// 95% quantile of the chi-square distribution with 4 degrees of freedom
/// (measurement dimension), rounded to three decimals.
inline constexpr double kChi2Gate4Dof95 = 9.488;

struct AssociationParams {
  double gate_chi2 = kChi2Gate4Dof95;
  double min_iou = 0.1;
};

/// Cost of pairing each predicted track state with each detection:
/// −log p(z | track), shifted so the smallest admissible entry is 0. Pairs
/// whose gating distance exceeds `gate_chi2` are kInadmissible.
CostMatrix likelihood_costs(std::span<const KalmanTrackState> predicted,
                            std::span<const Detection> dets, double gate_chi2,
                            const MotionModel& model);

/// Gated likelihood assignment followed by an IoU floor: any match whose
/// predicted box overlaps its detection by less than `min_iou` is split back
/// into an unmatched track and an unmatched detection.
AssociationResult associate(std::span<const KalmanTrackState> predicted,
                            std::span<const Detection> dets, const AssociationParams& params,
                            const MotionModel& model);

}  // namespace ensmot
