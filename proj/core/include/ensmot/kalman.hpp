#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ensmot/geometry.hpp"

namespace ensmot {

/// Raised when an innovation covariance S = H P Hᵀ + R is not positive
/// definite, which means the noise configuration is ill-conditioned.
class DegenerateInnovation : public std::runtime_error {
 public:
  DegenerateInnovation() : std::runtime_error("degenerate innovation covariance") {}
};

namespace kalman {

template <int Rows, int Cols = Rows>
using Matrix = Eigen::Matrix<double, Rows, Cols>;
template <int N>
using Vector = Eigen::Matrix<double, N, 1>;

/// Linear-Gaussian belief over an N-dimensional state.
template <int N>
struct Gaussian {
  Vector<N> mean;
  Matrix<N> covariance;
};

template <int N>
Matrix<N> symmetrized(const Matrix<N>& m) {
  return 0.5 * (m + m.transpose());
}

template <int N>
Gaussian<N> predict_gaussian(const Gaussian<N>& prior, const Matrix<N>& transition,
                             const Matrix<N>& process_noise) {
  Gaussian<N> out;
  out.mean = transition * prior.mean;
  out.covariance =
      symmetrized<N>(transition * prior.covariance * transition.transpose() + process_noise);
  return out;
}

/// Predictive distribution of a measurement: innovation y = z − H·mean and
/// the Cholesky factor of S = H·P·Hᵀ + R.
template <int N, int M>
struct Innovation {
  Vector<M> residual;
  Matrix<M> covariance;
  Eigen::LLT<Matrix<M>> factor;

  double mahalanobis_sq() const { return residual.dot(factor.solve(residual)); }

  double log_det() const {
    const auto& l = factor.matrixLLT();
    double acc = 0.0;
    for (int i = 0; i < M; ++i) acc += std::log(l(i, i));
    return 2.0 * acc;
  }
};

template <int N, int M>
Innovation<N, M> innovation(const Gaussian<N>& belief, const Vector<M>& z,
                            const Matrix<M, N>& observation,
                            const Matrix<M>& measurement_noise) {
  Innovation<N, M> inn;
  inn.residual = z - observation * belief.mean;
  inn.covariance = symmetrized<M>(observation * belief.covariance * observation.transpose() +
                                  measurement_noise);
  inn.factor.compute(inn.covariance);
  if (inn.factor.info() != Eigen::Success) throw DegenerateInnovation();
  for (int i = 0; i < M; ++i) {
    const double d = inn.factor.matrixLLT()(i, i);
    if (!(d > 0.0) || !std::isfinite(d)) throw DegenerateInnovation();
  }
  return inn;
}

template <int N, int M>
Gaussian<N> update_gaussian(const Gaussian<N>& prior, const Vector<M>& z,
                            const Matrix<M, N>& observation,
                            const Matrix<M>& measurement_noise) {
  const auto inn = innovation<N, M>(prior, z, observation, measurement_noise);
  // K = P Hᵀ S⁻¹, computed as (S⁻¹ H P)ᵀ since S and P are symmetric.
  const Matrix<N, M> gain =
      inn.factor.solve(observation * prior.covariance).transpose();
  Gaussian<N> out;
  out.mean = prior.mean + gain * inn.residual;
  out.covariance = symmetrized<N>((Matrix<N>::Identity() - gain * observation) *
                                  prior.covariance);
  return out;
}

template <int N, int M>
double mahalanobis_sq(const Gaussian<N>& belief, const Vector<M>& z,
                      const Matrix<M, N>& observation, const Matrix<M>& measurement_noise) {
  return innovation<N, M>(belief, z, observation, measurement_noise).mahalanobis_sq();
}

/// log N(z; H·mean, S).
template <int N, int M>
double log_likelihood_gaussian(const Gaussian<N>& belief, const Vector<M>& z,
                               const Matrix<M, N>& observation,
                               const Matrix<M>& measurement_noise) {
  const auto inn = innovation<N, M>(belief, z, observation, measurement_noise);
  return -0.5 * (inn.mahalanobis_sq() + inn.log_det() +
                 M * std::log(2.0 * std::numbers::pi));
}

}  // namespace kalman

inline constexpr int kStateDim = 8;
inline constexpr int kMeasurementDim = 4;

using StateVector = kalman::Vector<kStateDim>;
using StateMatrix = kalman::Matrix<kStateDim>;
using MeasurementVector = kalman::Vector<kMeasurementDim>;
using MeasurementMatrix = kalman::Matrix<kMeasurementDim>;
using ObservationMatrix = kalman::Matrix<kMeasurementDim, kStateDim>;

/// Gaussian over (cx, cy, w, h, vcx, vcy, vw, vh); velocities in pixels/frame.
struct KalmanTrackState : kalman::Gaussian<kStateDim> {
  /// Mean position/size as a box. Throws std::invalid_argument if the
  /// predicted size has collapsed to a non-positive value.
  BoundingBox box() const;
  bool has_valid_box() const;
};

/// Standard deviations as fractions of the current box height.
struct NoiseScales {
  double pos_sigma_scale = 1.0 / 20.0;
  double vel_sigma_scale = 1.0 / 160.0;
  double meas_sigma_scale = 1.0 / 20.0;
};

/// Constant-velocity motion model with height-scaled noise.
class MotionModel {
 public:
  explicit MotionModel(NoiseScales scales = {});

  const NoiseScales& scales() const { return scales_; }

  /// F(dt): position and size advance by dt times their velocity.
  StateMatrix transition(int dt) const;
  /// H: extracts (cx, cy, w, h).
  const ObservationMatrix& observation() const { return observation_; }
  /// One-frame process noise Q evaluated at a state mean.
  StateMatrix process_noise(const StateVector& mean) const;
  /// R evaluated at a state mean.
  MeasurementMatrix measurement_noise(const StateVector& mean) const;
  StateMatrix initial_covariance(const BoundingBox& box) const;

 private:
  NoiseScales scales_;
  ObservationMatrix observation_;
};

MeasurementVector to_measurement(const BoundingBox& box);

KalmanTrackState initiate(const Detection& det, const MotionModel& model);

/// Advances `state` by dt ≥ 1 frames: F·mean, F·P·Fᵀ + dt·Q.
KalmanTrackState predict(const KalmanTrackState& state, const MotionModel& model, int dt);

KalmanTrackState update(const KalmanTrackState& state, const Detection& det,
                        const MotionModel& model);

/// Squared Mahalanobis distance of the detection under N(H·mean, S).
double gating_distance(const KalmanTrackState& state, const Detection& det,
                       const MotionModel& model);

/// −½ (d² + log det S + 4 log 2π).
double log_likelihood(const KalmanTrackState& state, const Detection& det,
                      const MotionModel& model);

}  // namespace ensmot
