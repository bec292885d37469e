#include "ensmot/kalman.hpp"

#include <stdexcept>

namespace ensmot {

namespace {

double height_of(const StateVector& mean) { return std::abs(mean(3)); }

StateMatrix diagonal_from_std(const kalman::Vector<kStateDim>& stddev) {
  return stddev.array().square().matrix().asDiagonal();
}

}  // namespace

BoundingBox KalmanTrackState::box() const {
  return BoundingBox::from_center(mean(0), mean(1), mean(2), mean(3));
}

bool KalmanTrackState::has_valid_box() const {
  return mean.allFinite() && mean(2) > 0.0 && mean(3) > 0.0;
}

MotionModel::MotionModel(NoiseScales scales) : scales_(scales) {
  if (scales.pos_sigma_scale < 0.0 || scales.vel_sigma_scale < 0.0 ||
      scales.meas_sigma_scale < 0.0) {
    throw std::invalid_argument("noise scales must be non-negative");
  }
  observation_.setZero();
  for (int i = 0; i < kMeasurementDim; ++i) observation_(i, i) = 1.0;
}

StateMatrix MotionModel::transition(int dt) const {
  StateMatrix f = StateMatrix::Identity();
  for (int i = 0; i < kMeasurementDim; ++i) f(i, i + kMeasurementDim) = static_cast<double>(dt);
  return f;
}

StateMatrix MotionModel::process_noise(const StateVector& mean) const {
  const double h = height_of(mean);
  const double p = scales_.pos_sigma_scale * h;
  const double v = scales_.vel_sigma_scale * h;
  kalman::Vector<kStateDim> sd;
  sd << p, p, p, p, v, v, v, v;
  return diagonal_from_std(sd);
}

MeasurementMatrix MotionModel::measurement_noise(const StateVector& mean) const {
  const double m = scales_.meas_sigma_scale * height_of(mean);
  return MeasurementMatrix::Identity() * (m * m);
}

StateMatrix MotionModel::initial_covariance(const BoundingBox& box) const {
  const double h = box.height();
  const double p = 2.0 * scales_.pos_sigma_scale * h;
  const double v = 10.0 * scales_.vel_sigma_scale * h;
  kalman::Vector<kStateDim> sd;
  sd << p, p, p, p, v, v, v, v;
  return diagonal_from_std(sd);
}

MeasurementVector to_measurement(const BoundingBox& box) {
  MeasurementVector z;
  z << box.center_x(), box.center_y(), box.width(), box.height();
  return z;
}

KalmanTrackState initiate(const Detection& det, const MotionModel& model) {
  KalmanTrackState s;
  s.mean.setZero();
  s.mean.head<kMeasurementDim>() = to_measurement(det.box());
  s.covariance = model.initial_covariance(det.box());
  return s;
}

KalmanTrackState predict(const KalmanTrackState& state, const MotionModel& model, int dt) {
  if (dt < 1) throw std::invalid_argument("predict requires dt >= 1");
  const StateMatrix q = static_cast<double>(dt) * model.process_noise(state.mean);
  KalmanTrackState out;
  static_cast<kalman::Gaussian<kStateDim>&>(out) =
      kalman::predict_gaussian<kStateDim>(state, model.transition(dt), q);
  return out;
}

KalmanTrackState update(const KalmanTrackState& state, const Detection& det,
                        const MotionModel& model) {
  KalmanTrackState out;
  static_cast<kalman::Gaussian<kStateDim>&>(out) =
      kalman::update_gaussian<kStateDim, kMeasurementDim>(
          state, to_measurement(det.box()), model.observation(),
          model.measurement_noise(state.mean));
  return out;
}

double gating_distance(const KalmanTrackState& state, const Detection& det,
                       const MotionModel& model) {
  return kalman::mahalanobis_sq<kStateDim, kMeasurementDim>(
      state, to_measurement(det.box()), model.observation(), model.measurement_noise(state.mean));
}

double log_likelihood(const KalmanTrackState& state, const Detection& det,
                      const MotionModel& model) {
  return kalman::log_likelihood_gaussian<kStateDim, kMeasurementDim>(
      state, to_measurement(det.box()), model.observation(), model.measurement_noise(state.mean));
}

}  // namespace ensmot
