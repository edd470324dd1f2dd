#include "ma/kalman.hpp"

#include <algorithm>
#include <cmath>

#include "ma/error.hpp"

namespace ma {

namespace {

StateMatrix transition_matrix() {
  StateMatrix f = StateMatrix::Identity();
  f(0, 4) = 1.0;
  f(1, 5) = 1.0;
  f(2, 6) = 1.0;
  return f;
}

Eigen::Matrix<double, kObsDim, kStateDim> observation_matrix() {
  Eigen::Matrix<double, kObsDim, kStateDim> h;
  h.setZero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  h(2, 2) = 1.0;
  h(3, 3) = 1.0;
  return h;
}

StateMatrix process_noise(const KalmanNoise& noise) {
  const double s2 = noise.sigma * noise.sigma;
  StateVector d;
  d << noise.process_position_var, noise.process_position_var,
      noise.process_position_var, noise.process_position_var,
      noise.process_velocity_var, noise.process_velocity_var,
      noise.process_velocity_var;
  return (d * s2).asDiagonal();
}

Eigen::Matrix<double, kObsDim, kObsDim> measurement_noise(const KalmanNoise& noise) {
  const double s2 = noise.sigma * noise.sigma;
  Eigen::Matrix<double, kObsDim, 1> d;
  d << noise.measurement_center_var, noise.measurement_center_var,
      noise.measurement_shape_var, noise.measurement_shape_var;
  return (d * s2).asDiagonal();
}

void symmetrize(StateMatrix& p) { p = ((p + p.transpose()) * 0.5).eval(); }

}  // namespace

BoxF to_boxf(const BoundingBox& box) {
  return BoxF{static_cast<double>(box.x_min), static_cast<double>(box.y_min),
              static_cast<double>(box.x_max + 1), static_cast<double>(box.y_max + 1)};
}

double iou(const BoxF& a, const BoxF& b) {
  const double ix = std::max(0.0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
  const double iy = std::max(0.0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
  const double inter = ix * iy;
  const double area_a = (a.x1 - a.x0) * (a.y1 - a.y0);
  const double area_b = (b.x1 - b.x0) * (b.y1 - b.y0);
  const double uni = area_a + area_b - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

Observation box_to_observation(const BoundingBox& box) {
  const double w = static_cast<double>(box.x_max - box.x_min + 1);
  const double h = static_cast<double>(box.y_max - box.y_min + 1);
  Observation z;
  z << box.x_min + 0.5 * w, box.y_min + 0.5 * h, w * h, w / h;
  return z;
}

BoxF observation_to_box(const Observation& z) {
  const double s = std::max(z(2), 1e-6);
  const double r = std::max(z(3), 1e-6);
  const double w = std::sqrt(s * r);
  const double h = s / w;
  return BoxF{z(0) - 0.5 * w, z(1) - 0.5 * h, z(0) + 0.5 * w, z(1) + 0.5 * h};
}

double box_scale(const BoundingBox& box) {
  const double w = static_cast<double>(box.x_max - box.x_min + 1);
  const double h = static_cast<double>(box.y_max - box.y_min + 1);
  return std::max(1.0, 0.5 * (w + h));
}

KalmanState kalman_init(const Observation& z, const KalmanNoise& noise) {
  KalmanState state;
  state.mean.setZero();
  state.mean.head<kObsDim>() = z;
  const double s2 = noise.sigma * noise.sigma;
  StateVector d;
  d << noise.initial_center_var, noise.initial_center_var,
      noise.initial_shape_var, noise.initial_shape_var,
      noise.initial_velocity_var, noise.initial_velocity_var,
      noise.initial_velocity_var;
  state.covariance = (d * s2).asDiagonal();
  return state;
}

KalmanState kalman_predict(const KalmanState& state, const KalmanNoise& noise) {
  KalmanState out = state;
  // Componentwise so u += du is a single exact double addition.
  out.mean(0) += state.mean(4);
  out.mean(1) += state.mean(5);
  out.mean(2) += state.mean(6);
  const StateMatrix f = transition_matrix();
  out.covariance = f * state.covariance * f.transpose() + process_noise(noise);
  symmetrize(out.covariance);
  return out;
}

KalmanState kalman_update(const KalmanState& state, const Observation& z,
                          const KalmanNoise& noise) {
  if (!(z(2) > 0.0) || !(z(3) > 0.0)) {
    throw InputError("observation area and aspect ratio must be positive");
  }
  const auto h = observation_matrix();
  const Observation innovation = z - h * state.mean;
  const Eigen::Matrix<double, kObsDim, kObsDim> s =
      h * state.covariance * h.transpose() + measurement_noise(noise);
  const Eigen::Matrix<double, kStateDim, kObsDim> gain =
      state.covariance * h.transpose() * s.inverse();
  KalmanState out;
  out.mean = state.mean + gain * innovation;
  out.covariance =
      (StateMatrix::Identity() - gain * h) * state.covariance;
  symmetrize(out.covariance);
  return out;
}

}  // namespace ma
