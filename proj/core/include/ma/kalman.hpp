#pragma once

#include <Eigen/Dense>

#include "ma/mask.hpp"

namespace ma {

// State layout (u, v, s, r, du, dv, ds): box center, area, aspect ratio
// and the velocities of the first three. Aspect ratio carries no velocity.
inline constexpr int kStateDim = 7;
inline constexpr int kObsDim = 4;

using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using StateMatrix = Eigen::Matrix<double, kStateDim, kStateDim>;
using Observation = Eigen::Matrix<double, kObsDim, 1>;  // (u, v, s, r)

struct KalmanState {
  StateVector mean = StateVector::Zero();
  StateMatrix covariance = StateMatrix::Identity();
};

/// Noise convention for the constant-velocity box filter. `sigma` is a
/// per-track length scale derived from the initial box; all covariances
/// scale with sigma^2.
struct KalmanNoise {
  double sigma = 1.0;
  double initial_center_var = 1.0;
  double initial_shape_var = 10.0;
  double initial_velocity_var = 1e4;
  double process_position_var = 1e-2;
  double process_velocity_var = 1e-4;
  double measurement_center_var = 1.0;
  double measurement_shape_var = 10.0;
};

/// Continuous half-open box [x0, x1) x [y0, y1). An inclusive integer pixel
/// box (x_min..x_max) embeds as [x_min, x_max + 1).
struct BoxF {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
};

BoxF to_boxf(const BoundingBox& box);

/// IoU of two continuous boxes; consistent with iou() on embedded pixel boxes.
double iou(const BoxF& a, const BoxF& b);

/// (center x, center y, area, aspect ratio) of a pixel box.
Observation box_to_observation(const BoundingBox& box);

/// Inverse of box_to_observation; clamps area and ratio to >= 1e-6.
BoxF observation_to_box(const Observation& z);

/// Track length scale used to set sigma: half the box perimeter mean.
double box_scale(const BoundingBox& box);

KalmanState kalman_init(const Observation& z, const KalmanNoise& noise);

/// Constant-velocity prediction: adds (du, dv, ds) to (u, v, s), keeps r.
KalmanState kalman_predict(const KalmanState& state, const KalmanNoise& noise);

/// Standard measurement update with H selecting (u, v, s, r).
/// Throws InputError when the observed area or aspect ratio is not positive.
KalmanState kalman_update(const KalmanState& state, const Observation& z,
                          const KalmanNoise& noise);

}  // namespace ma
