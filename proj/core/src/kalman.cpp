#include <cmath>

#include <Eigen/Cholesky>

#include "egotrack/error.hpp"
#include "egotrack/tracking.hpp"

namespace egotrack {

KalmanNoise KalmanNoise::defaults() {
  KalmanNoise n;
  n.process = Matrix6d::Identity() * 1e-4;
  n.measurement = Eigen::Matrix3d::Identity() * 2.5e-3;
  n.initial_covariance = Matrix6d::Identity() * 1e-2;
  return n;
}

Matrix3x6d KalmanState::observation() {
  Matrix3x6d h = Matrix3x6d::Zero();
  h.leftCols<3>().setIdentity();
  return h;
}

Matrix6d KalmanState::transition() {
  Matrix6d f = Matrix6d::Identity();
  f.topRightCorner<3, 3>().setIdentity();
  return f;
}

KalmanState KalmanState::initialize(const Point3& z, const KalmanNoise& noise) {
  KalmanState s;
  s.x_hat.head<3>() = z;
  s.x_hat.tail<3>().setZero();
  s.P = noise.initial_covariance;
  s.Q = noise.process;
  s.R = noise.measurement;
  return s;
}

KalmanState kalman_predict(const KalmanState& state) {
  static const Matrix6d F = KalmanState::transition();
  KalmanState out = state;
  out.x_hat = F * state.x_hat;
  out.P = F * state.P * F.transpose() + state.Q;
  return out;
}

KalmanState kalman_update(const KalmanState& state, const Point3& z) {
  if (!z.allFinite()) throw Error(ErrorCode::kInvalidArgument, "non-finite measurement");
  static const Matrix3x6d H = KalmanState::observation();
  const Eigen::Matrix3d S = H * state.P * H.transpose() + state.R;
  const Eigen::LDLT<Eigen::Matrix3d> ldlt(S);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= 1e-15 * std::max(1.0, ldlt.vectorD().maxCoeff())) {
    throw Error(ErrorCode::kSingularInnovation, "innovation covariance is singular");
  }
  // K = P H^T S^-1, computed as (S^-1 H P)^T since S and P are symmetric.
  const Matrix6x3d K = ldlt.solve(H * state.P).transpose();
  KalmanState out = state;
  out.x_hat = state.x_hat + K * (z - H * state.x_hat);
  out.P = (Matrix6d::Identity() - K * H) * state.P;
  out.P = 0.5 * (out.P + out.P.transpose()).eval();
  return out;
}

KalmanStep kalman_step_with_reset(const KalmanState& state, const Point3& z,
                                  double reset_threshold, const Matrix6d& initial_covariance) {
  const KalmanState predicted = kalman_predict(state);
  const double innovation = (z - predicted.position()).norm();
  if (innovation > reset_threshold) {
    KalmanState reset = state;
    reset.x_hat.head<3>() = z;
    reset.x_hat.tail<3>().setZero();
    reset.P = initial_covariance;
    return {reset, true, innovation};
  }
  return {kalman_update(predicted, z), false, innovation};
}

}  // namespace egotrack
