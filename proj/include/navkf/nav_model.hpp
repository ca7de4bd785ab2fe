#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "navkf/rotation.hpp"
#include "navkf/unscented.hpp"

namespace navkf {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec15 = Eigen::Matrix<double, 15, 1>;
using Mat15 = Eigen::Matrix<double, 15, 15>;

/// Tangent-space block offsets in the 15-dim error vector
/// [d_att(3), d_pos(3), d_vel(3), d_gyro_bias(3), d_accel_bias(3)].
inline constexpr int kAtt = 0;
inline constexpr int kPos = 3;
inline constexpr int kVel = 6;
inline constexpr int kBg = 9;
inline constexpr int kBa = 12;
inline constexpr int kTangentDim = 15;
inline constexpr int kNoiseDim = 6;    // gyro + accel white noise
inline constexpr int kAugTangentDim = kTangentDim + kNoiseDim;  // 21

/// Full navigation state: attitude (body-to-world), position and velocity
/// in the world frame, and IMU biases in the body frame. 16 scalar entries;
/// perturbations live in the 15-dim tangent space.
struct NavState {
  UnitQuaternion q;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 b_w = Vec3::Zero();  // gyro bias, rad/s
  Vec3 b_a = Vec3::Zero();  // accel bias, m/s^2

  bool is_finite() const {
    return q.is_finite() && p.allFinite() && v.allFinite() &&
           b_w.allFinite() && b_a.allFinite();
  }
};

/// One IMU reading: body-frame angular velocity and specific acceleration.
struct ImuSample {
  std::int64_t t_ns = 0;
  Vec3 omega_m = Vec3::Zero();  // rad/s
  Vec3 accel_m = Vec3::Zero();  // m/s^2
};

/// Sensor-noise and environment configuration shared by filters and the
/// simulator. Covariances are per discrete step.
struct NoiseConfig {
  Mat3 c_gyro = Mat3::Zero();        // white gyro noise
  Mat3 c_accel = Mat3::Zero();       // white accel noise
  Mat3 c_gyro_bias = Mat3::Zero();   // gyro bias random walk
  Mat3 c_accel_bias = Mat3::Zero();  // accel bias random walk
  double c_f = 1e-3;                 // feature noise std per axis, m
  Vec3 gravity = Vec3(0.0, 0.0, -9.80665);  // world frame, z-up
};

/// A camera-epoch set of feature observations: world coordinates paired
/// with the body-frame coordinates measured at that instant.
struct FeatureFrame {
  std::int64_t t_ns = 0;
  std::vector<std::int64_t> ids;
  std::vector<Vec3> f_w;  // world frame, m
  std::vector<Vec3> f_b;  // body frame, m

  std::size_t size() const { return ids.size(); }
};

/// One discrete step of the strapdown kinematics with the IMU model
/// inverted: omega = omega_m - b_w - n_w, a = accel_m - b_a - n_a, then
///   q+ = q (x) q_r(omega dT)
///   w  = g + R(q) a
///   p+ = p + v dT + w dT^2 / 2
///   v+ = v + w dT
/// Biases pass through unchanged (their walk enters via the filter's
/// process noise). Throws NonFiniteInput.
NavState state_transition(const NavState& x, const ImuSample& u,
                          const Vec6& noise, double dt, const Vec3& gravity);

/// Stacked body-frame coordinates of the given world points as seen from x:
/// block i = R(q)^T (f_w[i] - p). Throws EmptyFeatureSet.
VecX measurement(const NavState& x, const std::vector<Vec3>& f_w);

/// Blockwise manifold retraction: attitude via oplus, the rest by addition.
NavState state_oplus(const NavState& x, const Vec15& d);

/// Blockwise difference: attitude via the quaternion error rotation vector,
/// the rest by subtraction. Inverse of state_oplus for |d_att| < pi.
Vec15 state_ominus(const NavState& x1, const NavState& x2);

/// 15x15 per-step process noise: zero on attitude/position/velocity,
/// the bias-walk covariances on the bias blocks.
Mat15 process_noise_matrix(const NoiseConfig& cfg);

/// c_f^2 I of dimension 3*m_f. Throws on m_f < 1 or c_f <= 0.
MatX measurement_noise_matrix(double c_f, int m_f);

}  // namespace navkf
