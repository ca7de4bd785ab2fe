#include "navkf/nav_model.hpp"

namespace navkf {

NavState state_transition(const NavState& x, const ImuSample& u,
                          const Vec6& noise, double dt, const Vec3& gravity) {
  if (!x.is_finite() || !u.omega_m.allFinite() || !u.accel_m.allFinite() ||
      !noise.allFinite() || !std::isfinite(dt)) {
    throw NonFiniteInput("state_transition: non-finite input");
  }
  const Vec3 omega = u.omega_m - x.b_w - noise.head<3>();
  const Vec3 accel = u.accel_m - x.b_a - noise.tail<3>();
  const Vec3 w = gravity + quat_to_rot(x.q) * accel;

  NavState out;
  out.q = qmul(x.q, rotvec_to_quat(omega * dt));
  out.p = x.p + x.v * dt + 0.5 * w * dt * dt;
  out.v = x.v + w * dt;
  out.b_w = x.b_w;
  out.b_a = x.b_a;
  return out;
}

VecX measurement(const NavState& x, const std::vector<Vec3>& f_w) {
  if (f_w.empty()) {
    throw EmptyFeatureSet("measurement: no feature points");
  }
  const Mat3 rt = quat_to_rot(x.q).transpose();
  VecX z(3 * f_w.size());
  for (size_t i = 0; i < f_w.size(); ++i) {
    z.segment<3>(3 * i) = rt * (f_w[i] - x.p);
  }
  return z;
}

NavState state_oplus(const NavState& x, const Vec15& d) {
  NavState out;
  out.q = oplus(x.q, d.segment<3>(kAtt));
  out.p = x.p + d.segment<3>(kPos);
  out.v = x.v + d.segment<3>(kVel);
  out.b_w = x.b_w + d.segment<3>(kBg);
  out.b_a = x.b_a + d.segment<3>(kBa);
  return out;
}

Vec15 state_ominus(const NavState& x1, const NavState& x2) {
  Vec15 d;
  d.segment<3>(kAtt) = ominus(x1.q, x2.q);
  d.segment<3>(kPos) = x1.p - x2.p;
  d.segment<3>(kVel) = x1.v - x2.v;
  d.segment<3>(kBg) = x1.b_w - x2.b_w;
  d.segment<3>(kBa) = x1.b_a - x2.b_a;
  return d;
}

Mat15 process_noise_matrix(const NoiseConfig& cfg) {
  Mat15 q = Mat15::Zero();
  q.block<3, 3>(kBg, kBg) = cfg.c_gyro_bias;
  q.block<3, 3>(kBa, kBa) = cfg.c_accel_bias;
  return q;
}

MatX measurement_noise_matrix(double c_f, int m_f) {
  if (m_f < 1) {
    throw EmptyFeatureSet("measurement_noise_matrix: m_f must be >= 1");
  }
  if (!(c_f > 0.0)) {
    throw Error("measurement_noise_matrix: c_f must be positive");
  }
  return c_f * c_f * MatX::Identity(3 * m_f, 3 * m_f);
}

}  // namespace navkf
