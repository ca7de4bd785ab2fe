#include "navkf/ekf.hpp"

namespace navkf {

Mat15 numeric_jacobian_f(const NavState& x, const ImuSample& u, double dt,
                         const Vec3& gravity, double eps) {
  Mat15 jac;
  const Vec6 zero_noise = Vec6::Zero();
  for (int i = 0; i < kTangentDim; ++i) {
    Vec15 e = Vec15::Zero();
    e(i) = eps;
    const NavState plus =
        state_transition(state_oplus(x, e), u, zero_noise, dt, gravity);
    const NavState minus =
        state_transition(state_oplus(x, Vec15(-e)), u, zero_noise, dt, gravity);
    jac.col(i) = state_ominus(plus, minus) / (2.0 * eps);
  }
  return jac;
}

Mat15x6 numeric_jacobian_noise(const NavState& x, const ImuSample& u,
                               double dt, const Vec3& gravity, double eps) {
  Mat15x6 jac;
  for (int i = 0; i < kNoiseDim; ++i) {
    Vec6 n = Vec6::Zero();
    n(i) = eps;
    const NavState plus = state_transition(x, u, n, dt, gravity);
    const NavState minus = state_transition(x, u, Vec6(-n), dt, gravity);
    jac.col(i) = state_ominus(plus, minus) / (2.0 * eps);
  }
  return jac;
}

MatX numeric_jacobian_h(const NavState& x, const std::vector<Vec3>& f_w,
                        double eps) {
  if (f_w.empty()) {
    throw EmptyFeatureSet("numeric_jacobian_h: no feature points");
  }
  MatX jac(3 * f_w.size(), kTangentDim);
  for (int i = 0; i < kTangentDim; ++i) {
    Vec15 e = Vec15::Zero();
    e(i) = eps;
    const VecX plus = measurement(state_oplus(x, e), f_w);
    const VecX minus = measurement(state_oplus(x, Vec15(-e)), f_w);
    jac.col(i) = (plus - minus) / (2.0 * eps);
  }
  return jac;
}

NavEkf::NavEkf(const NavState& x0, const Mat15& p0, const NoiseConfig& cfg,
               const EkfOptions& opt, std::int64_t t0_ns)
    : cfg_(cfg), opt_(opt) {
  if ((p0 - p0.transpose()).cwiseAbs().maxCoeff() > 1e-6 || !p0.allFinite()) {
    throw BadCovariance("initial covariance is not symmetric");
  }
  est_.x = x0;
  est_.p = symmetrized(p0);
  est_.t_ns = t0_ns;
}

FilterEstimate NavEkf::update_with(
    const FilterEstimate& pred, const VecX& z, const MatX& meas_cov,
    const std::function<VecX(const NavState&)>& h, const MatX& h_jac,
    double* cond_out, double* innovation_norm_out) const {
  const VecX z_hat = h(pred.x);
  GaussianJoint joint;
  joint.mean_a = VecX::Zero(kTangentDim);
  joint.mean_b = z_hat;
  joint.p_a = pred.p;
  joint.p_b = symmetrized(h_jac * pred.p * h_jac.transpose() + meas_cov);
  joint.p_ab = pred.p * h_jac.transpose();
  auto [delta, p_new] = gaussian_condition(joint, z, cond_out);
  if (innovation_norm_out) *innovation_norm_out = (z - z_hat).norm();

  FilterEstimate out;
  out.x = state_oplus(pred.x, Vec15(delta));
  out.p = symmetrized(p_new);
  out.t_ns = pred.t_ns;
  return out;
}

const FilterEstimate& NavEkf::step(const ImuSample& u,
                                   const std::optional<FeatureFrame>& frame) {
  if (u.t_ns <= est_.t_ns) {
    throw NonMonotoneTime("step: IMU timestamp does not advance");
  }
  const double dt = static_cast<double>(u.t_ns - est_.t_ns) * 1e-9;

  const Mat15 f_jac =
      numeric_jacobian_f(est_.x, u, dt, cfg_.gravity, opt_.jacobian_eps);
  const Mat15x6 g_jac =
      numeric_jacobian_noise(est_.x, u, dt, cfg_.gravity, opt_.jacobian_eps);
  Mat3 c_x_gyro = cfg_.c_gyro;
  Mat3 c_x_accel = cfg_.c_accel;
  Mat15 cw = process_noise_matrix(cfg_);
  if (opt_.scale_bias_walk_with_dt) cw *= dt;

  FilterEstimate pred;
  pred.x = state_transition(est_.x, u, Vec6::Zero(), dt, cfg_.gravity);
  Eigen::Matrix<double, 6, 6> c_x = Eigen::Matrix<double, 6, 6>::Zero();
  c_x.topLeftCorner<3, 3>() = c_x_gyro;
  c_x.bottomRightCorner<3, 3>() = c_x_accel;
  pred.p = symmetrized(f_jac * est_.p * f_jac.transpose() + cw +
                       g_jac * c_x * g_jac.transpose());
  pred.t_ns = u.t_ns;

  StepDiagnostics d;
  d.t_ns = u.t_ns;
  if (frame.has_value()) {
    if (frame->size() == 0) {
      throw EmptyFeatureSet("step: feature frame is empty");
    }
    VecX z(3 * frame->size());
    for (size_t i = 0; i < frame->size(); ++i) {
      z.segment<3>(3 * i) = frame->f_b[i];
    }
    const MatX c_f =
        measurement_noise_matrix(cfg_.c_f, static_cast<int>(frame->size()));
    const MatX h_jac =
        numeric_jacobian_h(pred.x, frame->f_w, opt_.jacobian_eps);
    est_ = update_with(
        pred, z, c_f,
        [&frame](const NavState& x) { return measurement(x, frame->f_w); },
        h_jac, &d.cond_estimate, &d.innovation_norm);
    d.updated = true;
  } else {
    est_ = pred;
  }
  d.trace_p = est_.p.trace();
  diag_.push_back(d);
  return est_;
}

}  // namespace navkf
