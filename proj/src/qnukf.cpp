#include "navkf/qnukf.hpp"

namespace navkf {

namespace {

void check_p0(const Mat15& p0) {
  if (!p0.allFinite()) {
    throw BadCovariance("initial covariance has non-finite entries");
  }
  if ((p0 - p0.transpose()).cwiseAbs().maxCoeff() > 1e-6) {
    throw BadCovariance("initial covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat15> eig(symmetrized(p0));
  const double scale = std::max(p0.trace(), 1.0);
  if (eig.eigenvalues().minCoeff() < -1e-9 * scale) {
    throw BadCovariance("initial covariance is not positive semidefinite");
  }
}

Mat15 effective_process_noise(const NoiseConfig& cfg, bool scale_with_dt,
                              double dt) {
  Mat15 cw = process_noise_matrix(cfg);
  if (scale_with_dt) cw *= dt;
  return cw;
}

}  // namespace

Qnukf::Qnukf(const NavState& x0, const Mat15& p0, const NoiseConfig& cfg,
             const QnukfOptions& opt, std::int64_t t0_ns)
    : cfg_(cfg), opt_(opt) {
  check_p0(p0);
  if (opt_.ut.dof != kAugTangentDim) {
    throw Error("Qnukf: UT dof must equal the augmented tangent dimension");
  }
  std::tie(wm_, wc_) = ut_weights(opt_.ut);
  est_.x = x0;
  est_.p = symmetrized(p0);
  est_.t_ns = t0_ns;
}

AugmentedEstimate Qnukf::augment(const FilterEstimate& est,
                                 const NoiseConfig& cfg) {
  AugmentedEstimate aug;
  aug.x = est.x;
  aug.p_a.setZero();
  aug.p_a.topLeftCorner<kTangentDim, kTangentDim>() = est.p;
  aug.p_a.block<3, 3>(kTangentDim, kTangentDim) = cfg.c_gyro;
  aug.p_a.block<3, 3>(kTangentDim + 3, kTangentDim + 3) = cfg.c_accel;
  return aug;
}

std::vector<AugmentedPoint> Qnukf::manifold_sigma_points(
    const AugmentedEstimate& aug, const UtParams& params) {
  const int n = kAugTangentDim;
  if (params.dof != n || !(n + params.lambda > 0.0)) {
    throw Error("manifold_sigma_points: invalid UT parameters");
  }
  const MatX s = sqrt_psd((n + params.lambda) * aug.p_a);

  std::vector<AugmentedPoint> points(2 * n + 1);
  points[0].x = aug.x;
  for (int j = 0; j < n; ++j) {
    const VecX delta = s.col(j);
    AugmentedPoint& plus = points[1 + j];
    plus.x = state_oplus(aug.x, delta.head<kTangentDim>());
    plus.noise = delta.tail<kNoiseDim>();

    AugmentedPoint& minus = points[1 + n + j];
    minus.x.q = ominus(aug.x.q, RotVec(delta.segment<3>(kAtt)));
    minus.x.p = aug.x.p - delta.segment<3>(kPos);
    minus.x.v = aug.x.v - delta.segment<3>(kVel);
    minus.x.b_w = aug.x.b_w - delta.segment<3>(kBg);
    minus.x.b_a = aug.x.b_a - delta.segment<3>(kBa);
    minus.noise = -delta.tail<kNoiseDim>();
  }
  return points;
}

PredictionBundle Qnukf::predict(const FilterEstimate& est, const ImuSample& u,
                                double dt) const {
  if (!(dt > 0.0)) {
    throw NonMonotoneTime("predict: dt must be positive");
  }
  const AugmentedEstimate aug = augment(est, cfg_);
  const std::vector<AugmentedPoint> points =
      manifold_sigma_points(aug, opt_.ut);

  PredictionBundle bundle;
  bundle.t_ns = u.t_ns;
  bundle.sigma_states.resize(points.size());
  for (size_t j = 0; j < points.size(); ++j) {
    bundle.sigma_states[j] =
        state_transition(points[j].x, u, points[j].noise, dt, cfg_.gravity);
  }

  // Predicted mean: weighted quaternion mean on the attitude block,
  // plain weighted sums elsewhere.
  std::vector<UnitQuaternion> quats;
  std::vector<double> weights(wm_.data(), wm_.data() + wm_.size());
  quats.reserve(points.size());
  for (const NavState& s : bundle.sigma_states) quats.push_back(s.q);
  try {
    bundle.x_pred.q = quat_weighted_mean(quats, weights);
  } catch (const DegenerateMean&) {
    // Pathological sigma spread; keep the filter alive on the central point.
    bundle.x_pred.q = bundle.sigma_states[0].q;
    bundle.mean_fallback = true;
  }
  Vec3 p = Vec3::Zero(), v = Vec3::Zero(), bw = Vec3::Zero(),
       ba = Vec3::Zero();
  for (size_t j = 0; j < bundle.sigma_states.size(); ++j) {
    const NavState& s = bundle.sigma_states[j];
    const double w = wm_(static_cast<Eigen::Index>(j));
    p += w * s.p;
    v += w * s.v;
    bw += w * s.b_w;
    ba += w * s.b_a;
  }
  bundle.x_pred.p = p;
  bundle.x_pred.v = v;
  bundle.x_pred.b_w = bw;
  bundle.x_pred.b_a = ba;

  Mat15 cov = Mat15::Zero();
  for (size_t j = 0; j < bundle.sigma_states.size(); ++j) {
    const Vec15 d = state_ominus(bundle.sigma_states[j], bundle.x_pred);
    cov += wc_(static_cast<Eigen::Index>(j)) * d * d.transpose();
  }
  cov += effective_process_noise(cfg_, opt_.scale_bias_walk_with_dt, dt);
  bundle.p_pred = 0.5 * (cov + cov.transpose());
  if (opt_.eigenvalue_floor) {
    bundle.p_pred = floor_eigenvalues(bundle.p_pred, 0.0);
  }
  return bundle;
}

FilterEstimate Qnukf::update_with(
    const PredictionBundle& bundle, const VecX& z, const MatX& meas_cov,
    const std::function<VecX(const NavState&)>& h, double* cond_out,
    double* innovation_norm_out) const {
  const auto count = bundle.sigma_states.size();
  std::vector<VecX> z_sigma(count);
  for (size_t j = 0; j < count; ++j) z_sigma[j] = h(bundle.sigma_states[j]);

  VecX z_hat = VecX::Zero(z.size());
  for (size_t j = 0; j < count; ++j) {
    z_hat += wm_(static_cast<Eigen::Index>(j)) * z_sigma[j];
  }

  MatX p_zz = MatX(meas_cov);
  MatX p_xz = MatX::Zero(kTangentDim, z.size());
  for (size_t j = 0; j < count; ++j) {
    const double w = wc_(static_cast<Eigen::Index>(j));
    const VecX dz = z_sigma[j] - z_hat;
    const Vec15 dx = state_ominus(bundle.sigma_states[j], bundle.x_pred);
    p_zz += w * dz * dz.transpose();
    p_xz += w * dx * dz.transpose();
  }
  p_zz = symmetrized(p_zz);

  GaussianJoint joint;
  joint.mean_a = VecX::Zero(kTangentDim);  // correction in the tangent space
  joint.mean_b = z_hat;
  joint.p_a = bundle.p_pred;
  joint.p_b = p_zz;
  joint.p_ab = p_xz;
  auto [delta, p_new] = gaussian_condition(joint, z, cond_out);
  if (innovation_norm_out) *innovation_norm_out = (z - z_hat).norm();

  FilterEstimate out;
  out.x = state_oplus(bundle.x_pred, Vec15(delta));
  out.p = symmetrized(p_new);
  if (opt_.eigenvalue_floor) out.p = floor_eigenvalues(out.p, 0.0);
  out.t_ns = bundle.t_ns;
  return out;
}

FilterEstimate Qnukf::update(const PredictionBundle& bundle,
                             const FeatureFrame& frame, double* cond_out,
                             double* innovation_norm_out) const {
  if (frame.size() == 0) {
    throw EmptyFeatureSet("update: feature frame is empty");
  }
  VecX z(3 * frame.size());
  for (size_t i = 0; i < frame.size(); ++i) {
    z.segment<3>(3 * i) = frame.f_b[i];
  }
  const MatX c_f =
      measurement_noise_matrix(cfg_.c_f, static_cast<int>(frame.size()));
  return update_with(
      bundle, z, c_f,
      [&frame](const NavState& x) { return measurement(x, frame.f_w); },
      cond_out, innovation_norm_out);
}

const FilterEstimate& Qnukf::step(const ImuSample& u,
                                  const std::optional<FeatureFrame>& frame) {
  if (u.t_ns <= est_.t_ns) {
    throw NonMonotoneTime("step: IMU timestamp does not advance");
  }
  const double dt = static_cast<double>(u.t_ns - est_.t_ns) * 1e-9;
  const PredictionBundle bundle = predict(est_, u, dt);

  StepDiagnostics d;
  d.t_ns = u.t_ns;
  d.mean_fallback = bundle.mean_fallback;
  if (frame.has_value()) {
    est_ = update(bundle, *frame, &d.cond_estimate, &d.innovation_norm);
    d.updated = true;
  } else {
    est_.x = bundle.x_pred;
    est_.p = bundle.p_pred;
    est_.t_ns = bundle.t_ns;
  }
  d.trace_p = est_.p.trace();
  diag_.push_back(d);
  return est_;
}

}  // namespace navkf
