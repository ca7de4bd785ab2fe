#pragma once

#include <functional>
#include <optional>

#include "navkf/qnukf.hpp"

namespace navkf {

using Mat15x6 = Eigen::Matrix<double, 15, 6>;

/// Central-difference Jacobian of the state transition over tangent-space
/// perturbations of x (noise held at zero).
Mat15 numeric_jacobian_f(const NavState& x, const ImuSample& u, double dt,
                         const Vec3& gravity, double eps = 1e-6);

/// Central-difference Jacobian of the transition w.r.t. the 6 white-noise
/// axes (gyro, accel).
Mat15x6 numeric_jacobian_noise(const NavState& x, const ImuSample& u,
                               double dt, const Vec3& gravity,
                               double eps = 1e-6);

/// Central-difference Jacobian of the feature measurement over tangent-space
/// perturbations of x.
MatX numeric_jacobian_h(const NavState& x, const std::vector<Vec3>& f_w,
                        double eps = 1e-6);

struct EkfOptions {
  bool scale_bias_walk_with_dt = false;
  double jacobian_eps = 1e-6;
};

/// Error-state EKF baseline sharing the navigation model with the unscented
/// filter: numeric Jacobians on the 15-dim tangent, quaternion correction
/// through the same retraction.
class NavEkf {
 public:
  NavEkf(const NavState& x0, const Mat15& p0, const NoiseConfig& cfg,
         const EkfOptions& opt = {}, std::int64_t t0_ns = 0);

  const FilterEstimate& estimate() const { return est_; }
  const std::vector<StepDiagnostics>& diagnostics() const { return diag_; }
  std::vector<StepDiagnostics>& diagnostics() { return diag_; }

  const FilterEstimate& step(const ImuSample& u,
                             const std::optional<FeatureFrame>& frame);

  /// Correction with an arbitrary measurement function and its Jacobian.
  FilterEstimate update_with(const FilterEstimate& pred, const VecX& z,
                             const MatX& meas_cov,
                             const std::function<VecX(const NavState&)>& h,
                             const MatX& h_jac, double* cond_out = nullptr,
                             double* innovation_norm_out = nullptr) const;

 private:
  FilterEstimate est_;
  NoiseConfig cfg_;
  EkfOptions opt_;
  std::vector<StepDiagnostics> diag_;
};

}  // namespace navkf
