#pragma once

#include <functional>
#include <optional>

#include "navkf/nav_model.hpp"

namespace navkf {

using Mat21 = Eigen::Matrix<double, kAugTangentDim, kAugTangentDim>;

/// Filter output at one time step: full state plus its 15x15 tangent-space
/// covariance. P is kept symmetric by construction.
struct FilterEstimate {
  NavState x;
  Mat15 p = Mat15::Zero();
  std::int64_t t_ns = 0;
};

/// State mean with the augmented 21x21 covariance blockdiag(P, C_x); the
/// appended noise means are zero and stay implicit.
struct AugmentedEstimate {
  NavState x;
  Mat21 p_a = Mat21::Zero();
};

/// One augmented sigma point: a state plus its own process-noise draw.
struct AugmentedPoint {
  NavState x;
  Vec6 noise = Vec6::Zero();
};

/// Propagated sigma points with the predicted mean and covariance.
struct PredictionBundle {
  std::vector<NavState> sigma_states;  // 2 * 21 + 1 = 43 entries
  NavState x_pred;
  Mat15 p_pred = Mat15::Zero();
  std::int64_t t_ns = 0;
  bool mean_fallback = false;  // quaternion mean was ambiguous this step
};

/// Per-step record for offline inspection.
struct StepDiagnostics {
  std::int64_t t_ns = 0;
  bool updated = false;
  double innovation_norm = 0.0;
  double trace_p = 0.0;
  double cond_estimate = 0.0;  // innovation-covariance condition, 0 if no update
  bool mean_fallback = false;
  double step_us = 0.0;  // filled by the runner
};

struct QnukfOptions {
  UtParams ut = UtParams::standard(kAugTangentDim);
  /// Clamp covariance eigenvalues at zero after each step. Off by default:
  /// the filter only symmetrizes, matching the update equations as written.
  bool eigenvalue_floor = false;
  /// Treat the bias-walk covariance as a per-second rate and scale it by dt
  /// instead of applying it per step. Off by default.
  bool scale_bias_walk_with_dt = false;
};

/// Unscented Kalman filter over the quaternion manifold. Sigma points are
/// placed with the state's oplus/ominus retraction so all covariances stay
/// in the reduced 15-dim (21-dim augmented) tangent space; the predicted
/// attitude mean is the weighted quaternion mean.
///
/// An instance owns one logical stream of step() calls. Instances are
/// independent; all member computation is deterministic.
class Qnukf {
 public:
  /// Throws BadCovariance if p0 is asymmetric beyond 1e-6 or indefinite.
  Qnukf(const NavState& x0, const Mat15& p0, const NoiseConfig& cfg,
        const QnukfOptions& opt = {}, std::int64_t t0_ns = 0);

  const FilterEstimate& estimate() const { return est_; }
  const NoiseConfig& config() const { return cfg_; }
  const QnukfOptions& options() const { return opt_; }
  const std::vector<StepDiagnostics>& diagnostics() const { return diag_; }
  std::vector<StepDiagnostics>& diagnostics() { return diag_; }

  /// Predict with the IMU sample, update when a frame is present, and store
  /// the result. dt comes from the timestamp gap; throws NonMonotoneTime if
  /// u.t_ns does not advance past the current estimate time.
  const FilterEstimate& step(const ImuSample& u,
                             const std::optional<FeatureFrame>& frame);

  /// Append the noise means (zeros) and build P_a = blockdiag(P, C_x) with
  /// C_x = blockdiag(c_gyro, c_accel).
  static AugmentedEstimate augment(const FilterEstimate& est,
                                   const NoiseConfig& cfg);

  /// 43 sigma points: the mean plus +/- columns of sqrt((21 + lambda) P_a),
  /// applied through the manifold retraction on the attitude block and plain
  /// addition elsewhere.
  static std::vector<AugmentedPoint> manifold_sigma_points(
      const AugmentedEstimate& aug, const UtParams& params);

  /// Steps 2-5: augment, place sigma points, propagate each through the
  /// state transition with its own noise draw, and form the predicted
  /// moments (quaternion mean for attitude, weighted sums elsewhere;
  /// covariance over ominus residuals plus the bias-walk process noise).
  PredictionBundle predict(const FilterEstimate& est, const ImuSample& u,
                           double dt) const;

  /// Steps 6-7 for the feature measurement model.
  /// Throws EmptyFeatureSet and SingularInnovation.
  FilterEstimate update(const PredictionBundle& bundle,
                        const FeatureFrame& frame,
                        double* cond_out = nullptr,
                        double* innovation_norm_out = nullptr) const;

  /// Generalized correction for an arbitrary measurement function; the
  /// feature update above goes through this path.
  FilterEstimate update_with(
      const PredictionBundle& bundle, const VecX& z, const MatX& meas_cov,
      const std::function<VecX(const NavState&)>& h,
      double* cond_out = nullptr, double* innovation_norm_out = nullptr) const;

 private:
  FilterEstimate est_;
  NoiseConfig cfg_;
  QnukfOptions opt_;
  VecX wm_, wc_;
  std::vector<StepDiagnostics> diag_;
};

}  // namespace navkf
