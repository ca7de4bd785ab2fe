#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "navkf/errors.hpp"

namespace navkf {

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Scaled unscented-transform parameters over an effective dimension `dof`.
struct UtParams {
  double lambda = 0.0;
  double alpha = 1e-4;
  double beta = 2.0;
  int dof = 0;

  /// The paper's tuning: lambda = 3 - n, alpha = 1e-4, beta = 2.
  static UtParams standard(int dof) {
    return UtParams{3.0 - static_cast<double>(dof), 1e-4, 2.0, dof};
  }
};

/// 2*dof+1 sigma points with their mean and covariance weights.
struct SigmaSet {
  std::vector<VecX> points;
  VecX wm;
  VecX wc;
};

/// Jointly Gaussian pair (A, B) described by means and covariance blocks.
struct GaussianJoint {
  VecX mean_a;
  VecX mean_b;
  MatX p_a;
  MatX p_b;
  MatX p_ab;
};

/// (P + P^T) / 2.
MatX symmetrized(const MatX& p);

/// Clamp eigenvalues of a symmetric matrix from below (used as an optional
/// safeguard against indefiniteness introduced by negative sigma weights).
MatX floor_eigenvalues(const MatX& p, double floor = 0.0);

/// Matrix square root via SVD: U sqrt(S) V^T. Input is symmetrized first.
/// Throws NotPsd when a sign test shows an eigenvalue below -1e-6 * trace.
MatX sqrt_psd(const MatX& m);

/// Mean and covariance weights for 2*dof+1 points. Throws on dof+lambda <= 0.
std::pair<VecX, VecX> ut_weights(const UtParams& params);

/// Symmetric sigma-point set for a Euclidean Gaussian:
/// point 0 is the mean, points j and j+n are mean +/- column j of
/// sqrt((n + lambda) P).
SigmaSet euclidean_sigma_points(const VecX& mean, const MatX& p,
                                const UtParams& params);

/// Difference between a transformed point and the estimated mean; defaults
/// to plain vector subtraction.
using ResidualFn = std::function<VecX(const VecX& point, const VecX& mean)>;

/// Weighted mean and symmetrized weighted covariance of a sigma set.
/// Summation runs in fixed ascending index order for reproducibility.
std::pair<VecX, MatX> ut_estimate_moments(const SigmaSet& set,
                                          const ResidualFn& residual = {});

/// Condition a Gaussian joint on an observed value of B:
///   mean = A + P_ab P_b^-1 (b - B),  cov = P_a - P_ab P_b^-1 P_ab^T.
/// Solved by LDLT factorization. Throws SingularInnovation when P_b is
/// numerically singular (condition estimate above 1e12). When cond_out is
/// given it receives the condition estimate of P_b.
std::pair<VecX, MatX> gaussian_condition(const GaussianJoint& joint,
                                         const VecX& b_obs,
                                         double* cond_out = nullptr);

}  // namespace navkf
