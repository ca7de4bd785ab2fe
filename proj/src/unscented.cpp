#include "navkf/unscented.hpp"

#include <cmath>
#include <limits>

namespace navkf {

MatX symmetrized(const MatX& p) { return 0.5 * (p + p.transpose()); }

MatX floor_eigenvalues(const MatX& p, double floor) {
  Eigen::SelfAdjointEigenSolver<MatX> eig(symmetrized(p));
  VecX d = eig.eigenvalues().cwiseMax(floor);
  return eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose();
}

MatX sqrt_psd(const MatX& m) {
  const MatX sym = symmetrized(m);
  Eigen::JacobiSVD<MatX> svd(sym, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VecX& sv = svd.singularValues();
  // For symmetric input the SVD pairs u_i = sign(lambda_i) v_i, so the sign
  // of u_i . v_i recovers the eigenvalue sign.
  const double trace = sym.trace();
  for (int i = 0; i < sv.size(); ++i) {
    const double sign = svd.matrixU().col(i).dot(svd.matrixV().col(i));
    if (sv(i) * sign < -1e-6 * trace) {
      throw NotPsd("sqrt_psd: matrix has a significant negative eigenvalue");
    }
  }
  return svd.matrixU() * sv.cwiseSqrt().asDiagonal() *
         svd.matrixV().transpose();
}

std::pair<VecX, VecX> ut_weights(const UtParams& params) {
  const double n = static_cast<double>(params.dof);
  if (!(n + params.lambda > 0.0)) {
    throw Error("ut_weights: dof + lambda must be positive");
  }
  const int count = 2 * params.dof + 1;
  VecX wm(count), wc(count);
  wm(0) = params.lambda / (params.lambda + n);
  wc(0) = wm(0) + 1.0 - params.alpha * params.alpha + params.beta;
  const double wj = 1.0 / (2.0 * (n + params.lambda));
  for (int j = 1; j < count; ++j) {
    wm(j) = wj;
    wc(j) = wj;
  }
  return {wm, wc};
}

SigmaSet euclidean_sigma_points(const VecX& mean, const MatX& p,
                                const UtParams& params) {
  const int n = params.dof;
  if (mean.size() != n || p.rows() != n || p.cols() != n) {
    throw Error("euclidean_sigma_points: dimension mismatch with params.dof");
  }
  auto [wm, wc] = ut_weights(params);
  const MatX s = sqrt_psd((n + params.lambda) * p);
  SigmaSet set;
  set.wm = std::move(wm);
  set.wc = std::move(wc);
  set.points.reserve(2 * n + 1);
  set.points.push_back(mean);
  for (int j = 0; j < n; ++j) set.points.push_back(mean + s.col(j));
  for (int j = 0; j < n; ++j) set.points.push_back(mean - s.col(j));
  return set;
}

std::pair<VecX, MatX> ut_estimate_moments(const SigmaSet& set,
                                          const ResidualFn& residual) {
  if (set.points.empty()) {
    throw Error("ut_estimate_moments: empty sigma set");
  }
  const auto count = set.points.size();
  VecX mean = VecX::Zero(set.points[0].size());
  for (size_t j = 0; j < count; ++j) mean += set.wm(j) * set.points[j];

  const auto diff = [&](const VecX& pt) {
    return residual ? residual(pt, mean) : VecX(pt - mean);
  };
  const VecX r0 = diff(set.points[0]);
  MatX cov = MatX::Zero(r0.size(), r0.size());
  cov += set.wc(0) * r0 * r0.transpose();
  for (size_t j = 1; j < count; ++j) {
    const VecX r = diff(set.points[j]);
    cov += set.wc(j) * r * r.transpose();
  }
  return {mean, symmetrized(cov)};
}

std::pair<VecX, MatX> gaussian_condition(const GaussianJoint& joint,
                                         const VecX& b_obs, double* cond_out) {
  const MatX pb = symmetrized(joint.p_b);
  Eigen::LDLT<MatX> ldlt(pb);
  if (ldlt.info() != Eigen::Success) {
    throw SingularInnovation("gaussian_condition: LDLT factorization failed");
  }
  const VecX d = ldlt.vectorD().cwiseAbs();
  const double cond =
      d.minCoeff() > 0.0
          ? d.maxCoeff() / d.minCoeff()
          : std::numeric_limits<double>::infinity();
  if (cond_out) *cond_out = cond;
  if (!(cond < 1e12)) {
    throw SingularInnovation("gaussian_condition: P_b numerically singular");
  }
  // gain^T = P_b^-1 P_ab^T, never forming the inverse
  const MatX gain_t = ldlt.solve(joint.p_ab.transpose());
  const VecX mean = joint.mean_a + gain_t.transpose() * (b_obs - joint.mean_b);
  const MatX cov =
      symmetrized(joint.p_a - gain_t.transpose() * pb * gain_t);
  return {mean, cov};
}

}  // namespace navkf
