#pragma once

#include <Eigen/Dense>
#include <vector>

#include "navkf/errors.hpp"

namespace navkf {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Rotation vector theta*u (radians). Canonical extraction keeps |r| <= pi.
using RotVec = Eigen::Vector3d;

/// Unit quaternion in scalar-first order [w, x, y, z], Hamilton convention,
/// body-to-world when used as an attitude. q and -q encode the same rotation.
class UnitQuaternion {
 public:
  /// Identity rotation [1, 0, 0, 0].
  UnitQuaternion() : w_(1.0), v_(Vec3::Zero()) {}

  /// Construct from components; normalizes so the unit invariant holds.
  UnitQuaternion(double w, const Vec3& v);
  UnitQuaternion(double w, double x, double y, double z)
      : UnitQuaternion(w, Vec3(x, y, z)) {}
  explicit UnitQuaternion(const Vec4& wxyz)
      : UnitQuaternion(wxyz(0), wxyz.tail<3>()) {}

  static UnitQuaternion identity() { return UnitQuaternion(); }

  double w() const { return w_; }
  const Vec3& v() const { return v_; }
  double x() const { return v_(0); }
  double y() const { return v_(1); }
  double z() const { return v_(2); }
  Vec4 coeffs() const { return Vec4(w_, v_(0), v_(1), v_(2)); }

  /// Representative on the canonical hemisphere: w >= 0, and if w == 0 the
  /// first nonzero vector component is positive.
  UnitQuaternion canonicalized() const;

  /// Flip sign of all components; represents the same rotation.
  UnitQuaternion negated() const { return UnitQuaternion(Raw{}, -w_, -v_); }

  bool is_finite() const { return std::isfinite(w_) && v_.allFinite(); }

 private:
  struct Raw {};  // tag: trusted components, skip normalization
  UnitQuaternion(Raw, double w, const Vec3& v) : w_(w), v_(v) {}

  double w_;
  Vec3 v_;

  friend UnitQuaternion qmul(const UnitQuaternion&, const UnitQuaternion&);
  friend UnitQuaternion qinv(const UnitQuaternion&);
};

/// Cross-product matrix: skew(v) * w == v x w.
Mat3 skew(const Vec3& v);

/// Inverse of skew. Throws NotAntisymmetric if ||M + M^T|| >= 1e-8.
Vec3 vex(const Mat3& m);

/// Antisymmetric part (M - M^T) / 2.
Mat3 antisym_project(const Mat3& m);

/// Hamilton product. Composes rotations: R(q1 (x) q2) = R(q1) R(q2).
UnitQuaternion qmul(const UnitQuaternion& q1, const UnitQuaternion& q2);

/// Conjugate [w, -v]; the rotation inverse on the unit sphere.
UnitQuaternion qinv(const UnitQuaternion& q);

/// Rotation matrix of q: (w^2 - |v|^2) I + 2 v v^T + 2 w [v]x.
Mat3 quat_to_rot(const UnitQuaternion& q);

/// Quaternion of a rotation matrix, canonical hemisphere.
/// Throws NotRotation if R^T R != I or det(R) != 1 beyond 1e-6.
UnitQuaternion rot_to_quat(const Mat3& r);

/// Rodrigues formula; exact Taylor fallback below 1e-8 rad.
Mat3 rotvec_to_rot(const RotVec& r);

/// Minimal-angle rotation vector of R, theta in [0, pi].
RotVec rot_to_rotvec(const Mat3& r);

/// [cos(theta/2), sin(theta/2) u]; Taylor fallback below 1e-8 rad.
UnitQuaternion rotvec_to_quat(const RotVec& r);

/// Minimal-angle rotation vector of q, |r| <= pi. Sign-insensitive.
RotVec quat_to_rotvec(const UnitQuaternion& q);

/// q (+) r := q_r(r) (x) q, the quaternion perturbed by a rotation vector.
UnitQuaternion oplus(const UnitQuaternion& q, const RotVec& r);

/// q (-) r := q_r(r)^-1 (x) q, the inverse perturbation.
UnitQuaternion ominus(const UnitQuaternion& q, const RotVec& r);

/// q1 (-) q2 := r_q(q1 (x) q2^-1), the orientation error between q1 and q2.
RotVec ominus(const UnitQuaternion& q1, const UnitQuaternion& q2);

/// Weighted quaternion mean: the unit eigenvector of M = sum_i w_i q_i q_i^T
/// whose eigenvalue has the largest magnitude. Invariant to sign flips of any
/// q_i and to uniform positive scaling of the weights; individual weights may
/// be negative as long as they sum to a positive value.
/// Throws DegenerateMean when the top two eigenvalue magnitudes coincide
/// within 1e-12 (the mean is ambiguous).
UnitQuaternion quat_weighted_mean(const std::vector<UnitQuaternion>& qs,
                                  const std::vector<double>& ws);

/// True if R^T R = I and det(R) = +1 within tol.
bool is_rotation(const Mat3& r, double tol = 1e-9);

}  // namespace navkf
