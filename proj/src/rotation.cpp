#include "navkf/rotation.hpp"

#include <algorithm>
#include <cmath>

namespace navkf {

namespace {

constexpr double kSmallAngle = 1e-8;  // below this, sinc ratios use Taylor

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

void check_rotation(const Mat3& r, double tol) {
  if (!is_rotation(r, tol)) {
    throw NotRotation("matrix is not a rotation within tolerance");
  }
}

// vex((R - R^T)/2), which equals sin(theta) u for a rotation matrix
Vec3 antisym_half_vex(const Mat3& r) {
  return Vec3(0.5 * (r(2, 1) - r(1, 2)), 0.5 * (r(0, 2) - r(2, 0)),
              0.5 * (r(1, 0) - r(0, 1)));
}

}  // namespace

UnitQuaternion::UnitQuaternion(double w, const Vec3& v) : w_(w), v_(v) {
  const double n2 = w_ * w_ + v_.squaredNorm();
  if (!std::isfinite(n2) || n2 <= 0.0) {
    throw NonFiniteInput("quaternion components must be finite and nonzero");
  }
  const double inv = 1.0 / std::sqrt(n2);
  w_ *= inv;
  v_ *= inv;
}

UnitQuaternion UnitQuaternion::canonicalized() const {
  if (w_ > 0.0) return *this;
  if (w_ < 0.0) return negated();
  for (int i = 0; i < 3; ++i) {
    if (v_(i) > 0.0) return *this;
    if (v_(i) < 0.0) return negated();
  }
  return *this;
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v(2), v(1),  //
      v(2), 0.0, -v(0),   //
      -v(1), v(0), 0.0;
  return m;
}

Vec3 vex(const Mat3& m) {
  if ((m + m.transpose()).norm() >= 1e-8) {
    throw NotAntisymmetric("vex() requires an antisymmetric matrix");
  }
  return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

Mat3 antisym_project(const Mat3& m) { return 0.5 * (m - m.transpose()); }

UnitQuaternion qmul(const UnitQuaternion& q1, const UnitQuaternion& q2) {
  const double w = q1.w_ * q2.w_ - q1.v_.dot(q2.v_);
  const Vec3 v = q1.w_ * q2.v_ + q2.w_ * q1.v_ + q1.v_.cross(q2.v_);
  return UnitQuaternion(w, v);  // renormalizes
}

UnitQuaternion qinv(const UnitQuaternion& q) {
  return UnitQuaternion(UnitQuaternion::Raw{}, q.w_, -q.v_);
}

Mat3 quat_to_rot(const UnitQuaternion& q) {
  const double w = q.w();
  const Vec3& v = q.v();
  return (w * w - v.squaredNorm()) * Mat3::Identity() +
         2.0 * v * v.transpose() + 2.0 * w * skew(v);
}

UnitQuaternion rot_to_quat(const Mat3& r) {
  check_rotation(r, 1e-6);
  const double t = r.trace();
  double w, x, y, z;
  // Shepperd's method: branch on the largest of trace and diagonal entries
  // to keep the divisor away from zero (the plain trace formula divides by
  // q_w, which vanishes for 180-degree rotations).
  if (t >= r(0, 0) && t >= r(1, 1) && t >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(std::max(0.0, 1.0 + t));
    w = 0.25 * s;
    x = (r(2, 1) - r(1, 2)) / s;
    y = (r(0, 2) - r(2, 0)) / s;
    z = (r(1, 0) - r(0, 1)) / s;
  } else if (r(0, 0) >= r(1, 1) && r(0, 0) >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(std::max(0.0, 1.0 + r(0, 0) - r(1, 1) - r(2, 2)));
    w = (r(2, 1) - r(1, 2)) / s;
    x = 0.25 * s;
    y = (r(0, 1) + r(1, 0)) / s;
    z = (r(0, 2) + r(2, 0)) / s;
  } else if (r(1, 1) >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(std::max(0.0, 1.0 + r(1, 1) - r(0, 0) - r(2, 2)));
    w = (r(0, 2) - r(2, 0)) / s;
    x = (r(0, 1) + r(1, 0)) / s;
    y = 0.25 * s;
    z = (r(1, 2) + r(2, 1)) / s;
  } else {
    const double s = 2.0 * std::sqrt(std::max(0.0, 1.0 + r(2, 2) - r(0, 0) - r(1, 1)));
    w = (r(1, 0) - r(0, 1)) / s;
    x = (r(0, 2) + r(2, 0)) / s;
    y = (r(1, 2) + r(2, 1)) / s;
    z = 0.25 * s;
  }
  return UnitQuaternion(w, x, y, z).canonicalized();
}

Mat3 rotvec_to_rot(const RotVec& r) {
  const double theta2 = r.squaredNorm();
  const double theta = std::sqrt(theta2);
  double a, b;  // sin(t)/t and (1-cos(t))/t^2
  if (theta < kSmallAngle) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  const Mat3 rx = skew(r);
  return Mat3::Identity() + a * rx + b * rx * rx;
}

RotVec rot_to_rotvec(const Mat3& r) {
  check_rotation(r, 1e-6);
  const double theta = std::acos(clamp_unit((r.trace() - 1.0) / 2.0));
  if (theta < kSmallAngle) {
    // vex(Pa(R)) = sin(theta) u; theta/sin(theta) ~ 1 + theta^2/6
    return antisym_half_vex(r) * (1.0 + theta * theta / 6.0);
  }
  if (theta > M_PI - 1e-4) {
    // sin(theta) -> 0; recover the axis from (R + I)/2 = u u^T + O(pi-theta)
    // using its dominant column.
    const Mat3 b = 0.5 * (r + Mat3::Identity());
    int j = 0;
    b.diagonal().maxCoeff(&j);
    Vec3 u = b.col(j).normalized();
    // pick the hemisphere consistent with vex(Pa(R)) = sin(theta) u >= 0
    const Vec3 s = antisym_half_vex(r);
    if (u.dot(s) < 0.0) u = -u;
    return theta * u;
  }
  return (theta / std::sin(theta)) * antisym_half_vex(r);
}

UnitQuaternion rotvec_to_quat(const RotVec& r) {
  const double theta2 = r.squaredNorm();
  const double theta = std::sqrt(theta2);
  double s;  // sin(theta/2)/theta
  if (theta < kSmallAngle) {
    s = 0.5 - theta2 / 48.0;
  } else {
    s = std::sin(0.5 * theta) / theta;
  }
  return UnitQuaternion(std::cos(0.5 * theta), s * r);
}

RotVec quat_to_rotvec(const UnitQuaternion& q) {
  const UnitQuaternion c = q.canonicalized();  // w >= 0 gives theta in [0, pi]
  const double n = c.v().norm();
  if (n < kSmallAngle) {
    return (2.0 / c.w()) * c.v();
  }
  const double theta = 2.0 * std::atan2(n, c.w());
  return (theta / n) * c.v();
}

UnitQuaternion oplus(const UnitQuaternion& q, const RotVec& r) {
  return qmul(rotvec_to_quat(r), q);
}

UnitQuaternion ominus(const UnitQuaternion& q, const RotVec& r) {
  return qmul(qinv(rotvec_to_quat(r)), q);
}

RotVec ominus(const UnitQuaternion& q1, const UnitQuaternion& q2) {
  return quat_to_rotvec(qmul(q1, qinv(q2)));
}

namespace {

// Cyclic Jacobi eigendecomposition of a symmetric 4x4 matrix.
// Returns eigenvalues in `eval` and matching unit eigenvectors as columns
// of `evec`. At most 30 sweeps; stops when the off-diagonal norm is tiny.
void jacobi_eigen4(Mat4 m, Vec4& eval, Mat4& evec) {
  evec.setIdentity();
  for (int sweep = 0; sweep < 30; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < 4; ++p)
      for (int q = p + 1; q < 4; ++q) off += m(p, q) * m(p, q);
    if (std::sqrt(off) < 1e-14) break;
    for (int p = 0; p < 4; ++p) {
      for (int q = p + 1; q < 4; ++q) {
        if (m(p, q) == 0.0) continue;
        const double tau = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        Mat4 g = Mat4::Identity();
        g(p, p) = c;
        g(q, q) = c;
        g(p, q) = s;
        g(q, p) = -s;
        m = g.transpose() * m * g;
        evec = evec * g;
      }
    }
  }
  eval = m.diagonal();
}

}  // namespace

UnitQuaternion quat_weighted_mean(const std::vector<UnitQuaternion>& qs,
                                  const std::vector<double>& ws) {
  if (qs.empty() || qs.size() != ws.size()) {
    throw Error("quat_weighted_mean: empty input or size mismatch");
  }
  double wsum = 0.0;
  for (double w : ws) wsum += w;
  if (!(wsum > 0.0)) {
    throw Error("quat_weighted_mean: weights must sum to a positive value");
  }
  Mat4 m = Mat4::Zero();
  for (size_t i = 0; i < qs.size(); ++i) {
    const Vec4 c = qs[i].coeffs();
    m += (ws[i] / wsum) * c * c.transpose();
  }
  Vec4 eval;
  Mat4 evec;
  jacobi_eigen4(m, eval, evec);

  int best = 0, second = 1;
  if (std::abs(eval(1)) > std::abs(eval(0))) std::swap(best, second);
  for (int i = 2; i < 4; ++i) {
    if (std::abs(eval(i)) > std::abs(eval(best))) {
      second = best;
      best = i;
    } else if (std::abs(eval(i)) > std::abs(eval(second))) {
      second = i;
    }
  }
  if (std::abs(eval(best)) - std::abs(eval(second)) < 1e-12) {
    throw DegenerateMean("quaternion mean is ambiguous: top eigenvalues tie");
  }
  return UnitQuaternion(evec.col(best)).canonicalized();
}

bool is_rotation(const Mat3& r, double tol) {
  if (!r.allFinite()) return false;
  const Mat3 e = r.transpose() * r - Mat3::Identity();
  return e.cwiseAbs().maxCoeff() <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

}  // namespace navkf
