#pragma once

/// Quaternion utilities on scalar-last (x, y, z, w) unit quaternions.
///
/// Convention: q_IB rotates body-frame vectors into the inertial frame,
/// Hamilton product, kinematics q_dot = 1/2 * q (x) (omega, 0) with omega in
/// the body frame.

#include <cmath>
#include <stdexcept>

#include "ffi/types.hpp"

namespace ffi {

inline Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return s;
}

inline Vec4 quat_identity() { return Vec4(0.0, 0.0, 0.0, 1.0); }

inline Vec4 quat_normalized(const Vec4& q) {
  const double n = q.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("quat_normalized: non-normalizable quaternion");
  }
  return q / n;
}

/// Hamilton product a (x) b, both scalar-last.
inline Vec4 quat_multiply(const Vec4& a, const Vec4& b) {
  const Vec3 av = a.head<3>();
  const Vec3 bv = b.head<3>();
  const double aw = a.w();
  const double bw = b.w();
  Vec4 out;
  out.head<3>() = aw * bv + bw * av + av.cross(bv);
  out.w() = aw * bw - av.dot(bv);
  return out;
}

inline Vec4 quat_conjugate(const Vec4& q) {
  return Vec4(-q.x(), -q.y(), -q.z(), q.w());
}

/// Rotation matrix R_IB mapping body vectors to inertial vectors.
inline Mat3 quat_to_rotmat(const Vec4& q_in) {
  if (!q_in.allFinite()) {
    throw std::invalid_argument("quat_to_rotmat: non-finite quaternion");
  }
  const Vec4 q = quat_normalized(q_in);
  const Vec3 v = q.head<3>();
  const double w = q.w();
  return (w * w - v.squaredNorm()) * Mat3::Identity() +
         2.0 * (v * v.transpose()) + 2.0 * w * skew(v);
}

inline Vec3 quat_rotate(const Vec4& q, const Vec3& x) {
  const Vec3 v = q.head<3>();
  const double w = q.w();
  const Vec3 t = 2.0 * v.cross(x);
  return x + w * t + v.cross(t);
}

/// Quaternion kinematics: q_dot = 1/2 * q (x) (omega, 0).
inline Vec4 quat_rate(const Vec4& q, const Vec3& omega_body) {
  if (!q.allFinite() || !omega_body.allFinite()) {
    throw std::invalid_argument("quat_rate: non-finite input");
  }
  Vec4 omega_q;
  omega_q << omega_body, 0.0;
  return 0.5 * quat_multiply(q, omega_q);
}

/// Exponential map: rotation vector (angle * axis) to unit quaternion.
inline Vec4 quat_from_rotvec(const Vec3& phi) {
  const double angle = phi.norm();
  Vec4 q;
  if (angle < 1e-12) {
    // sin(a/2)/a ~ 1/2 - a^2/48
    q.head<3>() = (0.5 - angle * angle / 48.0) * phi;
    q.w() = std::cos(0.5 * angle);
  } else {
    q.head<3>() = std::sin(0.5 * angle) / angle * phi;
    q.w() = std::cos(0.5 * angle);
  }
  return q;
}

/// Log map: unit quaternion to rotation vector, |result| <= pi.
inline Vec3 quat_to_rotvec(const Vec4& q_in) {
  Vec4 q = quat_normalized(q_in);
  if (q.w() < 0.0) q = -q;  // shortest rotation
  const double vn = q.head<3>().norm();
  if (vn < 1e-12) {
    return 2.0 * q.head<3>();
  }
  const double angle = 2.0 * std::atan2(vn, q.w());
  return (angle / vn) * q.head<3>();
}

/// Spherical interpolation from qa (t=0) to qb (t=1) along the shorter arc.
inline Vec4 quat_slerp(const Vec4& qa, const Vec4& qb, double t) {
  Vec4 b = qb;
  if (qa.dot(qb) < 0.0) b = -b;  // double cover: stay on the near hemisphere
  const Vec3 rv = quat_to_rotvec(quat_multiply(quat_conjugate(qa), b));
  return quat_multiply(qa, quat_from_rotvec(t * rv));
}

/// Local perturbation: q (x) exp(delta_theta). First-order inverse of the
/// attitude error used by the tracking costs.
inline Vec4 quat_retract(const Vec4& q, const Vec3& delta_theta) {
  return quat_normalized(quat_multiply(q, quat_from_rotvec(delta_theta)));
}

}  // namespace ffi
