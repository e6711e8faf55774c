#pragma once

/// Stage and terminal costs for the two tracking modes, with analytic
/// gradients and Gauss-Newton curvature blocks for the planner.
///
/// Pose errors live in a 12-dimensional tangent space
/// [dr, dtheta, dv, domega]; attitude enters through the small-angle map
/// 2*vec(q_ref^-1 (x) q) so the quadratic forms are immune to the quaternion
/// double cover. Gradients are taken with respect to local perturbations
/// (position/velocity additive, attitude via q (x) exp(dtheta)).

#include <cmath>
#include <stdexcept>

#include "ffi/dynamics.hpp"
#include "ffi/geometry.hpp"
#include "ffi/quat.hpp"
#include "ffi/types.hpp"

namespace ffi {

using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat12 = Eigen::Matrix<double, 12, 12>;

struct LingerWeights {
  Mat12 Q = Mat12::Identity();    // state-error weight
  MatX R;                         // input weight, n_u x n_u
  Mat12 Q_N = Mat12::Identity();  // terminal state-error weight

  static LingerWeights defaults(int n_u) {
    LingerWeights w;
    w.Q.setZero();
    w.Q.block<3, 3>(0, 0) = 10.0 * Mat3::Identity();
    w.Q.block<3, 3>(3, 3) = 5.0 * Mat3::Identity();
    w.Q.block<3, 3>(6, 6) = Mat3::Identity();
    w.Q.block<3, 3>(9, 9) = Mat3::Identity();
    w.Q_N = 10.0 * w.Q;
    w.R = 0.1 * MatX::Identity(n_u, n_u);
    return w;
  }

  void validate() const {
    if ((Q - Q.transpose()).norm() > 1e-9 || (Q_N - Q_N.transpose()).norm() > 1e-9 ||
        (R - R.transpose()).norm() > 1e-9) {
      throw std::invalid_argument("LingerWeights: weights must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<MatX> es(R);
    if (es.eigenvalues().minCoeff() <= 0.0) {
      throw std::invalid_argument("LingerWeights: R must be positive definite");
    }
  }
};

struct FlybyWeights {
  double contour_weight = 50.0;      // perpendicular path error [1/m^2]
  double lag_weight = 10.0;          // tangential path error [1/m^2]
  double attitude_weight = 5.0;      // against the slerped path orientation
  double progress_reward = 2.0;      // per meter of path progress
  double progress_rate_weight = 0.01;  // regularizes the virtual progress input
  MatX R;                            // input weight, n_u x n_u

  static FlybyWeights defaults(int n_u) {
    FlybyWeights w;
    w.R = 0.1 * MatX::Identity(n_u, n_u);
    return w;
  }

  void validate() const {
    if (contour_weight < 0.0 || lag_weight < 0.0 || attitude_weight < 0.0 ||
        progress_reward < 0.0 || progress_rate_weight < 0.0) {
      throw std::invalid_argument("FlybyWeights: weights must be nonnegative");
    }
    Eigen::SelfAdjointEigenSolver<MatX> es(R);
    if (es.eigenvalues().minCoeff() <= 0.0) {
      throw std::invalid_argument("FlybyWeights: R must be positive definite");
    }
  }
};

/// Vehicle state plus the contouring progress variable and its rate.
struct AugmentedState {
  State x;
  double s = 0.0;    // path progress [m]
  double v_s = 0.0;  // progress rate (virtual input) [m/s]
};

struct CostEvalFlags {
  bool s_clamped = false;  // progress fell outside [0, L]
  bool at_kink = false;    // evaluated at a path kink; one-sided derivative
};

/// 2 * vec(q_ref^-1 (x) q), sign chosen so the product's scalar part is
/// nonnegative (shortest rotation). Zero iff q == +/- q_ref.
inline Vec3 attitude_error(const Vec4& q, const Vec4& q_ref) {
  const Vec4 p = quat_multiply(quat_conjugate(quat_normalized(q_ref)),
                               quat_normalized(q));
  const double sign = p.w() < 0.0 ? -1.0 : 1.0;
  return 2.0 * sign * p.head<3>();
}

namespace detail {

/// d attitude_error / d dtheta for q <- q (x) exp(dtheta), evaluated at
/// dtheta = 0.
inline Mat3 attitude_error_jacobian(const Vec4& q, const Vec4& q_ref) {
  const Vec4 p = quat_multiply(quat_conjugate(quat_normalized(q_ref)),
                               quat_normalized(q));
  const double sign = p.w() < 0.0 ? -1.0 : 1.0;
  return sign * (p.w() * Mat3::Identity() + skew(Vec3(p.head<3>())));
}

}  // namespace detail

/// Tangent-space tracking error [dr, dtheta, dv, domega]. Velocities compare
/// body-frame against body-frame.
inline Vec12 error_state(const State& x, const State& x_ref) {
  Vec12 e;
  e.segment<3>(0) = x.r - x_ref.r;
  e.segment<3>(3) = attitude_error(x.q, x_ref.q);
  e.segment<3>(6) = x.v - x_ref.v;
  e.segment<3>(9) = x.omega - x_ref.omega;
  return e;
}

/// e^T Q e + u^T R u.
inline double linger_stage_cost(const State& x, const ControlInput& u,
                                const State& x_ref, const LingerWeights& w) {
  const Vec12 e = error_state(x, x_ref);
  return e.dot(w.Q * e) + u.dot(w.R * u);
}

/// e_N^T Q_N e_N.
inline double linger_terminal_cost(const State& x_n, const State& x_ref,
                                   const LingerWeights& w) {
  const Vec12 e = error_state(x_n, x_ref);
  return e.dot(w.Q_N * e);
}

struct LingerGradient {
  Vec12 grad_x = Vec12::Zero();
  VecX grad_u;
};

namespace detail {

/// Jacobian of error_state with respect to the local perturbation of x.
inline Mat12 error_state_jacobian(const State& x, const State& x_ref) {
  Mat12 e_jac = Mat12::Identity();
  e_jac.block<3, 3>(3, 3) = attitude_error_jacobian(x.q, x_ref.q);
  return e_jac;
}

}  // namespace detail

inline LingerGradient linger_cost_gradient(const State& x, const ControlInput& u,
                                           const State& x_ref,
                                           const LingerWeights& w) {
  const Vec12 e = error_state(x, x_ref);
  const Mat12 e_jac = detail::error_state_jacobian(x, x_ref);
  LingerGradient g;
  g.grad_x = 2.0 * e_jac.transpose() * (w.Q * e);
  g.grad_u = 2.0 * w.R * u;
  return g;
}

inline Vec12 linger_terminal_gradient(const State& x_n, const State& x_ref,
                                      const LingerWeights& w) {
  const Vec12 e = error_state(x_n, x_ref);
  return 2.0 * detail::error_state_jacobian(x_n, x_ref).transpose() * (w.Q_N * e);
}

/// Gauss-Newton curvature of the linger stage cost (state block).
inline Mat12 linger_stage_hessian(const State& x, const State& x_ref,
                                  const LingerWeights& w) {
  const Mat12 e_jac = detail::error_state_jacobian(x, x_ref);
  return 2.0 * e_jac.transpose() * w.Q * e_jac;
}

inline Mat12 linger_terminal_hessian(const State& x_n, const State& x_ref,
                                     const LingerWeights& w) {
  const Mat12 e_jac = detail::error_state_jacobian(x_n, x_ref);
  return 2.0 * e_jac.transpose() * w.Q_N * e_jac;
}

namespace detail {

struct PathLocal {
  Vec3 point = Vec3::Zero();
  Vec3 tangent = Vec3::UnitX();
  Vec4 q_ref = quat_identity();
  Vec3 span_rotvec_per_s = Vec3::Zero();  // d(reference rotation)/ds
  double s = 0.0;                         // clamped progress
  bool clamped = false;
  bool at_kink = false;
};

inline PathLocal path_local(const ReferencePath& path, double s_raw) {
  PathLocal loc;
  loc.clamped = s_raw < 0.0 || s_raw > path.length();
  loc.s = std::min(std::max(s_raw, 0.0), path.length());
  loc.point = path.position_at(loc.s);
  loc.tangent = path.tangent_at(loc.s);
  loc.q_ref = path.orientation_at(loc.s);
  const int k = path.span_index(loc.s);
  const double span_len = path.waypoint_s(k + 1) - path.waypoint_s(k);
  loc.span_rotvec_per_s = path.span_rotvec(k) / span_len;
  for (int j = 1; j < path.num_spans(); ++j) {
    if (std::abs(loc.s - path.waypoint_s(j)) < 1e-9) loc.at_kink = true;
  }
  return loc;
}

}  // namespace detail

/// Contouring stage cost:
///   contour_weight * |e_perp|^2 + lag_weight * e_tan^2
///   + attitude_weight * |attitude_error(q, q_ref(s))|^2
///   + u^T R u + progress_rate_weight * v_s^2 - progress_reward * v_s * dt
/// where e = r - path(s) splits into components perpendicular and tangential
/// to the path at s.
inline double flyby_stage_cost(const AugmentedState& xa, const ControlInput& u,
                               const ReferencePath& path, const FlybyWeights& w,
                               double dt, CostEvalFlags* flags = nullptr) {
  const auto loc = detail::path_local(path, xa.s);
  if (flags != nullptr) {
    flags->s_clamped = loc.clamped;
    flags->at_kink = loc.at_kink;
  }
  const Vec3 e = xa.x.r - loc.point;
  const double e_lag = loc.tangent.dot(e);
  const double e_contour_sq = e.squaredNorm() - e_lag * e_lag;
  const Vec3 att_err = attitude_error(xa.x.q, loc.q_ref);
  return w.contour_weight * e_contour_sq + w.lag_weight * e_lag * e_lag +
         w.attitude_weight * att_err.squaredNorm() + u.dot(w.R * u) +
         w.progress_rate_weight * xa.v_s * xa.v_s -
         w.progress_reward * xa.v_s * dt;
}

struct FlybyGradient {
  Vec12 grad_x = Vec12::Zero();
  double grad_s = 0.0;
  VecX grad_u;
  double grad_vs = 0.0;
  CostEvalFlags flags;
};

inline FlybyGradient flyby_cost_gradient(const AugmentedState& xa,
                                         const ControlInput& u,
                                         const ReferencePath& path,
                                         const FlybyWeights& w, double dt) {
  const auto loc = detail::path_local(path, xa.s);
  FlybyGradient g;
  g.flags.s_clamped = loc.clamped;
  g.flags.at_kink = loc.at_kink;

  const Vec3 e = xa.x.r - loc.point;
  const double e_lag = loc.tangent.dot(e);

  // Position terms; within a span the tangent is treated as constant, so the
  // derivative at a kink is the one-sided (incoming-span) value.
  g.grad_x.segment<3>(0) = 2.0 * w.contour_weight * e +
                           2.0 * (w.lag_weight - w.contour_weight) * e_lag * loc.tangent;
  g.grad_s = -2.0 * w.lag_weight * e_lag;

  // Attitude term, including the dependence of the slerped reference on s.
  const Vec4 p = quat_multiply(quat_conjugate(loc.q_ref), quat_normalized(xa.x.q));
  const double sign = p.w() < 0.0 ? -1.0 : 1.0;
  const Vec3 pv = p.head<3>();
  const Vec3 att_err = 2.0 * sign * pv;
  const Mat3 att_jac = sign * (p.w() * Mat3::Identity() + skew(pv));
  const Vec3 d_att_ds =
      -sign * (p.w() * loc.span_rotvec_per_s + loc.span_rotvec_per_s.cross(pv));
  g.grad_x.segment<3>(3) =
      2.0 * w.attitude_weight * att_jac.transpose() * att_err;
  g.grad_s += 2.0 * w.attitude_weight * att_err.dot(d_att_ds);

  g.grad_u = 2.0 * w.R * u;
  g.grad_vs = 2.0 * w.progress_rate_weight * xa.v_s - w.progress_reward * dt;
  return g;
}

struct FlybyHessian {
  Mat12 h_xx = Mat12::Zero();
  Vec12 h_xs = Vec12::Zero();
  double h_ss = 0.0;
  double h_vsvs = 0.0;
};

/// Gauss-Newton curvature of the contouring cost over (dx, ds) and v_s.
inline FlybyHessian flyby_stage_hessian(const AugmentedState& xa,
                                        const ReferencePath& path,
                                        const FlybyWeights& w) {
  const auto loc = detail::path_local(path, xa.s);
  FlybyHessian h;

  const Mat3 tangent_proj = loc.tangent * loc.tangent.transpose();
  h.h_xx.block<3, 3>(0, 0) = 2.0 * w.contour_weight * (Mat3::Identity() - tangent_proj) +
                             2.0 * w.lag_weight * tangent_proj;
  h.h_xs.segment<3>(0) = -2.0 * w.lag_weight * loc.tangent;
  h.h_ss = 2.0 * w.lag_weight;

  const Vec4 p = quat_multiply(quat_conjugate(loc.q_ref), quat_normalized(xa.x.q));
  const double sign = p.w() < 0.0 ? -1.0 : 1.0;
  const Vec3 pv = p.head<3>();
  const Mat3 att_jac = sign * (p.w() * Mat3::Identity() + skew(pv));
  const Vec3 d_att_ds =
      -sign * (p.w() * loc.span_rotvec_per_s + loc.span_rotvec_per_s.cross(pv));
  h.h_xx.block<3, 3>(3, 3) = 2.0 * w.attitude_weight * att_jac.transpose() * att_jac;
  h.h_xs.segment<3>(3) = 2.0 * w.attitude_weight * att_jac.transpose() * d_att_ds;
  h.h_ss += 2.0 * w.attitude_weight * d_att_ds.squaredNorm();

  h.h_vsvs = 2.0 * w.progress_rate_weight;
  return h;
}

}  // namespace ffi
