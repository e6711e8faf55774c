#pragma once

/// Rigid-body free-flyer dynamics with a per-thruster input model.
///
/// State layout: position r (inertial frame), attitude quaternion q_IB
/// (scalar-last, body->inertial), linear velocity v (body frame), angular
/// velocity omega (body frame). Thrusters are unidirectional force sources
/// fixed in the body frame; faults scale each thruster's realized output.

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffi/quat.hpp"
#include "ffi/types.hpp"

namespace ffi {

struct State {
  Vec3 r = Vec3::Zero();           // position, inertial [m]
  Vec4 q = quat_identity();        // attitude q_IB, scalar-last
  Vec3 v = Vec3::Zero();           // linear velocity, body [m/s]
  Vec3 omega = Vec3::Zero();       // angular velocity, body [rad/s]

  bool all_finite() const {
    return r.allFinite() && q.allFinite() && v.allFinite() && omega.allFinite();
  }
};

struct StateDerivative {
  Vec3 r_dot = Vec3::Zero();
  Vec4 q_dot = Vec4::Zero();
  Vec3 v_dot = Vec3::Zero();
  Vec3 omega_dot = Vec3::Zero();
};

struct Thruster {
  Vec3 position = Vec3::Zero();    // application point, body [m]
  Vec3 direction = Vec3::UnitX();  // thrust direction, body, unit norm
  double max_thrust = 0.0;         // [N]
};

struct VehicleModel {
  double mass = 0.0;               // [kg]
  Mat3 inertia = Mat3::Identity(); // body frame [kg m^2]
  std::vector<Thruster> thrusters;
  double body_radius = 0.0;        // encasing sphere [m]
  double isp = 0.0;                // specific impulse [s]

  int num_thrusters() const { return static_cast<int>(thrusters.size()); }

  VecX max_thrusts() const {
    VecX out(num_thrusters());
    for (int i = 0; i < num_thrusters(); ++i) out[i] = thrusters[i].max_thrust;
    return out;
  }

  /// 6 x n_u map from thruster magnitudes to (force, torque), body frame.
  MatX wrench_map() const {
    MatX w(6, num_thrusters());
    for (int i = 0; i < num_thrusters(); ++i) {
      const auto& t = thrusters[i];
      w.col(i).head<3>() = t.direction;
      w.col(i).tail<3>() = t.position.cross(t.direction);
    }
    return w;
  }

  void validate() const {
    if (!(mass > 0.0) || !std::isfinite(mass)) {
      throw std::invalid_argument("VehicleModel: mass must be positive");
    }
    if (!(body_radius > 0.0)) {
      throw std::invalid_argument("VehicleModel: body_radius must be positive");
    }
    if (!(isp > 0.0)) {
      throw std::invalid_argument("VehicleModel: isp must be positive");
    }
    if ((inertia - inertia.transpose()).norm() > 1e-9 * inertia.norm()) {
      throw std::invalid_argument("VehicleModel: inertia must be symmetric");
    }
    Eigen::LLT<Mat3> llt(inertia);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("VehicleModel: inertia must be positive definite");
    }
    if (thrusters.empty()) {
      throw std::invalid_argument("VehicleModel: no thrusters");
    }
    for (size_t i = 0; i < thrusters.size(); ++i) {
      if (std::abs(thrusters[i].direction.norm() - 1.0) > 1e-12) {
        throw std::invalid_argument("VehicleModel: thruster " + std::to_string(i) +
                                    " direction not unit norm");
      }
      if (!(thrusters[i].max_thrust > 0.0)) {
        throw std::invalid_argument("VehicleModel: thruster " + std::to_string(i) +
                                    " max_thrust must be positive");
      }
    }
  }
};

/// Per-thruster multiplicative degradation, elementwise in [0, 1].
/// All-ones is the nominal (fault-free) model.
struct FaultMask {
  VecX scale;

  static FaultMask nominal(int n_thrusters) {
    FaultMask m;
    m.scale = VecX::Ones(n_thrusters);
    return m;
  }

  bool is_nominal() const { return (scale.array() == 1.0).all(); }

  void validate(int n_thrusters) const {
    if (scale.size() != n_thrusters) {
      throw std::invalid_argument("FaultMask: size mismatch");
    }
    if ((scale.array() < 0.0).any() || (scale.array() > 1.0).any()) {
      throw std::invalid_argument("FaultMask: entries must lie in [0, 1]");
    }
  }
};

using ControlInput = VecX;  // per-thruster force magnitudes [N]

struct Wrench {
  Vec3 force = Vec3::Zero();   // body [N]
  Vec3 torque = Vec3::Zero();  // body [N m]
};

/// Net body-frame force and torque for thruster magnitudes u under a fault
/// mask. Linear in u for a fixed mask.
inline Wrench thruster_wrench(const ControlInput& u, const VehicleModel& model,
                              const FaultMask& mask) {
  const int n = model.num_thrusters();
  if (u.size() != n || mask.scale.size() != n) {
    throw std::invalid_argument("thruster_wrench: input/model dimension mismatch");
  }
  Wrench w;
  for (int i = 0; i < n; ++i) {
    const Vec3 f = mask.scale[i] * u[i] * model.thrusters[i].direction;
    w.force += f;
    w.torque += model.thrusters[i].position.cross(f);
  }
  return w;
}

/// Newton-Euler state derivative:
///   r_dot     = R(q) v
///   q_dot     = 1/2 q (x) (omega, 0)
///   v_dot     = F/m - omega x v
///   omega_dot = I^-1 (T - omega x I omega)
inline StateDerivative continuous_derivative(const State& x, const ControlInput& u,
                                             const VehicleModel& model,
                                             const FaultMask& mask) {
  if (!x.all_finite()) {
    throw std::invalid_argument("continuous_derivative: non-finite state");
  }
  const Wrench w = thruster_wrench(u, model, mask);
  StateDerivative d;
  d.r_dot = quat_rotate(x.q, x.v);
  d.q_dot = quat_rate(x.q, x.omega);
  d.v_dot = w.force / model.mass - x.omega.cross(x.v);
  d.omega_dot = model.inertia.inverse() *
                (w.torque - x.omega.cross(model.inertia * x.omega));
  return d;
}

namespace detail {

inline State axpy(const State& x, double h, const StateDerivative& d) {
  State out;
  out.r = x.r + h * d.r_dot;
  out.q = x.q + h * d.q_dot;
  out.v = x.v + h * d.v_dot;
  out.omega = x.omega + h * d.omega_dot;
  return out;
}

}  // namespace detail

namespace detail {

[[noreturn]] inline void throw_integration_failure(const State& s, const char* where) {
  std::ostringstream msg;
  msg << "rk4_step: non-finite " << where << " state;";
  if (!s.r.allFinite()) msg << " position";
  if (!s.q.allFinite()) msg << " quaternion";
  if (!s.v.allFinite()) msg << " velocity";
  if (!s.omega.allFinite()) msg << " angular-velocity";
  msg << " component(s) affected";
  throw std::runtime_error(msg.str());
}

}  // namespace detail

/// Classical RK4 step with zero-order-hold input, followed by quaternion
/// renormalization.
inline State rk4_step(const State& x, const ControlInput& u, double dt,
                      const VehicleModel& model, const FaultMask& mask) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("rk4_step: dt must be positive");
  }
  auto stage = [&](const State& xs) {
    if (!xs.all_finite()) detail::throw_integration_failure(xs, "intermediate");
    return continuous_derivative(xs, u, model, mask);
  };
  const StateDerivative k1 = stage(x);
  const StateDerivative k2 = stage(detail::axpy(x, 0.5 * dt, k1));
  const StateDerivative k3 = stage(detail::axpy(x, 0.5 * dt, k2));
  const StateDerivative k4 = stage(detail::axpy(x, dt, k3));

  State out;
  out.r = x.r + dt / 6.0 * (k1.r_dot + 2.0 * k2.r_dot + 2.0 * k3.r_dot + k4.r_dot);
  out.q = x.q + dt / 6.0 * (k1.q_dot + 2.0 * k2.q_dot + 2.0 * k3.q_dot + k4.q_dot);
  out.v = x.v + dt / 6.0 * (k1.v_dot + 2.0 * k2.v_dot + 2.0 * k3.v_dot + k4.v_dot);
  out.omega =
      x.omega + dt / 6.0 * (k1.omega_dot + 2.0 * k2.omega_dot + 2.0 * k3.omega_dot +
                            k4.omega_dot);

  if (!out.all_finite()) detail::throw_integration_failure(out, "final");
  out.q = quat_normalized(out.q);
  return out;
}

/// Default 10 kg inspector: 12 unidirectional cold-gas thrusters arranged in
/// six symmetric pairs. Each pair fires a pure +/- axis force when commanded
/// together; differential firing across opposing pairs yields pure torques,
/// so the 6 x 12 wrench map has full rank with authority in both signs.
///
/// Pair layout (a = b = 0.15 m lever arms):
///   0,1  : +x force pair, -/+ z torque singletons
///   2,3  : -x force pair
///   4,5  : +y force pair, -/+ x torque singletons
///   6,7  : -y force pair
///   8,9  : +z force pair, -/+ y torque singletons
///   10,11: -z force pair
inline VehicleModel make_default_vehicle() {
  VehicleModel m;
  m.mass = 10.0;
  m.inertia = 0.25 * Mat3::Identity();
  m.body_radius = 0.3;
  m.isp = 40.0;

  const double a = 0.15;
  const double b = 0.15;
  const double f = 0.2;
  auto add = [&](double px, double py, double pz, double dx, double dy, double dz) {
    Thruster t;
    t.position = Vec3(px, py, pz);
    t.direction = Vec3(dx, dy, dz);
    t.max_thrust = f;
    m.thrusters.push_back(t);
  };
  add(-a, +b, 0, +1, 0, 0);
  add(-a, -b, 0, +1, 0, 0);
  add(+a, +b, 0, -1, 0, 0);
  add(+a, -b, 0, -1, 0, 0);
  add(0, -a, +b, 0, +1, 0);
  add(0, -a, -b, 0, +1, 0);
  add(0, +a, +b, 0, -1, 0);
  add(0, +a, -b, 0, -1, 0);
  add(+b, 0, -a, 0, 0, +1);
  add(-b, 0, -a, 0, 0, +1);
  add(+b, 0, +a, 0, 0, -1);
  add(-b, 0, +a, 0, 0, -1);

  m.validate();
  return m;
}

}  // namespace ffi
