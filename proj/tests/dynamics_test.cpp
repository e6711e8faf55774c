#include "ffi/dynamics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ffi/quat.hpp"

using namespace ffi;

namespace {

State propagate(State x, const ControlInput& u, double dt, int steps,
                const VehicleModel& model, const FaultMask& mask) {
  for (int i = 0; i < steps; ++i) x = rk4_step(x, u, dt, model, mask);
  return x;
}

Vec4 random_unit_quat(std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec4 q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized();
}

VehicleModel tumbling_vehicle() {
  VehicleModel m = make_default_vehicle();
  m.inertia = Vec3(0.25, 0.30, 0.35).asDiagonal();
  return m;
}

}  // namespace

TEST(QuatToRotmat, IdentityQuaternionGivesIdentity) {
  EXPECT_LT((quat_to_rotmat(quat_identity()) - Mat3::Identity()).norm(), 1e-15);
}

TEST(QuatToRotmat, NinetyDegreesAboutZ) {
  const double s = std::sin(M_PI / 4.0);
  const double c = std::cos(M_PI / 4.0);
  const Mat3 rot = quat_to_rotmat(Vec4(0.0, 0.0, s, c));
  EXPECT_LT((rot * Vec3::UnitX() - Vec3::UnitY()).norm(), 1e-12);
}

TEST(QuatToRotmat, DoubleCover) {
  std::mt19937 rng(7);
  for (int i = 0; i < 50; ++i) {
    const Vec4 q = random_unit_quat(rng);
    EXPECT_LT((quat_to_rotmat(q) - quat_to_rotmat(Vec4(-q))).norm(), 1e-14);
  }
}

TEST(QuatToRotmat, ProperOrthogonal) {
  std::mt19937 rng(11);
  for (int i = 0; i < 50; ++i) {
    const Mat3 rot = quat_to_rotmat(random_unit_quat(rng));
    EXPECT_LT((rot.transpose() * rot - Mat3::Identity()).norm(), 1e-13);
    EXPECT_NEAR(rot.determinant(), 1.0, 1e-13);
  }
}

TEST(QuatToRotmat, NonFiniteThrows) {
  Vec4 q = quat_identity();
  q[0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(quat_to_rotmat(q), std::invalid_argument);
}

TEST(QuatRate, ZeroOmegaGivesZero) {
  std::mt19937 rng(3);
  EXPECT_LT(quat_rate(random_unit_quat(rng), Vec3::Zero()).norm(), 1e-15);
}

TEST(QuatRate, IdentityWithUnitZSpin) {
  const Vec4 qdot = quat_rate(quat_identity(), Vec3(0.0, 0.0, 1.0));
  EXPECT_LT((qdot - Vec4(0.0, 0.0, 0.5, 0.0)).norm(), 1e-15);
}

TEST(QuatRate, OrthogonalToQuaternion) {
  std::mt19937 rng(5);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const Vec4 q = random_unit_quat(rng);
    const Vec3 omega(n(rng), n(rng), n(rng));
    EXPECT_LT(std::abs(q.dot(quat_rate(q, omega))), 1e-12);
  }
}

TEST(ThrusterWrench, ZeroInputGivesZeroWrench) {
  const VehicleModel m = make_default_vehicle();
  const Wrench w = thruster_wrench(VecX::Zero(12), m, FaultMask::nominal(12));
  EXPECT_LT(w.force.norm(), 1e-15);
  EXPECT_LT(w.torque.norm(), 1e-15);
}

TEST(ThrusterWrench, PlusXPairPureForce) {
  // Thrusters 0 and 1 form the +x pair: equal firing cancels their torques.
  const VehicleModel m = make_default_vehicle();
  VecX u = VecX::Zero(12);
  u[0] = u[1] = 0.1;
  const Wrench w = thruster_wrench(u, m, FaultMask::nominal(12));
  EXPECT_LT((w.force - Vec3(0.2, 0.0, 0.0)).norm(), 1e-15);
  EXPECT_LT(w.torque.norm(), 1e-15);
}

TEST(ThrusterWrench, MaskedPairMemberLeavesParasiticTorque) {
  // Same pair, one member zeroed: expect half the force and the surviving
  // member's torque p x f = (-0.15, 0.15, 0) x (0.1, 0, 0) = (0, 0, -0.015).
  const VehicleModel m = make_default_vehicle();
  VecX u = VecX::Zero(12);
  u[0] = u[1] = 0.1;
  FaultMask mask = FaultMask::nominal(12);
  mask.scale[1] = 0.0;
  const Wrench w = thruster_wrench(u, m, mask);
  EXPECT_LT((w.force - Vec3(0.1, 0.0, 0.0)).norm(), 1e-15);
  EXPECT_LT((w.torque - Vec3(0.0, 0.0, -0.015)).norm(), 1e-15);
}

TEST(ThrusterWrench, DimensionMismatchThrows) {
  const VehicleModel m = make_default_vehicle();
  EXPECT_THROW(thruster_wrench(VecX::Zero(7), m, FaultMask::nominal(12)),
               std::invalid_argument);
}

TEST(ThrusterWrench, LinearInInput) {
  const VehicleModel m = make_default_vehicle();
  FaultMask mask = FaultMask::nominal(12);
  mask.scale[3] = 0.4;
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> uni(0.0, 0.2);
  for (int trial = 0; trial < 20; ++trial) {
    VecX u1(12), u2(12);
    for (int i = 0; i < 12; ++i) {
      u1[i] = uni(rng);
      u2[i] = uni(rng);
    }
    const double a = 0.3, b = 0.6;
    const Wrench wa = thruster_wrench(u1, m, mask);
    const Wrench wb = thruster_wrench(u2, m, mask);
    const Wrench wc = thruster_wrench(a * u1 + b * u2, m, mask);
    EXPECT_LT((wc.force - a * wa.force - b * wb.force).norm(), 1e-14);
    EXPECT_LT((wc.torque - a * wa.torque - b * wb.torque).norm(), 1e-14);
  }
}

TEST(ContinuousDerivative, RestIsEquilibrium) {
  const VehicleModel m = make_default_vehicle();
  const StateDerivative d =
      continuous_derivative(State{}, VecX::Zero(12), m, FaultMask::nominal(12));
  EXPECT_LT(d.r_dot.norm() + d.q_dot.norm() + d.v_dot.norm() + d.omega_dot.norm(),
            1e-15);
}

TEST(ContinuousDerivative, PureForceDecouples) {
  const VehicleModel m = make_default_vehicle();
  VecX u = VecX::Zero(12);
  u[0] = u[1] = 0.1;  // net +x force of 0.2 N
  const StateDerivative d =
      continuous_derivative(State{}, u, m, FaultMask::nominal(12));
  EXPECT_LT((d.v_dot - Vec3(0.02, 0.0, 0.0)).norm(), 1e-15);
  EXPECT_LT(d.r_dot.norm(), 1e-15);
  EXPECT_LT(d.q_dot.norm(), 1e-15);
  EXPECT_LT(d.omega_dot.norm(), 1e-15);
}

// Independent oracle: midpoint-rule integration of Euler's rigid-body
// equations alone, finite-differenced around t = 0.
TEST(ContinuousDerivative, GyroscopicTermMatchesEulerEquationOracle) {
  const VehicleModel m = tumbling_vehicle();
  State x;
  x.omega = Vec3(0.7, -0.3, 0.5);  // off-principal-axis spin

  auto euler_rhs = [&](const Vec3& w) -> Vec3 {
    return m.inertia.inverse() * (-w.cross(m.inertia * w));
  };
  auto midpoint_propagate = [&](Vec3 w, double h, int steps) {
    for (int i = 0; i < steps; ++i) {
      const Vec3 wm = w + 0.5 * h * euler_rhs(w);
      w += h * euler_rhs(wm);
    }
    return w;
  };

  const double h = 1e-5;
  const Vec3 w_plus = midpoint_propagate(x.omega, h, 100);
  const Vec3 w_minus = midpoint_propagate(x.omega, -h, 100);
  const Vec3 omega_dot_fd = (w_plus - w_minus) / (2.0 * 100 * h);

  const StateDerivative d =
      continuous_derivative(x, VecX::Zero(12), m, FaultMask::nominal(12));
  EXPECT_LT((d.omega_dot - omega_dot_fd).norm(), 1e-7);
}

TEST(Rk4Step, RestZeroInputIsFixedPoint) {
  const VehicleModel m = make_default_vehicle();
  State x;
  x.r = Vec3(1.0, -2.0, 3.0);
  const State next = rk4_step(x, VecX::Zero(12), 0.37, m, FaultMask::nominal(12));
  EXPECT_EQ((next.r - x.r).norm(), 0.0);
  EXPECT_EQ((next.q - x.q).norm(), 0.0);
  EXPECT_EQ(next.v.norm(), 0.0);
  EXPECT_EQ(next.omega.norm(), 0.0);
}

TEST(Rk4Step, DoubleIntegratorClosedForm) {
  // 0.2 N along +x on 10 kg from rest for 1 s: v = 0.02 m/s, r = 0.001 m.
  const VehicleModel m = make_default_vehicle();
  VecX u = VecX::Zero(12);
  u[0] = u[1] = 0.1;
  const State x =
      propagate(State{}, u, 0.01, 100, m, FaultMask::nominal(12));
  EXPECT_NEAR(x.v.x(), 0.02, 1e-9);
  EXPECT_NEAR(x.r.x(), 0.001, 1e-9);
  EXPECT_LT(std::abs(x.v.y()) + std::abs(x.v.z()), 1e-12);
}

TEST(Rk4Step, TorqueFreeConservation) {
  const VehicleModel m = tumbling_vehicle();
  State x;
  x.q = Vec4(0.2, -0.1, 0.3, 0.9).normalized();
  x.omega = Vec3(0.3, -0.2, 0.4);

  const Vec3 momentum0 = quat_rotate(x.q, m.inertia * x.omega);
  const double energy0 = 0.5 * x.omega.dot(m.inertia * x.omega);

  double worst_momentum = 0.0, worst_energy = 0.0, worst_norm = 0.0;
  const VecX u = VecX::Zero(12);
  const FaultMask mask = FaultMask::nominal(12);
  for (int i = 0; i < 10000; ++i) {
    x = rk4_step(x, u, 0.01, m, mask);
    const Vec3 momentum = quat_rotate(x.q, m.inertia * x.omega);
    const double energy = 0.5 * x.omega.dot(m.inertia * x.omega);
    worst_momentum = std::max(worst_momentum,
                              (momentum - momentum0).norm() / momentum0.norm());
    worst_energy = std::max(worst_energy, std::abs(energy - energy0) / energy0);
    worst_norm = std::max(worst_norm, std::abs(x.q.norm() - 1.0));
  }
  EXPECT_LT(worst_momentum, 1e-4);
  EXPECT_LT(worst_energy, 1e-4);
  EXPECT_LT(worst_norm, 1e-9);
}

TEST(Rk4Step, AllOnesMaskIsBitIdenticalToNominal) {
  const VehicleModel m = make_default_vehicle();
  State x;
  x.v = Vec3(0.1, -0.05, 0.02);
  x.omega = Vec3(0.2, 0.1, -0.3);
  VecX u = VecX::LinSpaced(12, 0.0, 0.2);

  FaultMask ones;
  ones.scale = VecX::Ones(12);
  const State a = rk4_step(x, u, 0.01, m, FaultMask::nominal(12));
  const State b = rk4_step(x, u, 0.01, m, ones);
  EXPECT_TRUE(a.r == b.r && a.q == b.q && a.v == b.v && a.omega == b.omega);
}

TEST(Rk4Step, ObservedConvergenceOrderAtLeastFour) {
  const VehicleModel m = tumbling_vehicle();
  State x0;
  x0.omega = Vec3(10.0, -6.0, 4.0);  // fast tumble keeps errors above roundoff
  x0.v = Vec3(0.2, -0.1, 0.05);
  VecX u = VecX::Zero(12);
  u[0] = 0.15;
  u[4] = 0.1;
  const FaultMask mask = FaultMask::nominal(12);

  const double horizon = 0.5;
  auto end_state = [&](double dt) {
    return propagate(x0, u, dt, static_cast<int>(std::round(horizon / dt)), m, mask);
  };
  const State ref = end_state(1e-5);
  auto err = [&](const State& s) {
    return std::sqrt((s.r - ref.r).squaredNorm() + (s.q - ref.q).squaredNorm() +
                     (s.v - ref.v).squaredNorm() + (s.omega - ref.omega).squaredNorm());
  };

  std::vector<double> dts = {0.01, 0.005, 0.0025, 0.00125, 0.000625};
  std::vector<double> log_dt, log_err;
  for (double dt : dts) {
    log_dt.push_back(std::log(dt));
    log_err.push_back(std::log(err(end_state(dt))));
  }
  // Least-squares slope of log err vs log dt.
  const int n = static_cast<int>(dts.size());
  double mx = 0, my = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    mx += log_dt[i] / n;
    my += log_err[i] / n;
  }
  for (int i = 0; i < n; ++i) {
    sxx += (log_dt[i] - mx) * (log_dt[i] - mx);
    sxy += (log_dt[i] - mx) * (log_err[i] - my);
  }
  const double slope = sxy / sxx;
  EXPECT_GE(slope, 3.9);
}

TEST(Rk4Step, ConsistentWithContinuousDerivative) {
  const VehicleModel m = tumbling_vehicle();
  State x;
  x.q = Vec4(0.1, 0.2, -0.1, 0.97).normalized();
  x.v = Vec3(0.2, 0.1, -0.15);
  x.omega = Vec3(0.4, -0.3, 0.2);
  VecX u = VecX::Constant(12, 0.05);
  const FaultMask mask = FaultMask::nominal(12);

  const double dt = 1e-7;
  const State next = rk4_step(x, u, dt, m, mask);
  const StateDerivative d = continuous_derivative(x, u, m, mask);
  EXPECT_LT(((next.r - x.r) / dt - d.r_dot).norm(), 1e-6);
  EXPECT_LT(((next.v - x.v) / dt - d.v_dot).norm(), 1e-6);
  EXPECT_LT(((next.omega - x.omega) / dt - d.omega_dot).norm(), 1e-6);
}

TEST(Rk4Step, NonFiniteIntermediateThrows) {
  const VehicleModel m = make_default_vehicle();
  State x;
  x.v = Vec3(1e200, 1e200, 0.0);
  x.omega = Vec3(0.0, 0.0, 1e200);
  EXPECT_THROW(rk4_step(x, VecX::Zero(12), 0.01, m, FaultMask::nominal(12)),
               std::runtime_error);
}

TEST(DefaultVehicle, MatchesDocumentedParameters) {
  const VehicleModel m = make_default_vehicle();
  EXPECT_EQ(m.mass, 10.0);
  EXPECT_EQ(m.isp, 40.0);
  EXPECT_EQ(m.body_radius, 0.3);
  EXPECT_EQ(m.num_thrusters(), 12);
}

TEST(DefaultVehicle, WrenchMapHasFullRank) {
  const VehicleModel m = make_default_vehicle();
  Eigen::FullPivLU<MatX> lu(m.wrench_map());
  EXPECT_EQ(lu.rank(), 6);
}

TEST(DefaultVehicle, AllThrustersFiringEquallyCancels) {
  const VehicleModel m = make_default_vehicle();
  const Wrench w =
      thruster_wrench(VecX::Constant(12, 0.2), m, FaultMask::nominal(12));
  EXPECT_LT(w.force.norm(), 1e-14);
  EXPECT_LT(w.torque.norm(), 1e-14);
}

TEST(DefaultVehicle, AuthorityInBothSigns) {
  // Every +/- axis force and torque must be reachable with nonnegative u.
  const VehicleModel m = make_default_vehicle();
  const MatX wmap = m.wrench_map();
  for (int axis = 0; axis < 6; ++axis) {
    for (double sign : {1.0, -1.0}) {
      // Least squares over each single pair won't do; check via LP-like
      // heuristic: project desired wrench on the positive span.
      VecX target = VecX::Zero(6);
      target[axis] = sign;
      // Nonnegative least squares by projected gradient (small, test-only).
      VecX u = VecX::Constant(12, 0.01);
      for (int it = 0; it < 5000; ++it) {
        VecX grad = wmap.transpose() * (wmap * u - target);
        u = (u - 0.05 * grad).cwiseMax(0.0);
      }
      EXPECT_LT((wmap * u - target).norm(), 1e-6)
          << "axis " << axis << " sign " << sign;
    }
  }
}

TEST(FaultMaskValidation, RejectsOutOfRange) {
  FaultMask mask = FaultMask::nominal(12);
  mask.scale[2] = 1.5;
  EXPECT_THROW(mask.validate(12), std::invalid_argument);
  mask.scale[2] = -0.1;
  EXPECT_THROW(mask.validate(12), std::invalid_argument);
}

TEST(VehicleModelValidation, RejectsSingularInertia) {
  VehicleModel m = make_default_vehicle();
  m.inertia(0, 0) = 0.0;
  EXPECT_THROW(m.validate(), std::invalid_argument);
}
