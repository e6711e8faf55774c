#pragma once

#include <Eigen/Dense>

namespace ffi {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

constexpr double kStandardGravity = 9.80665;  // g0 [m/s^2]

}  // namespace ffi
