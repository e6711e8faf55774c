#pragma once

/// Inspection-mission geometry: waypoint missions, keep-in corridors built by
/// linear radius interpolation, keep-out ellipsoids, free-space membership
/// margins, and arc-length path utilities used by the contouring cost.
///
/// Sign convention for all margins: >= 0 is feasible, < 0 is in violation.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffi/quat.hpp"
#include "ffi/types.hpp"

namespace ffi {

struct InspectionPoint {
  std::optional<double> arrival_time;   // t [s], linger mode
  std::optional<double> linger_time;    // t_l [s], linger mode
  Vec3 position = Vec3::Zero();         // inertial [m]
  Vec4 orientation = quat_identity();   // (x, y, z, w)
  double corridor_radius = 1.0;         // r_ins [m]
  std::optional<Vec3> velocity_hint;    // inertial [m/s]
};

/// Quadratic keep-out region { p : (p - c)^T P (p - c) < 1 }.
class KeepOutEllipsoid {
 public:
  KeepOutEllipsoid(const Vec3& center, const Mat3& shape, std::string name = "")
      : center_(center), shape_(shape), name_(std::move(name)) {
    if ((shape_ - shape_.transpose()).norm() > 1e-9 * (1.0 + shape_.norm())) {
      throw std::invalid_argument("KeepOutEllipsoid: shape matrix must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat3> es(shape_);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
      throw std::invalid_argument("KeepOutEllipsoid: shape matrix must be positive definite");
    }
    axes_ = es.eigenvalues().cwiseSqrt().cwiseInverse();  // semi-axis lengths
    rot_ = es.eigenvectors();
  }

  static KeepOutEllipsoid from_semi_axes(const Vec3& center, const Vec3& semi_axes,
                                         const Vec4& orientation = quat_identity(),
                                         std::string name = "") {
    if ((semi_axes.array() <= 0.0).any()) {
      throw std::invalid_argument("KeepOutEllipsoid: semi-axes must be positive");
    }
    const Mat3 r = quat_to_rotmat(orientation);
    const Mat3 p =
        r * semi_axes.cwiseProduct(semi_axes).cwiseInverse().asDiagonal() * r.transpose();
    return KeepOutEllipsoid(center, p, std::move(name));
  }

  const Vec3& center() const { return center_; }
  const Mat3& shape() const { return shape_; }
  const Vec3& semi_axes() const { return axes_; }
  const std::string& name() const { return name_; }

  /// Shape matrix with every semi-axis grown by `inflation` (vehicle
  /// encasing-sphere radius). Conservative relative to the exact Minkowski
  /// sum, which is not an ellipsoid.
  Mat3 inflated_shape(double inflation) const {
    const Vec3 grown = axes_.array() + inflation;
    return rot_ * grown.cwiseProduct(grown).cwiseInverse().asDiagonal() * rot_.transpose();
  }

 private:
  Vec3 center_;
  Mat3 shape_;
  Vec3 axes_;
  Mat3 rot_;
  std::string name_;
};

/// (p - c)^T P~ (p - c) - 1 with P~ inflated per semi-axis; >= 0 is outside.
inline double ellipsoid_margin(const Vec3& p, const KeepOutEllipsoid& e,
                               double inflation) {
  if (!p.allFinite() || inflation < 0.0) {
    throw std::invalid_argument("ellipsoid_margin: bad input");
  }
  const Vec3 d = p - e.center();
  return d.dot(e.inflated_shape(inflation) * d) - 1.0;
}

/// Margin plus its gradient with respect to p.
inline double ellipsoid_margin_gradient(const Vec3& p, const KeepOutEllipsoid& e,
                                        double inflation, Vec3* grad) {
  const Mat3 shape = e.inflated_shape(inflation);
  const Vec3 d = p - e.center();
  if (grad != nullptr) *grad = 2.0 * shape * d;
  return d.dot(shape * d) - 1.0;
}

/// Keep-in corridor: union of capsule segments swept between consecutive
/// waypoints with linearly interpolated radii.
class KeepInCorridor {
 public:
  KeepInCorridor(std::vector<Vec3> waypoints, std::vector<double> radii)
      : waypoints_(std::move(waypoints)), radii_(std::move(radii)) {
    if (waypoints_.size() < 2) {
      throw std::invalid_argument("KeepInCorridor: need at least 2 waypoints");
    }
    if (radii_.size() != waypoints_.size()) {
      throw std::invalid_argument("KeepInCorridor: one radius per waypoint required");
    }
    for (double r : radii_) {
      if (!(r > 0.0)) throw std::invalid_argument("KeepInCorridor: radii must be positive");
    }
    for (size_t i = 0; i + 1 < waypoints_.size(); ++i) {
      if ((waypoints_[i + 1] - waypoints_[i]).norm() <= 0.0) {
        throw std::invalid_argument("KeepInCorridor: zero-length segment");
      }
    }
  }

  int num_segments() const { return static_cast<int>(waypoints_.size()) - 1; }
  const std::vector<Vec3>& waypoints() const { return waypoints_; }
  const std::vector<double>& radii() const { return radii_; }

 private:
  std::vector<Vec3> waypoints_;
  std::vector<double> radii_;
};

/// max over segments of r_interp(lambda*) - body_radius - dist(p, segment);
/// >= 0 means p is inside the corridor with clearance for the encasing
/// sphere. lambda* is the closest-point parameter on each segment.
inline double corridor_margin(const Vec3& p, const KeepInCorridor& c,
                              double body_radius) {
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < c.num_segments(); ++k) {
    const Vec3& a = c.waypoints()[k];
    const Vec3& b = c.waypoints()[k + 1];
    const Vec3 ab = b - a;
    const double lambda =
        std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    const double dist = (p - (a + lambda * ab)).norm();
    const double r = c.radii()[k] + lambda * (c.radii()[k + 1] - c.radii()[k]);
    best = std::max(best, r - body_radius - dist);
  }
  return best;
}

/// Margin plus gradient with respect to p (from the maximizing segment; at a
/// segment tie or on the centerline the gradient is one-sided/zero).
inline double corridor_margin_gradient(const Vec3& p, const KeepInCorridor& c,
                                       double body_radius, Vec3* grad) {
  double best = -std::numeric_limits<double>::infinity();
  Vec3 best_grad = Vec3::Zero();
  for (int k = 0; k < c.num_segments(); ++k) {
    const Vec3& a = c.waypoints()[k];
    const Vec3& b = c.waypoints()[k + 1];
    const Vec3 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double lambda_raw = (p - a).dot(ab) / len2;
    const double lambda = std::clamp(lambda_raw, 0.0, 1.0);
    const Vec3 closest = a + lambda * ab;
    const Vec3 offset = p - closest;
    const double dist = offset.norm();
    const double r = c.radii()[k] + lambda * (c.radii()[k + 1] - c.radii()[k]);
    const double margin = r - body_radius - dist;
    if (margin > best) {
      best = margin;
      Vec3 g = Vec3::Zero();
      if (dist > 1e-12) g = -offset / dist;
      if (lambda_raw > 0.0 && lambda_raw < 1.0) {
        g += (c.radii()[k + 1] - c.radii()[k]) / std::sqrt(len2) * ab.normalized();
      }
      best_grad = g;
    }
  }
  if (grad != nullptr) *grad = best_grad;
  return best;
}

class FreeSpace;
inline double free_space_margin(const Vec3& p, const FreeSpace& fs);

/// Free-space margin from the raw pieces; lets validation run before a
/// FreeSpace is constructed.
inline double free_space_margin_parts(const Vec3& p, const KeepInCorridor& corridor,
                                      const std::vector<KeepOutEllipsoid>& keepouts,
                                      double body_radius) {
  double m = corridor_margin(p, corridor, body_radius);
  for (const auto& e : keepouts) {
    m = std::min(m, ellipsoid_margin(p, e, body_radius));
  }
  return m;
}

/// Admissible position set: keep-in corridor minus inflated keep-out
/// ellipsoids. Construction validates that every waypoint lies strictly
/// inside the set.
class FreeSpace {
 public:
  FreeSpace(KeepInCorridor corridor, std::vector<KeepOutEllipsoid> keepouts,
            double body_radius)
      : corridor_(std::move(corridor)),
        keepouts_(std::move(keepouts)),
        body_radius_(body_radius) {
    if (!(body_radius_ > 0.0)) {
      throw std::invalid_argument("FreeSpace: body_radius must be positive");
    }
    for (size_t i = 0; i < corridor_.waypoints().size(); ++i) {
      if (free_space_margin(corridor_.waypoints()[i], *this) <= 0.0) {
        throw std::invalid_argument("FreeSpace: waypoint " + std::to_string(i) +
                                    " is not strictly inside the free space");
      }
    }
  }

  const KeepInCorridor& corridor() const { return corridor_; }
  const std::vector<KeepOutEllipsoid>& keepouts() const { return keepouts_; }
  double body_radius() const { return body_radius_; }

 private:
  KeepInCorridor corridor_;
  std::vector<KeepOutEllipsoid> keepouts_;
  double body_radius_;
};

/// min(corridor margin, all keep-out margins); > 0 iff strictly inside the
/// free space. Keep-out inflation is the vehicle body radius.
inline double free_space_margin(const Vec3& p, const FreeSpace& fs) {
  double m = corridor_margin(p, fs.corridor(), fs.body_radius());
  for (const auto& e : fs.keepouts()) {
    m = std::min(m, ellipsoid_margin(p, e, fs.body_radius()));
  }
  return m;
}

enum class PathInterpolation { kLinear, kCubic };

namespace detail {

/// Natural cubic spline through (t_i, y_i) per coordinate.
class CubicSpline3 {
 public:
  CubicSpline3() = default;

  CubicSpline3(const std::vector<double>& t, const std::vector<Vec3>& y)
      : t_(t), y_(y) {
    const int n = static_cast<int>(t.size());
    m_.assign(n, Vec3::Zero());
    if (n < 3) return;  // degenerates to linear
    // Tridiagonal solve for second derivatives, natural end conditions.
    std::vector<double> diag(n, 0.0), sub(n, 0.0), sup(n, 0.0);
    std::vector<Vec3> rhs(n, Vec3::Zero());
    diag[0] = diag[n - 1] = 1.0;
    for (int i = 1; i + 1 < n; ++i) {
      const double h0 = t[i] - t[i - 1];
      const double h1 = t[i + 1] - t[i];
      sub[i] = h0 / 6.0;
      diag[i] = (h0 + h1) / 3.0;
      sup[i] = h1 / 6.0;
      rhs[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
    }
    for (int i = 1; i < n; ++i) {
      const double w = sub[i] / diag[i - 1];
      diag[i] -= w * sup[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    m_[n - 1] = rhs[n - 1] / diag[n - 1];
    for (int i = n - 2; i >= 0; --i) {
      m_[i] = (rhs[i] - sup[i] * m_[i + 1]) / diag[i];
    }
  }

  Vec3 eval(double t) const {
    const int i = interval(t);
    const double h = t_[i + 1] - t_[i];
    const double u = (t - t_[i]) / h;
    const double w = 1.0 - u;
    return w * y_[i] + u * y_[i + 1] +
           h * h / 6.0 *
               ((w * w * w - w) * m_[i] + (u * u * u - u) * m_[i + 1]);
  }

  Vec3 derivative(double t) const {
    const int i = interval(t);
    const double h = t_[i + 1] - t_[i];
    const double u = (t - t_[i]) / h;
    const double w = 1.0 - u;
    return (y_[i + 1] - y_[i]) / h +
           h / 6.0 * ((1.0 - 3.0 * w * w) * m_[i] + (3.0 * u * u - 1.0) * m_[i + 1]);
  }

 private:
  int interval(double t) const {
    int lo = 0;
    int hi = static_cast<int>(t_.size()) - 2;
    while (lo < hi) {
      const int mid = (lo + hi + 1) / 2;
      if (t_[mid] <= t) lo = mid;
      else hi = mid - 1;
    }
    return lo;
  }

  std::vector<double> t_;
  std::vector<Vec3> y_;
  std::vector<Vec3> m_;
};

}  // namespace detail

struct PathProjection {
  double s = 0.0;        // arc length of the local minimizer [m]
  Vec3 point = Vec3::Zero();
  double lateral = 0.0;  // distance from query to path(s) [m]
};

/// Arc-length-parameterized centerline through the inspection waypoints with
/// sphericaly interpolated orientation. Piecewise linear by default; cubic
/// splines are opt-in.
class ReferencePath {
 public:
  ReferencePath(const std::vector<InspectionPoint>& points,
                PathInterpolation interp = PathInterpolation::kLinear)
      : interp_(interp) {
    if (points.size() < 2) {
      throw std::invalid_argument("ReferencePath: need at least 2 points");
    }
    for (const auto& pt : points) {
      positions_.push_back(pt.position);
      quats_.push_back(quat_normalized(pt.orientation));
    }
    for (size_t i = 0; i + 1 < positions_.size(); ++i) {
      if ((positions_[i + 1] - positions_[i]).norm() < 1e-12) {
        throw std::invalid_argument(
            "ReferencePath: duplicate consecutive waypoint positions");
      }
    }
    if (interp_ == PathInterpolation::kCubic) {
      build_cubic();
    } else {
      build_linear();
    }
  }

  double length() const { return span_s_.back(); }
  int num_spans() const { return static_cast<int>(positions_.size()) - 1; }
  const std::vector<Vec3>& waypoints() const { return positions_; }
  const std::vector<Vec4>& waypoint_quats() const { return quats_; }

  /// Arc length at waypoint i.
  double waypoint_s(int i) const { return span_s_[static_cast<size_t>(i)]; }

  Vec3 position_at(double s) const {
    s = std::clamp(s, 0.0, length());
    if (interp_ == PathInterpolation::kLinear) {
      const int k = span_index(s);
      const double u = (s - span_s_[k]) / (span_s_[k + 1] - span_s_[k]);
      return positions_[k] + u * (positions_[k + 1] - positions_[k]);
    }
    return spline_.eval(tau_of_s(s));
  }

  /// Unit tangent; constant within each span for linear interpolation.
  Vec3 tangent_at(double s) const {
    s = std::clamp(s, 0.0, length());
    if (interp_ == PathInterpolation::kLinear) {
      const int k = span_index(s);
      return (positions_[k + 1] - positions_[k]).normalized();
    }
    return spline_.derivative(tau_of_s(s)).normalized();
  }

  /// Orientation slerped between the bracketing waypoint quaternions by
  /// fractional arc length.
  Vec4 orientation_at(double s) const {
    s = std::clamp(s, 0.0, length());
    const int k = span_index(s);
    const double u = (s - span_s_[k]) / (span_s_[k + 1] - span_s_[k]);
    return quat_slerp(quats_[k], quats_[k + 1], u);
  }

  /// Span containing s (last span for s = L) plus its arc-length bounds; used
  /// by the contouring cost to differentiate the slerped orientation.
  int span_index(double s) const {
    int lo = 0;
    int hi = num_spans() - 1;
    while (lo < hi) {
      const int mid = (lo + hi + 1) / 2;
      if (span_s_[mid] <= s) lo = mid;
      else hi = mid - 1;
    }
    return lo;
  }

  /// Rotation vector carrying waypoint k's orientation to waypoint k+1's.
  Vec3 span_rotvec(int k) const {
    Vec4 qb = quats_[k + 1];
    if (quats_[k].dot(qb) < 0.0) qb = -qb;
    return quat_to_rotvec(quat_multiply(quat_conjugate(quats_[k]), qb));
  }

  /// Local closest-point search windowed to the span containing s_hint plus
  /// one neighbor each side; ties resolve toward the hint so repeated
  /// projections cannot jump backward on self-approaching paths.
  PathProjection project(const Vec3& p, double s_hint) const {
    const double L = length();
    s_hint = std::clamp(s_hint, 0.0, L);
    const int hint_span = span_index(s_hint);
    const int k0 = std::max(0, hint_span - 1);
    const int k1 = std::min(num_spans() - 1, hint_span + 1);

    PathProjection best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int k = k0; k <= k1; ++k) {
      double s_star;
      if (interp_ == PathInterpolation::kLinear) {
        const Vec3& a = positions_[k];
        const Vec3 ab = positions_[k + 1] - a;
        const double lambda =
            std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
        s_star = span_s_[k] + lambda * (span_s_[k + 1] - span_s_[k]);
      } else {
        s_star = golden_section(p, span_s_[k], span_s_[k + 1]);
      }
      const Vec3 pt = position_at(s_star);
      const double dist = (p - pt).norm();
      const bool better =
          dist < best_dist - 1e-12 ||
          (dist < best_dist + 1e-12 &&
           std::abs(s_star - s_hint) < std::abs(best.s - s_hint));
      if (better) {
        best_dist = dist;
        best.s = s_star;
        best.point = pt;
        best.lateral = dist;
      }
    }
    return best;
  }

 private:
  void build_linear() {
    span_s_.resize(positions_.size());
    span_s_[0] = 0.0;
    for (size_t i = 0; i + 1 < positions_.size(); ++i) {
      span_s_[i + 1] = span_s_[i] + (positions_[i + 1] - positions_[i]).norm();
    }
  }

  void build_cubic() {
    // Chord-length parameterization, then arc length by chord subdivision
    // refined until the total changes by less than 1e-6 relative.
    const size_t n = positions_.size();
    std::vector<double> tau(n, 0.0);
    for (size_t i = 0; i + 1 < n; ++i) {
      tau[i + 1] = tau[i] + (positions_[i + 1] - positions_[i]).norm();
    }
    spline_ = detail::CubicSpline3(tau, positions_);

    int subdiv = 16;
    double prev_total = -1.0;
    for (int pass = 0; pass < 12; ++pass) {
      grid_tau_.clear();
      grid_s_.clear();
      grid_tau_.push_back(0.0);
      grid_s_.push_back(0.0);
      double s = 0.0;
      Vec3 prev = positions_.front();
      for (size_t k = 0; k + 1 < n; ++k) {
        for (int j = 1; j <= subdiv; ++j) {
          const double t =
              tau[k] + (tau[k + 1] - tau[k]) * static_cast<double>(j) / subdiv;
          const Vec3 pt = spline_.eval(t);
          s += (pt - prev).norm();
          prev = pt;
          grid_tau_.push_back(t);
          grid_s_.push_back(s);
        }
      }
      if (prev_total > 0.0 && std::abs(s - prev_total) <= 1e-6 * s) break;
      prev_total = s;
      subdiv *= 2;
    }

    span_s_.resize(n);
    for (size_t i = 0; i < n; ++i) {
      span_s_[i] = s_of_tau(tau[i]);
    }
    span_s_[0] = 0.0;
    span_s_[n - 1] = grid_s_.back();
  }

  double s_of_tau(double tau) const {
    const auto it = std::lower_bound(grid_tau_.begin(), grid_tau_.end(), tau);
    if (it == grid_tau_.begin()) return grid_s_.front();
    if (it == grid_tau_.end()) return grid_s_.back();
    const size_t i = static_cast<size_t>(it - grid_tau_.begin());
    const double u = (tau - grid_tau_[i - 1]) / (grid_tau_[i] - grid_tau_[i - 1]);
    return grid_s_[i - 1] + u * (grid_s_[i] - grid_s_[i - 1]);
  }

  double tau_of_s(double s) const {
    const auto it = std::lower_bound(grid_s_.begin(), grid_s_.end(), s);
    if (it == grid_s_.begin()) return grid_tau_.front();
    if (it == grid_s_.end()) return grid_tau_.back();
    const size_t i = static_cast<size_t>(it - grid_s_.begin());
    const double denom = grid_s_[i] - grid_s_[i - 1];
    const double u = denom > 0.0 ? (s - grid_s_[i - 1]) / denom : 0.0;
    return grid_tau_[i - 1] + u * (grid_tau_[i] - grid_tau_[i - 1]);
  }

  double golden_section(const Vec3& p, double s_lo, double s_hi) const {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = s_lo, b = s_hi;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = (p - position_at(c)).squaredNorm();
    double fd = (p - position_at(d)).squaredNorm();
    while (b - a > 1e-6) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = (p - position_at(c)).squaredNorm();
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + gr * (b - a);
        fd = (p - position_at(d)).squaredNorm();
      }
    }
    // Endpoints compete too: the span minimum may sit at a waypoint.
    double s_best = 0.5 * (a + b);
    double f_best = (p - position_at(s_best)).squaredNorm();
    for (double cand : {s_lo, s_hi}) {
      const double f = (p - position_at(cand)).squaredNorm();
      if (f < f_best) {
        f_best = f;
        s_best = cand;
      }
    }
    return s_best;
  }

  PathInterpolation interp_;
  std::vector<Vec3> positions_;
  std::vector<Vec4> quats_;
  std::vector<double> span_s_;   // arc length at each waypoint
  detail::CubicSpline3 spline_;  // cubic mode only
  std::vector<double> grid_tau_; // cubic mode: tau <-> arc length table
  std::vector<double> grid_s_;
};

inline ReferencePath build_path(const std::vector<InspectionPoint>& points,
                                PathInterpolation interp = PathInterpolation::kLinear) {
  return ReferencePath(points, interp);
}

inline PathProjection project_to_path(const Vec3& p, const ReferencePath& path,
                                      double s_hint) {
  return path.project(p, s_hint);
}

struct MissionViolation {
  enum class Kind { kWaypoint, kSegmentSample };
  Kind kind = Kind::kWaypoint;
  int index = 0;          // waypoint index, or segment index for samples
  double fraction = 0.0;  // position along the segment for samples
  Vec3 position = Vec3::Zero();
  double margin = 0.0;
  std::string blocking;   // "corridor" or the offending keep-out's name
};

namespace detail {

inline std::string blocking_constraint(const Vec3& p, const FreeSpace& fs) {
  double worst = corridor_margin(p, fs.corridor(), fs.body_radius());
  std::string name = "corridor";
  for (size_t j = 0; j < fs.keepouts().size(); ++j) {
    const double m = ellipsoid_margin(p, fs.keepouts()[j], fs.body_radius());
    if (m < worst) {
      worst = m;
      name = fs.keepouts()[j].name().empty() ? "keepout_" + std::to_string(j)
                                             : fs.keepouts()[j].name();
    }
  }
  return name;
}

}  // namespace detail

/// Checks every waypoint and 100 samples per interpolated segment for strict
/// free-space membership. Empty result means the mission is geometrically
/// feasible. Violations are data, not errors.
inline std::vector<MissionViolation> validate_mission(
    const std::vector<InspectionPoint>& points, const FreeSpace& fs,
    PathInterpolation interp = PathInterpolation::kLinear) {
  std::vector<MissionViolation> out;
  for (size_t i = 0; i < points.size(); ++i) {
    const double m = free_space_margin(points[i].position, fs);
    if (m <= 0.0) {
      MissionViolation v;
      v.kind = MissionViolation::Kind::kWaypoint;
      v.index = static_cast<int>(i);
      v.position = points[i].position;
      v.margin = m;
      v.blocking = detail::blocking_constraint(points[i].position, fs);
      out.push_back(v);
    }
  }
  if (points.size() < 2) return out;

  const ReferencePath path(points, interp);
  constexpr int kSamplesPerSegment = 100;
  for (int k = 0; k < path.num_spans(); ++k) {
    const double s0 = path.waypoint_s(k);
    const double s1 = path.waypoint_s(k + 1);
    for (int j = 1; j < kSamplesPerSegment; ++j) {
      const double f = static_cast<double>(j) / kSamplesPerSegment;
      const Vec3 p = path.position_at(s0 + f * (s1 - s0));
      const double m = free_space_margin(p, fs);
      if (m <= 0.0) {
        MissionViolation v;
        v.kind = MissionViolation::Kind::kSegmentSample;
        v.index = k;
        v.fraction = f;
        v.position = p;
        v.margin = m;
        v.blocking = detail::blocking_constraint(p, fs);
        out.push_back(v);
      }
    }
  }
  return out;
}

/// Convenience constructor: corridor from the waypoint chain, then membership
/// validation of the chain against the inflated keep-outs.
inline FreeSpace make_free_space(const std::vector<InspectionPoint>& points,
                                 std::vector<KeepOutEllipsoid> keepouts,
                                 double body_radius) {
  std::vector<Vec3> wps;
  std::vector<double> radii;
  for (const auto& p : points) {
    wps.push_back(p.position);
    radii.push_back(p.corridor_radius);
    if (!(p.corridor_radius > body_radius)) {
      throw std::invalid_argument(
          "make_free_space: corridor radius must exceed the body radius");
    }
  }
  return FreeSpace(KeepInCorridor(std::move(wps), std::move(radii)),
                   std::move(keepouts), body_radius);
}

}  // namespace ffi
