// Copyright 2026 The omegagait Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Robot geometry, planar chain kinematics, body frame and feasibility.
//
// The robot is a chain of n_joints + 1 identical rigid modules joined by
// yaw joints. Only in-plane (yaw) motion is modeled.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "omegagait/errors.hpp"

namespace omegagait {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Each side of a module rectangle is pulled in by this much (meters) before
/// the self-collision test, so grazing contact does not count.
inline constexpr double kCollisionShrink = 1e-3;

/// Below this norm the sum of unit heading vectors has no direction.
inline constexpr double kDegenerateAxisNorm = 1e-9;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps to (-pi, pi].
inline double wrap_angle(double a) {
  double w = std::remainder(a, kTwoPi);
  if (w <= -kPi) w += kTwoPi;
  return w;
}

/// Wraps to [0, 2pi).
inline double wrap_positive(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

/// Geometry of the articulated chain. Defaults describe the 8-joint robot
/// with 7 cm x 5 cm modules. The module mass only sets the friction load
/// and cancels out of every quasi-static displacement.
struct RobotModel {
  int n_joints = 8;
  double module_width = 0.05;   // m
  double module_length = 0.07;  // m, joint-to-joint pitch
  double module_mass = 0.1;     // kg
  double joint_limit = kPi / 2; // rad

  int n_modules() const { return n_joints + 1; }
  double body_length() const { return module_length * n_modules(); }

  void validate() const {
    if (n_joints < 2) throw ParameterError("n_joints must be >= 2");
    if (!(module_width > 0)) throw ParameterError("module_width must be > 0");
    if (!(module_length > 0)) throw ParameterError("module_length must be > 0");
    if (!(module_mass > 0)) throw ParameterError("module_mass must be > 0");
    if (!(joint_limit > 0 && joint_limit <= kPi))
      throw ParameterError("joint_limit must lie in (0, pi]");
  }
};

/// Joint angles of the N yaw joints, radians.
struct ShapeState {
  std::vector<double> angles;

  ShapeState() = default;
  explicit ShapeState(std::vector<double> a) : angles(std::move(a)) {}
  static ShapeState zeros(int n) { return ShapeState(std::vector<double>(n, 0.0)); }

  std::size_t size() const { return angles.size(); }
  double operator[](std::size_t i) const { return angles[i]; }
  double& operator[](std::size_t i) { return angles[i]; }

  /// Reflection about the body axis.
  ShapeState mirrored() const {
    ShapeState m = *this;
    for (double& a : m.angles) a = -a;
    return m;
  }
  /// Same physical curve described from the other end of the chain.
  ShapeState reversed() const {
    ShapeState r;
    r.angles.assign(angles.rbegin(), angles.rend());
    for (double& a : r.angles) a = -a;
    return r;
  }
};

inline void check_shape(const RobotModel& robot, const ShapeState& shape) {
  if (static_cast<int>(shape.size()) != robot.n_joints)
    throw ParameterError("shape has " + std::to_string(shape.size()) + " angles, robot has " +
                         std::to_string(robot.n_joints) + " joints");
  for (double a : shape.angles)
    if (!std::isfinite(a)) throw ParameterError("non-finite joint angle");
}

/// Planar pose. Headings are kept unwrapped; call wrap_angle when reporting.
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  Eigen::Vector2d position() const { return {x, y}; }

  Eigen::Vector2d transform(const Eigen::Vector2d& p) const {
    const double c = std::cos(heading), s = std::sin(heading);
    return {x + c * p.x() - s * p.y(), y + s * p.x() + c * p.y()};
  }

  /// this * local
  Pose2 compose(const Pose2& local) const {
    const Eigen::Vector2d p = transform(local.position());
    return {p.x(), p.y(), heading + local.heading};
  }

  /// Advances the pose by the exponential of a body-frame twist held for dt.
  Pose2 advanced(double vx, double vy, double wz, double dt) const {
    const double th = wz * dt;
    double a, b;  // sin(th)/th and (1 - cos(th))/th
    if (std::abs(th) < 1e-6) {
      a = 1.0 - th * th / 6.0;
      b = th / 2.0 - th * th * th / 24.0;
    } else {
      a = std::sin(th) / th;
      b = (1.0 - std::cos(th)) / th;
    }
    const double lx = (a * vx - b * vy) * dt;
    const double ly = (b * vx + a * vy) * dt;
    return compose(Pose2{lx, ly, th});
  }
};

/// Rectangle with its long axis along `heading`.
struct OrientedRect {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double heading = 0.0;
  double half_length = 0.0;
  double half_width = 0.0;

  Eigen::Vector2d axis_u() const { return {std::cos(heading), std::sin(heading)}; }
  Eigen::Vector2d axis_v() const { return {-std::sin(heading), std::cos(heading)}; }

  bool contains(const Eigen::Vector2d& p) const {
    const Eigen::Vector2d d = p - center;
    return std::abs(d.dot(axis_u())) <= half_length && std::abs(d.dot(axis_v())) <= half_width;
  }
};

/// Separating-axis test. Touching rectangles count as overlapping.
inline bool rects_overlap(const OrientedRect& a, const OrientedRect& b) {
  const Eigen::Vector2d d = b.center - a.center;
  const Eigen::Vector2d au = a.axis_u(), av = a.axis_v();
  const Eigen::Vector2d bu = b.axis_u(), bv = b.axis_v();
  for (const Eigen::Vector2d& axis : {au, av, bu, bv}) {
    const double ra = a.half_length * std::abs(au.dot(axis)) + a.half_width * std::abs(av.dot(axis));
    const double rb = b.half_length * std::abs(bu.dot(axis)) + b.half_width * std::abs(bv.dot(axis));
    if (std::abs(d.dot(axis)) > ra + rb) return false;
  }
  return true;
}

/// Module centers and headings. Consecutive modules share a joint point at
/// the end of their centerlines, so joint points are exactly one module
/// length apart.
struct Backbone {
  std::vector<Pose2> module_poses;
  double module_length = 0.0;
  double module_width = 0.0;

  std::size_t n_modules() const { return module_poses.size(); }

  /// The N + 2 centerline endpoints, tail end first.
  std::vector<Eigen::Vector2d> joint_points() const {
    std::vector<Eigen::Vector2d> pts;
    pts.reserve(module_poses.size() + 1);
    for (const Pose2& m : module_poses)
      pts.push_back(m.transform({-0.5 * module_length, 0.0}));
    pts.push_back(module_poses.back().transform({0.5 * module_length, 0.0}));
    return pts;
  }

  std::vector<OrientedRect> module_rects(double shrink = 0.0) const {
    std::vector<OrientedRect> rects;
    rects.reserve(module_poses.size());
    for (const Pose2& m : module_poses)
      rects.push_back({m.position(), m.heading, 0.5 * module_length - shrink,
                       0.5 * module_width - shrink});
    return rects;
  }

  Eigen::Vector2d centroid() const {
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    for (const Pose2& m : module_poses) c += m.position();
    return c / static_cast<double>(module_poses.size());
  }

  /// Re-expresses every module pose through `g` (e.g. body to world).
  Backbone transformed(const Pose2& g) const {
    Backbone out = *this;
    for (Pose2& m : out.module_poses) m = g.compose(m);
    return out;
  }
};

/// Circular mean of the module headings.
inline double mean_body_axis(const Backbone& backbone) {
  double sx = 0.0, sy = 0.0;
  for (const Pose2& m : backbone.module_poses) {
    sx += std::cos(m.heading);
    sy += std::sin(m.heading);
  }
  if (std::hypot(sx, sy) < kDegenerateAxisNorm)
    throw DegenerateAxisError("module headings cancel; mean body axis undefined");
  return std::atan2(sy, sx);
}

/// Chain with the tail joint point at the origin and the first module along +x.
inline Backbone chain_from_shape(const RobotModel& robot, const ShapeState& shape) {
  check_shape(robot, shape);
  Backbone bb;
  bb.module_length = robot.module_length;
  bb.module_width = robot.module_width;
  bb.module_poses.resize(robot.n_modules());
  const double half = 0.5 * robot.module_length;
  double ex = 0.0, ey = 0.0, h = 0.0;
  for (int k = 0; k < robot.n_modules(); ++k) {
    if (k > 0) h += shape[k - 1];
    const double c = std::cos(h), s = std::sin(h);
    bb.module_poses[k] = {ex + half * c, ey + half * s, h};
    ex += robot.module_length * c;
    ey += robot.module_length * s;
  }
  return bb;
}

/// Backbone in the body frame: centroid of module centers at the origin and
/// the mean body axis along +x.
inline Backbone backbone_from_shape(const RobotModel& robot, const ShapeState& shape) {
  Backbone bb = chain_from_shape(robot, shape);
  const double axis = mean_body_axis(bb);
  const Eigen::Vector2d c = bb.centroid();
  const double ca = std::cos(axis), sa = std::sin(axis);
  for (Pose2& m : bb.module_poses) {
    const double dx = m.x - c.x(), dy = m.y - c.y();
    m = {ca * dx + sa * dy, -sa * dx + ca * dy, m.heading - axis};
  }
  return bb;
}

inline bool within_joint_limits(const RobotModel& robot, const ShapeState& shape) {
  for (double a : shape.angles)
    if (std::abs(a) > robot.joint_limit) return false;
  return true;
}

/// True iff two modules at least two apart along the chain overlap.
inline bool self_collides(const RobotModel& robot, const ShapeState& shape) {
  const auto rects = chain_from_shape(robot, shape).module_rects(kCollisionShrink);
  for (std::size_t a = 0; a < rects.size(); ++a)
    for (std::size_t b = a + 2; b < rects.size(); ++b)
      if (rects_overlap(rects[a], rects[b])) return true;
  return false;
}

inline bool is_feasible(const RobotModel& robot, const ShapeState& shape) {
  return within_joint_limits(robot, shape) && !self_collides(robot, shape);
}

}  // namespace omegagait
