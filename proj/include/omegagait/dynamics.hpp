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

// Quasi-static planar locomotion under isotropic Coulomb ground friction.
//
// At every instant the body twist is the one for which the friction forces
// on all contact points (plus any external force) sum to zero force and zero
// torque. Inertia is ignored, so displacement per cycle depends only on the
// path through shape space: it is independent of the friction coefficient,
// the module mass and the gait frequency.

#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "omegagait/errors.hpp"
#include "omegagait/gait.hpp"
#include "omegagait/model.hpp"

namespace omegagait {

inline constexpr double kGravity = 9.81;  // m/s^2

/// Body-frame planar twist.
struct BodyVelocity {
  double vx = 0.0;  // m/s
  double vy = 0.0;  // m/s
  double wz = 0.0;  // rad/s

  Eigen::Vector3d vec() const { return {vx, vy, wz}; }
  static BodyVelocity from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
};

/// Net planar force (N) and torque about the body origin (N m).
struct Wrench {
  double fx = 0.0;
  double fy = 0.0;
  double tz = 0.0;

  Eigen::Vector3d vec() const { return {fx, fy, tz}; }
};

/// Regularized Coulomb friction: F = -mu W v / sqrt(|v|^2 + eps^2).
struct FrictionModel {
  double mu = 0.3;
  double epsilon = 1e-4;  // m/s
  int contact_points_per_module = 3;

  void validate() const {
    if (!(mu > 0)) throw ParameterError("mu must be > 0");
    if (!(epsilon > 0)) throw ParameterError("epsilon must be > 0");
    if (contact_points_per_module < 1)
      throw ParameterError("contact_points_per_module must be >= 1");
  }
};

inline Eigen::Vector2d friction_force(const Eigen::Vector2d& v, double weight,
                                      const FrictionModel& fm) {
  const double s = std::sqrt(v.squaredNorm() + fm.epsilon * fm.epsilon);
  return (-fm.mu * weight / s) * v;
}

/// Points on the module centerlines in the body frame, with the velocity each
/// point has from the shape change alone (body twist zero). Velocities are the
/// exact time derivative of the body-frame positions, including the motion of
/// the centroid / mean-axis frame itself.
struct BodyPoints {
  std::vector<Eigen::Vector2d> position;
  std::vector<Eigen::Vector2d> velocity;
  std::vector<int> module;

  std::size_t size() const { return position.size(); }
};

/// `offsets` are measured along each module centerline from its center.
inline BodyPoints body_points(const RobotModel& robot, const ShapeState& shape,
                              const std::vector<double>& shape_vel,
                              const std::vector<double>& offsets) {
  check_shape(robot, shape);
  if (static_cast<int>(shape_vel.size()) != robot.n_joints)
    throw ParameterError("shape velocity length does not match the robot");
  const int nm = robot.n_modules();
  const double len = robot.module_length;

  // Raw chain (tail joint at origin) and its time derivative.
  std::vector<Eigen::Vector2d> center(nm), center_dot(nm), dir(nm);
  std::vector<double> head_dot(nm);
  Eigen::Vector2d e = Eigen::Vector2d::Zero(), e_dot = Eigen::Vector2d::Zero();
  double h = 0.0, h_dot = 0.0;
  double sx = 0.0, sy = 0.0, sx_dot = 0.0, sy_dot = 0.0;
  Eigen::Vector2d c = Eigen::Vector2d::Zero(), c_dot = Eigen::Vector2d::Zero();
  for (int k = 0; k < nm; ++k) {
    if (k > 0) {
      h += shape[k - 1];
      h_dot += shape_vel[k - 1];
    }
    const double ch = std::cos(h), sh = std::sin(h);
    dir[k] = {ch, sh};
    const Eigen::Vector2d perp(-sh, ch);
    head_dot[k] = h_dot;
    center[k] = e + 0.5 * len * dir[k];
    center_dot[k] = e_dot + 0.5 * len * h_dot * perp;
    e += len * dir[k];
    e_dot += len * h_dot * perp;
    sx += ch;
    sy += sh;
    sx_dot -= sh * h_dot;
    sy_dot += ch * h_dot;
    c += center[k];
    c_dot += center_dot[k];
  }
  c /= nm;
  c_dot /= nm;
  const double norm2 = sx * sx + sy * sy;
  if (std::sqrt(norm2) < kDegenerateAxisNorm)
    throw DegenerateAxisError("module headings cancel; mean body axis undefined");
  const double axis = std::atan2(sy, sx);
  const double axis_dot = (sx * sy_dot - sy * sx_dot) / norm2;
  const double ca = std::cos(axis), sa = std::sin(axis);
  auto to_body = [&](const Eigen::Vector2d& p) {
    return Eigen::Vector2d(ca * p.x() + sa * p.y(), -sa * p.x() + ca * p.y());
  };

  BodyPoints out;
  out.position.reserve(nm * offsets.size());
  out.velocity.reserve(nm * offsets.size());
  out.module.reserve(nm * offsets.size());
  for (int k = 0; k < nm; ++k) {
    const Eigen::Vector2d perp(-dir[k].y(), dir[k].x());
    for (double s : offsets) {
      const Eigen::Vector2d q = to_body(center[k] + s * dir[k] - c);
      const Eigen::Vector2d p_dot = center_dot[k] + s * head_dot[k] * perp - c_dot;
      out.position.push_back(q);
      out.velocity.push_back(to_body(p_dot) - axis_dot * Eigen::Vector2d(-q.y(), q.x()));
      out.module.push_back(k);
    }
  }
  return out;
}

/// Offsets of `per_module` points along a module centerline, measured from
/// the module center: midpoints of equal sub-segments.
inline std::vector<double> segment_midpoints(const RobotModel& robot, int per_module) {
  std::vector<double> s(per_module);
  for (int m = 0; m < per_module; ++m)
    s[m] = robot.module_length * ((m + 0.5) / per_module - 0.5);
  return s;
}

/// Ground contact points, each carrying an equal share of the robot weight.
struct ContactSet {
  std::vector<Eigen::Vector2d> position;
  std::vector<Eigen::Vector2d> velocity;
  std::vector<double> weight;  // N
  double total_weight = 0.0;
  double body_length = 0.0;

  std::size_t size() const { return position.size(); }
};

inline ContactSet contact_set(const RobotModel& robot, const ShapeState& shape,
                              const std::vector<double>& shape_vel, const FrictionModel& fm) {
  const int per = fm.contact_points_per_module;
  BodyPoints pts = body_points(robot, shape, shape_vel, segment_midpoints(robot, per));
  ContactSet cs;
  cs.position = std::move(pts.position);
  cs.velocity = std::move(pts.velocity);
  cs.weight.assign(cs.position.size(), robot.module_mass * kGravity / per);
  cs.total_weight = robot.module_mass * kGravity * robot.n_modules();
  cs.body_length = robot.body_length();
  return cs;
}

/// Linearized penalty contact acting on a body point along a fixed normal:
///   F = (preload - damping * (normal . v)) * normal
/// where v is the point's total velocity. With damping = stiffness * dt this
/// is the implicit-Euler update of a penalty spring over one step, which
/// keeps the force balance solvable for any preload.
struct SpringContact {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();        // body frame
  Eigen::Vector2d shape_velocity = Eigen::Vector2d::Zero();  // body frame
  Eigen::Vector2d normal = Eigen::Vector2d::UnitX();         // body frame, unit
  double preload = 0.0;  // N
  double damping = 0.0;  // N s/m
};

struct ExternalLoad {
  std::vector<SpringContact> springs;

  bool empty() const { return springs.empty(); }
};

inline Eigen::Vector2d spring_velocity(const SpringContact& c, const BodyVelocity& xi) {
  return {xi.vx - xi.wz * c.position.y() + c.shape_velocity.x(),
          xi.vy + xi.wz * c.position.x() + c.shape_velocity.y()};
}

/// Velocity of a contact point under body twist xi plus its shape velocity.
inline Eigen::Vector2d point_velocity(const ContactSet& cs, std::size_t j, const BodyVelocity& xi) {
  const Eigen::Vector2d& p = cs.position[j];
  return {xi.vx - xi.wz * p.y() + cs.velocity[j].x(), xi.vy + xi.wz * p.x() + cs.velocity[j].y()};
}

inline Wrench net_wrench(const ContactSet& cs, const BodyVelocity& xi, const FrictionModel& fm,
                         const ExternalLoad* load = nullptr) {
  Wrench w;
  for (std::size_t j = 0; j < cs.size(); ++j) {
    const Eigen::Vector2d f = friction_force(point_velocity(cs, j, xi), cs.weight[j], fm);
    w.fx += f.x();
    w.fy += f.y();
    w.tz += cs.position[j].x() * f.y() - cs.position[j].y() * f.x();
  }
  if (load) {
    for (const SpringContact& c : load->springs) {
      const Eigen::Vector2d f =
          (c.preload - c.damping * c.normal.dot(spring_velocity(c, xi))) * c.normal;
      w.fx += f.x();
      w.fy += f.y();
      w.tz += c.position.x() * f.y() - c.position.y() * f.x();
    }
  }
  return w;
}

inline Wrench net_wrench(const RobotModel& robot, const ShapeState& shape,
                         const std::vector<double>& shape_vel, const BodyVelocity& xi,
                         const FrictionModel& fm) {
  return net_wrench(contact_set(robot, shape, shape_vel, fm), xi, fm);
}

struct SolverOptions {
  int max_iters = 200;
  /// Force tolerance as a fraction of mu * total weight; the torque
  /// tolerance additionally scales with body length.
  double rel_tol = 1e-9;
  double backtrack = 0.5;
};

/// Damped Newton solve for the twist that zeroes the net wrench.
///
/// The friction wrench is minus the gradient of the convex dissipation
/// sum_j mu W_j sqrt(|v_j|^2 + eps^2), so the root is its unique minimizer
/// and Newton steps are backtracked by `backtrack` until the dissipation (or
/// the residual) decreases. The previous solution warm-starts the next solve;
/// if that stalls, the solve restarts from a heavily smoothed law and
/// tightens the regularization by decades. One instance per thread.
class BodyVelocitySolver {
 public:
  explicit BodyVelocitySolver(FrictionModel fm, SolverOptions opts = {})
      : fm_(fm), opts_(opts) {
    fm_.validate();
  }

  const FrictionModel& friction() const { return fm_; }
  const BodyVelocity& last() const { return last_; }
  int last_iterations() const { return iterations_; }
  void reset(const BodyVelocity& guess = {}) { last_ = guess; }

  /// True when every wrench component is inside the solve tolerance.
  bool converged(const ContactSet& cs, const Wrench& w) const {
    return converged(cs, w, opts_.rel_tol);
  }

  BodyVelocity solve(const ContactSet& cs, const ExternalLoad* external = nullptr) {
    iterations_ = 0;
    Eigen::Vector3d xi = last_.vec();
    if (!newton(cs, external, fm_.epsilon, opts_.rel_tol, kWarmIters, xi)) {
      // Continuation: start from a nearly viscous law and sharpen it.
      xi = last_.vec();
      for (double eps = fm_.epsilon * kContinuationSpan; eps > fm_.epsilon * 1.5; eps *= 0.1)
        newton(cs, external, eps, kContinuationTol, opts_.max_iters, xi);
      if (!newton(cs, external, fm_.epsilon, opts_.rel_tol, opts_.max_iters, xi)) {
        const Wrench w = net_wrench(cs, BodyVelocity::from(xi), fm_, external);
        throw SolverError("body velocity solve did not converge", residual(cs, w));
      }
    }
    last_ = BodyVelocity::from(xi);
    return last_;
  }

  /// Largest wrench component relative to its tolerance scale.
  double residual(const ContactSet& cs, const Wrench& w) const {
    const double scale = fm_.mu * cs.total_weight;
    return std::max({std::abs(w.fx) / scale, std::abs(w.fy) / scale,
                     std::abs(w.tz) / (scale * cs.body_length)});
  }

 private:
  static constexpr int kWarmIters = 40;
  static constexpr double kContinuationSpan = 1e4;
  static constexpr double kContinuationTol = 1e-6;

  bool converged(const ContactSet& cs, const Wrench& w, double rel_tol) const {
    const double ftol = rel_tol * fm_.mu * cs.total_weight;
    return std::abs(w.fx) < ftol && std::abs(w.fy) < ftol && std::abs(w.tz) < ftol * cs.body_length;
  }

  // Damped Newton at regularization eps. Returns false when the iteration
  // budget (shared across one solve) runs out or the line search stalls.
  bool newton(const ContactSet& cs, const ExternalLoad* ext, double eps, double rel_tol, int budget,
              Eigen::Vector3d& xi) {
    Wrench w = net_wrench_eps(cs, xi, ext, eps);
    double d = dissipation(cs, xi, ext, eps);
    for (int it = 0; !converged(cs, w, rel_tol); ++it) {
      if (it >= budget || iterations_ >= opts_.max_iters) return false;
      ++iterations_;
      const Eigen::Vector3d g = -w.vec();
      const Eigen::Vector3d step = -hessian(cs, xi, ext, eps).ldlt().solve(g);
      double alpha = 1.0;
      bool accepted = false;
      for (int k = 0; k < 60; ++k, alpha *= opts_.backtrack) {
        const Eigen::Vector3d trial = xi + alpha * step;
        const double d_trial = dissipation(cs, trial, ext, eps);
        const Wrench w_trial = net_wrench_eps(cs, trial, ext, eps);
        const bool armijo = d_trial <= d + 1e-4 * alpha * g.dot(step);
        // Near the minimum the dissipation change drowns in rounding.
        const bool flat = std::abs(d_trial - d) <= 1e-13 * std::abs(d) &&
                          w_trial.vec().norm() < w.vec().norm();
        if (armijo || flat) {
          xi = trial;
          d = d_trial;
          w = w_trial;
          accepted = true;
          break;
        }
      }
      if (!accepted) return false;
    }
    return true;
  }

  Wrench net_wrench_eps(const ContactSet& cs, const Eigen::Vector3d& xi, const ExternalLoad* ext,
                        double eps) const {
    FrictionModel fm = fm_;
    fm.epsilon = eps;
    return net_wrench(cs, BodyVelocity::from(xi), fm, ext);
  }

  // Convex potential whose negative gradient is the net wrench.
  double dissipation(const ContactSet& cs, const Eigen::Vector3d& xi, const ExternalLoad* ext,
                     double eps) const {
    const BodyVelocity b = BodyVelocity::from(xi);
    double d = 0.0;
    for (std::size_t j = 0; j < cs.size(); ++j) {
      const Eigen::Vector2d v = point_velocity(cs, j, b);
      d += fm_.mu * cs.weight[j] * std::sqrt(v.squaredNorm() + eps * eps);
    }
    if (ext) {
      for (const SpringContact& c : ext->springs) {
        const double vn = c.normal.dot(spring_velocity(c, b));
        d += 0.5 * c.damping * vn * vn - c.preload * vn;
      }
    }
    return d;
  }

  Eigen::Matrix3d hessian(const ContactSet& cs, const Eigen::Vector3d& xi, const ExternalLoad* ext,
                          double eps) const {
    const BodyVelocity b = BodyVelocity::from(xi);
    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    const double eps2 = eps * eps;
    for (std::size_t j = 0; j < cs.size(); ++j) {
      const Eigen::Vector2d v = point_velocity(cs, j, b);
      const double s2 = v.squaredNorm() + eps2;
      const double s = std::sqrt(s2);
      const Eigen::Matrix2d k =
          (fm_.mu * cs.weight[j] / s) * (Eigen::Matrix2d::Identity() - v * v.transpose() / s2);
      Eigen::Matrix<double, 2, 3> g;
      g << 1.0, 0.0, -cs.position[j].y(), 0.0, 1.0, cs.position[j].x();
      h.noalias() += g.transpose() * k * g;
    }
    if (ext) {
      for (const SpringContact& c : ext->springs) {
        const Eigen::Vector3d gn(c.normal.x(), c.normal.y(),
                                 c.position.x() * c.normal.y() - c.position.y() * c.normal.x());
        h.noalias() += c.damping * gn * gn.transpose();
      }
    }
    return h;
  }

  FrictionModel fm_;
  SolverOptions opts_;
  BodyVelocity last_;
  int iterations_ = 0;
};

inline BodyVelocity solve_body_velocity(const RobotModel& robot, const ShapeState& shape,
                                        const std::vector<double>& shape_vel,
                                        const FrictionModel& fm, SolverOptions opts = {}) {
  BodyVelocitySolver solver(fm, opts);
  return solver.solve(contact_set(robot, shape, shape_vel, fm));
}

/// World-frame body poses sampled at step boundaries.
struct Trajectory {
  std::vector<double> times;
  std::vector<Pose2> poses;
  std::vector<ShapeState> shapes;
  std::vector<double> body_axis;  // unwrapped, rad
  double period = 0.0;
  int steps_per_cycle = 0;

  std::size_t size() const { return times.size(); }
  int n_cycles() const {
    return steps_per_cycle > 0 ? static_cast<int>((times.size() - 1) / steps_per_cycle) : 0;
  }
};

/// Shape and shape velocity at time t.
using ShapeSource = std::function<std::pair<ShapeState, std::vector<double>>(double)>;

inline ShapeSource gait_source(const GaitParams& gait, const RobotModel& robot) {
  return [gait, robot](double t) {
    return std::make_pair(shape_at(gait, robot, t), shape_velocity(gait, robot, t));
  };
}

inline constexpr int kDefaultStepsPerCycle = 256;

/// Midpoint integration of the body pose: the twist is solved at each
/// step's mid-time shape and applied through the SE(2) exponential.
inline Trajectory integrate_shape_source(const RobotModel& robot, const ShapeSource& source,
                                         double period, const FrictionModel& fm,
                                         int steps_per_cycle, int n_cycles, Pose2 start = {},
                                         double t0 = 0.0) {
  robot.validate();
  if (steps_per_cycle < 64) throw ParameterError("steps_per_cycle must be >= 64");
  if (n_cycles < 1) throw ParameterError("n_cycles must be >= 1");
  if (!(period > 0)) throw ParameterError("period must be > 0");
  const long steps = static_cast<long>(steps_per_cycle) * n_cycles;
  const double dt = period / steps_per_cycle;

  Trajectory traj;
  traj.period = period;
  traj.steps_per_cycle = steps_per_cycle;
  traj.times.reserve(steps + 1);
  traj.poses.reserve(steps + 1);
  traj.shapes.reserve(steps + 1);
  traj.body_axis.reserve(steps + 1);

  BodyVelocitySolver solver(fm);
  Pose2 pose = start;
  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.poses.push_back(pose);
    traj.shapes.push_back(source(t).first);
    // The body frame is the mean-axis frame, so its world heading is the axis.
    traj.body_axis.push_back(pose.heading);
  };
  record(t0);
  for (long s = 0; s < steps; ++s) {
    const double t = t0 + s * dt;
    const auto [shape, shape_vel] = source(t + 0.5 * dt);
    BodyVelocity xi;
    try {
      xi = solver.solve(contact_set(robot, shape, shape_vel, fm));
    } catch (const SolverError& e) {
      throw SolverError(std::string(e.what()) + " at step " + std::to_string(s), e.residual(), s);
    }
    pose = pose.advanced(xi.vx, xi.vy, xi.wz, dt);
    record(t0 + (s + 1) * dt);
  }
  return traj;
}

inline Trajectory integrate_cycle(const RobotModel& robot, const GaitParams& gait,
                                  const FrictionModel& fm,
                                  int steps_per_cycle = kDefaultStepsPerCycle, int n_cycles = 1,
                                  Pose2 start = {}) {
  gait.validate();
  return integrate_shape_source(robot, gait_source(gait, robot), gait.period(), fm,
                                steps_per_cycle, n_cycles, start);
}

/// Body-axis rotation per cycle, averaged over cycles. The first cycle is
/// dropped as transient when there are two or more.
inline double angular_displacement(const Trajectory& traj) {
  const int cycles = traj.n_cycles();
  if (cycles < 1 || traj.body_axis.size() != traj.times.size())
    throw ParameterError("trajectory shorter than one cycle");
  const int first = cycles >= 2 ? 1 : 0;
  const std::size_t a = static_cast<std::size_t>(first) * traj.steps_per_cycle;
  const std::size_t b = static_cast<std::size_t>(cycles) * traj.steps_per_cycle;
  return (traj.body_axis[b] - traj.body_axis[a]) / (cycles - first);
}

/// CSV: t,x,y,theta_deg,axis_deg,joint_0_deg..; seconds, meters and degrees.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "# omegagait-csv v1\n";
  os << "t,x,y,theta_deg,axis_deg";
  const std::size_t n = traj.shapes.empty() ? 0 : traj.shapes.front().size();
  for (std::size_t i = 0; i < n; ++i) os << ",joint_" << i << "_deg";
  os << '\n';
  const auto old_prec = os.precision(17);
  for (std::size_t r = 0; r < traj.size(); ++r) {
    const Pose2& p = traj.poses[r];
    os << traj.times[r] << ',' << p.x << ',' << p.y << ',' << rad2deg(wrap_angle(p.heading)) << ','
       << rad2deg(traj.body_axis[r]);
    for (double a : traj.shapes[r].angles) os << ',' << rad2deg(a);
    os << '\n';
  }
  os.precision(old_prec);
}

}  // namespace omegagait
