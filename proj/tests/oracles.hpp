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

// Independent reference computations used by the unit tests and the
// acceptance binary. Nothing here calls the solver, the SAT predicate or the
// admittance integrator it is meant to check.

#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "omegagait/dynamics.hpp"
#include "omegagait/model.hpp"

namespace oracle {

namespace og = omegagait;

/// Total regularized Coulomb dissipation at body twist (vx, vy, wz).
inline double dissipation(const og::ContactSet& cs, const Eigen::Vector3d& xi, const og::FrictionModel& fm) {
  double d = 0.0;
  for (std::size_t j = 0; j < cs.size(); ++j) {
    const Eigen::Vector2d& p = cs.position[j];
    const Eigen::Vector2d v(xi.x() - xi.z() * p.y() + cs.velocity[j].x(),
                            xi.y() + xi.z() * p.x() + cs.velocity[j].y());
    d += fm.mu * cs.weight[j] * std::sqrt(v.squaredNorm() + fm.epsilon * fm.epsilon);
  }
  return d;
}

/// Brute-force twist: minimizes the dissipation on a 3-D lattice that is
/// recentred on its best node and contracted until it is finer than `tol`.
/// The dissipation is convex, so the lattice minimum tracks the true one.
inline og::BodyVelocity brute_force_twist(const og::ContactSet& cs, const og::FrictionModel& fm,
                                          double tol = 1e-8) {
  double vmax = 1e-6;
  for (const auto& v : cs.velocity) vmax = std::max(vmax, v.norm());
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d half(2 * vmax, 2 * vmax, 8 * vmax / cs.body_length);
  constexpr int kNodes = 11;
  while (half.maxCoeff() > tol) {
    Eigen::Vector3d best = center;
    double best_d = dissipation(cs, center, fm);
    for (int a = 0; a < kNodes; ++a)
      for (int b = 0; b < kNodes; ++b)
        for (int c = 0; c < kNodes; ++c) {
          const Eigen::Vector3d u(2.0 * a / (kNodes - 1) - 1, 2.0 * b / (kNodes - 1) - 1,
                                  2.0 * c / (kNodes - 1) - 1);
          const Eigen::Vector3d x = center + half.cwiseProduct(u);
          const double d = dissipation(cs, x, fm);
          if (d < best_d) {
            best_d = d;
            best = x;
          }
        }
    // Only contract once the best node is interior; otherwise slide the box.
    const Eigen::Vector3d rel = (best - center).cwiseQuotient(half).cwiseAbs();
    center = best;
    if (rel.maxCoeff() < 0.999) half *= 0.6;
  }
  return {center.x(), center.y(), center.z()};
}

/// Self-collision by point sampling: a `step`-spaced lattice over every
/// module rectangle (grown outward by `margin`, negative to shrink) is tested
/// against every module at least two links away, grown by the same margin.
inline bool sampled_collision(const og::RobotModel& robot, const og::ShapeState& shape, double margin,
                              double step = 1e-3) {
  const og::Backbone bb = og::chain_from_shape(robot, shape);
  const double hl = 0.5 * robot.module_length + margin, hw = 0.5 * robot.module_width + margin;
  const int nl = static_cast<int>(std::ceil(2 * hl / step)), nw = static_cast<int>(std::ceil(2 * hw / step));
  const auto& mods = bb.module_poses;
  auto inside = [&](const og::Pose2& m, const Eigen::Vector2d& p) {
    const double c = std::cos(m.heading), s = std::sin(m.heading);
    const double dx = p.x() - m.x, dy = p.y() - m.y;
    return std::abs(c * dx + s * dy) <= hl && std::abs(-s * dx + c * dy) <= hw;
  };
  for (std::size_t a = 0; a < mods.size(); ++a)
    for (std::size_t b = a + 2; b < mods.size(); ++b) {
      if ((mods[a].position() - mods[b].position()).norm() > 2 * std::hypot(hl, hw)) continue;
      for (int i = 0; i <= nl; ++i)
        for (int j = 0; j <= nw; ++j) {
          const Eigen::Vector2d local(-hl + 2 * hl * i / nl, -hw + 2 * hw * j / nw);
          if (inside(mods[b], mods[a].transform(local))) return true;
        }
    }
  return false;
}

enum class CollisionTruth { kFree, kColliding, kBoundary };

/// Classifies a shape with a geometric band of half-width `band`: definitely
/// colliding if the shrunk sampling says so, definitely free if even the
/// grown sampling finds nothing, otherwise within the boundary band.
inline CollisionTruth collision_truth(const og::RobotModel& robot, const og::ShapeState& shape,
                                      double band = 2e-3) {
  if (sampled_collision(robot, shape, -band)) return CollisionTruth::kColliding;
  if (!sampled_collision(robot, shape, band)) return CollisionTruth::kFree;
  return CollisionTruth::kBoundary;
}

/// Free response of m x'' + b x' + k x = 0 (scalar, overdamped or critical).
inline double damped_free_response(double m, double b, double k, double x0, double v0, double t) {
  const double disc = b * b - 4 * m * k;
  if (disc > 0) {
    const double r1 = (-b + std::sqrt(disc)) / (2 * m), r2 = (-b - std::sqrt(disc)) / (2 * m);
    const double c1 = (v0 - r2 * x0) / (r1 - r2);
    return c1 * std::exp(r1 * t) + (x0 - c1) * std::exp(r2 * t);
  }
  if (disc == 0) {
    const double r = -b / (2 * m);
    return (x0 + (v0 - r * x0) * t) * std::exp(r * t);
  }
  const double a = -b / (2 * m), w = std::sqrt(-disc) / (2 * m);
  return std::exp(a * t) * (x0 * std::cos(w * t) + (v0 - a * x0) / w * std::sin(w * t));
}

/// Serpenoid curve plus curvature offset, written out directly.
inline double offset_turn_angle(double amplitude, double omega, double k, double kappa, int n, double t,
                                int i) {
  return amplitude * std::sin(2 * og::kPi * omega * t + 2 * og::kPi * k * i / n) + kappa;
}

/// Random shape with every angle uniform in [-limit, limit].
inline og::ShapeState random_shape(std::mt19937_64& rng, int n, double limit) {
  std::uniform_real_distribution<double> u(-limit, limit);
  og::ShapeState s = og::ShapeState::zeros(n);
  for (double& a : s.angles) a = u(rng);
  return s;
}

inline std::vector<double> random_rates(std::mt19937_64& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace oracle
