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

// Compliant omega turn. The two wave amplitudes follow spring-mass-damper
// dynamics driven by the joint torques that peg contacts exert on the body:
//   M A'' + B A' + K (A - A0) = J tau_ext
// where J = d theta / d A. Contacts are penalty springs between pegs and the
// thick module centerlines; during the run their forces also enter the
// quasi-static force balance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "omegagait/dynamics.hpp"
#include "omegagait/errors.hpp"
#include "omegagait/gait.hpp"
#include "omegagait/model.hpp"

namespace omegagait {

struct AdmittanceState {
  Eigen::Vector2d amp = Eigen::Vector2d::Zero();       // [A_f, A_o], rad
  Eigen::Vector2d amp_rate = Eigen::Vector2d::Zero();  // rad/s
  Eigen::Matrix2d M = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d B = 8.0 * Eigen::Matrix2d::Identity();
  Eigen::Matrix2d K = 8.0 * Eigen::Matrix2d::Identity();
  Eigen::Vector2d A0 = Eigen::Vector2d::Constant(deg2rad(45.0));
  double amp_min = 0.0;
  double amp_max = kPi / 2;

  /// Defaults at rest on the nominal amplitude.
  static AdmittanceState at_rest(double joint_limit) {
    AdmittanceState s;
    s.amp_max = joint_limit;
    s.amp = s.A0;
    s.validate();
    return s;
  }

  void validate() const {
    auto spd = [](const Eigen::Matrix2d& m, const char* name) {
      if (!m.isApprox(m.transpose(), 1e-12) || Eigen::LLT<Eigen::Matrix2d>(m).info() != Eigen::Success)
        throw ParameterError(std::string(name) + " must be symmetric positive definite");
    };
    spd(M, "M");
    spd(B, "B");
    spd(K, "K");
    if (!(amp_min <= amp_max)) throw ParameterError("amplitude bounds are inverted");
    if (!amp.allFinite() || !amp_rate.allFinite() || !A0.allFinite())
      throw ParameterError("admittance state must be finite");
  }

  /// 1/2 A'^T M A' + 1/2 (A - A0)^T K (A - A0)
  double energy() const {
    const Eigen::Vector2d d = amp - A0;
    return 0.5 * amp_rate.dot(M * amp_rate) + 0.5 * d.dot(K * d);
  }
};

/// Semi-implicit Euler step of the admittance law; amplitudes leaving
/// [amp_min, amp_max] are clamped and their rate zeroed.
inline AdmittanceState admittance_step(AdmittanceState s, const Eigen::VectorXd& tau_ext,
                                       const Eigen::MatrixXd& J, double dt) {
  if (!(dt > 0)) throw ParameterError("admittance dt must be > 0");
  if (J.rows() != 2 || J.cols() != tau_ext.size())
    throw ParameterError("jacobian and torque dimensions disagree");
  const Eigen::Vector2d drive = J * tau_ext;
  const Eigen::Vector2d acc =
      s.M.llt().solve(drive - s.B * s.amp_rate - s.K * (s.amp - s.A0));
  s.amp_rate += acc * dt;
  s.amp += s.amp_rate * dt;
  for (int k = 0; k < 2; ++k) {
    if (s.amp[k] < s.amp_min) {
      s.amp[k] = s.amp_min;
      s.amp_rate[k] = 0.0;
    } else if (s.amp[k] > s.amp_max) {
      s.amp[k] = s.amp_max;
      s.amp_rate[k] = 0.0;
    }
  }
  return s;
}

/// d theta_i / d A for both waves at time t (2 x N).
inline Eigen::MatrixXd amplitude_jacobian(const GaitParams& gait, const RobotModel& robot,
                                          double t) {
  const int n = robot.n_joints;
  Eigen::MatrixXd J(2, n);
  const double tf = gait.forward.phase(t), to = gait.omega.phase(t);
  for (int i = 0; i < n; ++i) {
    J(0, i) = std::sin(tf + kTwoPi * gait.forward.spatial_freq * i / n);
    J(1, i) = std::sin(to + kTwoPi * gait.omega.spatial_freq * i / n);
  }
  return J;
}

/// Hexagonal peg lattice. Lengths given in body lengths are converted with
/// the robot's body length when the board is built.
struct PegBoard {
  double spacing_bl = 0.3;
  double peg_radius_bl = 0.02;
  double stiffness = 500.0;  // N/m
  double extent_bl = 3.0;    // half-width of the square arena
  double body_length = 0.0;  // m
  std::vector<Eigen::Vector2d> pegs;  // world frame, m

  double spacing() const { return spacing_bl * body_length; }
  double peg_radius() const { return peg_radius_bl * body_length; }
  bool empty() const { return pegs.empty(); }

  static PegBoard hexagonal(const RobotModel& robot, double spacing_bl,
                            double peg_radius_bl = 0.02, double stiffness = 500.0,
                            double extent_bl = 3.0) {
    if (!(spacing_bl > 0)) throw ParameterError("peg spacing must be > 0");
    if (!(peg_radius_bl > 0)) throw ParameterError("peg radius must be > 0");
    if (!(stiffness > 0)) throw ParameterError("contact stiffness must be > 0");
    if (!(extent_bl > 0)) throw ParameterError("arena extent must be > 0");
    PegBoard b{spacing_bl, peg_radius_bl, stiffness, extent_bl, robot.body_length(), {}};
    const double s = b.spacing(), half = extent_bl * b.body_length;
    const double row = s * std::sqrt(3.0) / 2;
    const int rows = static_cast<int>(std::floor(half / row));
    const int cols = static_cast<int>(std::floor(half / s)) + 1;
    for (int r = -rows; r <= rows; ++r) {
      const double shift = (r % 2 != 0) ? 0.5 * s : 0.0;
      for (int c = -cols; c <= cols; ++c) {
        const Eigen::Vector2d p(c * s + shift, r * row);
        if (std::abs(p.x()) <= half && std::abs(p.y()) <= half) b.pegs.push_back(p);
      }
    }
    return b;
  }

  /// No pegs: compliant and open-loop runs coincide.
  static PegBoard none(const RobotModel& robot) {
    PegBoard b;
    b.body_length = robot.body_length();
    return b;
  }
};

/// One peg pressing on one module. Geometry is expressed in whatever frame
/// the backbone and pegs were given in.
struct PegContact {
  int module = 0;
  double offset = 0.0;  // along the module from its center, m
  Eigen::Vector2d point = Eigen::Vector2d::Zero();   // closest centerline point
  Eigen::Vector2d normal = Eigen::Vector2d::Zero();  // from the peg toward the body
  double penetration = 0.0;                          // m
  Eigen::Vector2d force = Eigen::Vector2d::Zero();   // on the body, N
};

/// Each module is a segment of half-thickness module_width / 2; a peg touches
/// it when the distance from the peg center to the segment is below
/// peg radius + half width. The force acts at the closest centerline point.
inline std::vector<PegContact> detect_contacts(const Backbone& bb,
                                               const std::vector<Eigen::Vector2d>& pegs,
                                               double peg_radius, double stiffness) {
  std::vector<PegContact> out;
  if (pegs.empty()) return out;
  const auto ends = bb.joint_points();
  const double reach = peg_radius + 0.5 * bb.module_width;
  const double len = bb.module_length;
  for (std::size_t k = 0; k < bb.n_modules(); ++k) {
    const Eigen::Vector2d a = ends[k], b = ends[k + 1];
    const Eigen::Vector2d mid = 0.5 * (a + b), dir = (b - a) / len;
    for (const Eigen::Vector2d& q : pegs) {
      if ((q - mid).squaredNorm() > (0.5 * len + reach) * (0.5 * len + reach)) continue;
      const double u = std::clamp((q - a).dot(dir), 0.0, len);
      const Eigen::Vector2d c = a + u * dir;
      const double d = (c - q).norm();
      if (d >= reach) continue;
      PegContact pc;
      pc.module = static_cast<int>(k);
      pc.offset = u - 0.5 * len;
      pc.point = c;
      // A peg center on the centerline pushes along the module normal.
      pc.normal = d > 1e-12 ? Eigen::Vector2d((c - q) / d) : Eigen::Vector2d(-dir.y(), dir.x());
      pc.penetration = reach - d;
      pc.force = stiffness * pc.penetration * pc.normal;
      out.push_back(pc);
    }
  }
  return out;
}

/// Torque at joint j is the moment about that joint of every contact force
/// on the modules distal to it (module index > j).
inline Eigen::VectorXd joint_torques(const Backbone& bb, const std::vector<PegContact>& contacts) {
  const int n = static_cast<int>(bb.n_modules()) - 1;
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(n);
  const auto ends = bb.joint_points();
  for (const PegContact& c : contacts)
    for (int j = 0; j < c.module; ++j) {
      const Eigen::Vector2d r = c.point - ends[j + 1];
      tau[j] += r.x() * c.force.y() - r.y() * c.force.x();
    }
  return tau;
}

inline Eigen::VectorXd contact_torques(const RobotModel& robot, const Backbone& world,
                                       const PegBoard& board) {
  if (static_cast<int>(world.n_modules()) != robot.n_modules())
    throw ParameterError("backbone does not match the robot");
  return joint_torques(world, detect_contacts(world, board.pegs, board.peg_radius(), board.stiffness));
}

/// Contact potential sum 1/2 k p^2 over all contacts.
inline double contact_energy(const std::vector<PegContact>& contacts, double stiffness) {
  double e = 0.0;
  for (const PegContact& c : contacts) e += 0.5 * stiffness * c.penetration * c.penetration;
  return e;
}

struct ComplianceSettings {
  int steps_per_cycle = kDefaultStepsPerCycle;
  int cycles = 4;
  bool compliant = true;
  /// Joint torques (N m) are multiplied by this before entering the law.
  double torque_scale = 1.0;
  AdmittanceState admittance = AdmittanceState::at_rest(kPi / 2);
};

struct AmplitudeSample {
  double t = 0.0;
  double a_f = 0.0;
  double a_o = 0.0;
  int n_contacts = 0;
  double net_torque_norm = 0.0;
};

struct CompliantRun {
  Trajectory trajectory;
  std::vector<AmplitudeSample> history;
};

namespace detail {

// Joint angles and rates with each wave's amplitude profile shifted by the
// admittance deviation: A_w(tau) + (amp_w - A0_w). For constant profiles equal
// to A0 this is exactly the commanded amplitude amp.
inline std::pair<ShapeState, std::vector<double>> compliant_shape(const GaitParams& gait,
                                                                  const RobotModel& robot,
                                                                  const AdmittanceState& s,
                                                                  double t) {
  const int n = robot.n_joints;
  ShapeState shape = ShapeState::zeros(n);
  std::vector<double> vel(n, 0.0);
  const WaveSpec* waves[2] = {&gait.forward, &gait.omega};
  const AmplitudeProfile* profiles[2] = {&gait.forward_amp, &gait.omega_amp};
  for (int w = 0; w < 2; ++w) {
    const double tau = waves[w]->phase(t), rate = waves[w]->phase_rate();
    const double delta = s.amp[w] - s.A0[w];
    const double a = profiles[w]->value(tau) + delta;
    const double a_dot = profiles[w]->slope(tau) * rate + s.amp_rate[w];
    for (int i = 0; i < n; ++i) {
      const double arg = tau + kTwoPi * waves[w]->spatial_freq * i / n;
      shape[i] += a * std::sin(arg);
      vel[i] += a_dot * std::sin(arg) + a * rate * std::cos(arg);
    }
  }
  return {shape, vel};
}

inline std::vector<Eigen::Vector2d> pegs_in_frame(const PegBoard& board, const Pose2& pose) {
  std::vector<Eigen::Vector2d> out;
  const double c = std::cos(pose.heading), s = std::sin(pose.heading);
  const double reach = 0.6 * board.body_length + board.peg_radius();
  for (const Eigen::Vector2d& p : board.pegs) {
    const double dx = p.x() - pose.x, dy = p.y() - pose.y;
    if (dx * dx + dy * dy > reach * reach) continue;
    out.emplace_back(c * dx + s * dy, -s * dx + c * dy);
  }
  return out;
}

}  // namespace detail

/// Runs the gait with peg contacts. Each control step measures contact
/// torques on the current shape, advances the admittance state (when
/// compliant), then solves the force balance with friction plus the peg
/// springs at the step's mid-time shape.
inline CompliantRun simulate_compliant_turn(const RobotModel& robot, const GaitParams& gait,
                                            const PegBoard& board, const FrictionModel& fm,
                                            const ComplianceSettings& settings,
                                            Pose2 start = {}) {
  robot.validate();
  gait.validate();
  settings.admittance.validate();
  if (settings.steps_per_cycle < 64) throw ParameterError("steps_per_cycle must be >= 64");
  if (settings.cycles < 1) throw ParameterError("cycles must be >= 1");
  const long steps = static_cast<long>(settings.steps_per_cycle) * settings.cycles;
  const double dt = gait.period() / settings.steps_per_cycle;
  const double radius = board.peg_radius();

  CompliantRun run;
  Trajectory& traj = run.trajectory;
  traj.period = gait.period();
  traj.steps_per_cycle = settings.steps_per_cycle;

  AdmittanceState state = settings.admittance;
  BodyVelocitySolver solver(fm);
  Pose2 pose = start;

  auto record = [&](double t, int n_contacts, double torque_norm) {
    traj.times.push_back(t);
    traj.poses.push_back(pose);
    traj.shapes.push_back(detail::compliant_shape(gait, robot, state, t).first);
    traj.body_axis.push_back(pose.heading);
    run.history.push_back({t, state.amp[0], state.amp[1], n_contacts, torque_norm});
  };

  for (long s = 0; s <= steps; ++s) {
    const double t = s * dt;
    // Measured torques on the current shape.
    const auto shape = detail::compliant_shape(gait, robot, state, t).first;
    const Backbone bb = backbone_from_shape(robot, shape);
    const auto local_pegs = detail::pegs_in_frame(board, pose);
    const auto contacts = detect_contacts(bb, local_pegs, radius, board.stiffness);
    const Eigen::VectorXd tau = joint_torques(bb, contacts);
    record(t, static_cast<int>(contacts.size()), tau.norm());
    if (s == steps) break;
    if (settings.compliant)
      state = admittance_step(state, settings.torque_scale * tau,
                              amplitude_jacobian(gait, robot, t), dt);

    // Force balance at mid-step.
    const double tm = t + 0.5 * dt;
    const auto [shape_m, vel_m] = detail::compliant_shape(gait, robot, state, tm);
    const ContactSet cs = contact_set(robot, shape_m, vel_m, fm);
    ExternalLoad load;
    if (!local_pegs.empty()) {
      const Backbone bb_m = backbone_from_shape(robot, shape_m);
      const auto touching = detect_contacts(bb_m, local_pegs, radius, board.stiffness);
      if (!touching.empty()) {
        const double half = 0.5 * robot.module_length;
        const BodyPoints ends = body_points(robot, shape_m, vel_m, {-half, half});
        for (const PegContact& c : touching) {
          const double w = (c.offset + half) / robot.module_length;
          const std::size_t a = 2 * c.module, b = a + 1;
          SpringContact sc;
          sc.position = c.point;
          sc.shape_velocity = (1 - w) * ends.velocity[a] + w * ends.velocity[b];
          sc.normal = c.normal;
          sc.preload = board.stiffness * c.penetration;
          sc.damping = board.stiffness * dt;
          load.springs.push_back(sc);
        }
      }
    }
    BodyVelocity xi;
    try {
      xi = solver.solve(cs, load.empty() ? nullptr : &load);
    } catch (const SolverError& e) {
      throw SolverError(std::string(e.what()) + " at step " + std::to_string(s), e.residual(), s);
    }
    pose = pose.advanced(xi.vx, xi.vy, xi.wz, dt);
  }
  return run;
}

/// Random start pose inside one lattice cell around the origin whose initial
/// shape touches no peg. Deterministic for a given seed.
inline Pose2 random_start_pose(const RobotModel& robot, const GaitParams& gait,
                               const PegBoard& board, const AdmittanceState& admittance,
                               std::uint64_t seed, int max_tries = 100000) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double s = board.empty() ? 0.0 : board.spacing();
  const Backbone bb =
      backbone_from_shape(robot, detail::compliant_shape(gait, robot, admittance, 0.0).first);
  for (int k = 0; k < max_tries; ++k) {
    const Pose2 pose{s * u01(rng), s * std::sqrt(3.0) * u01(rng), kTwoPi * u01(rng)};
    if (detect_contacts(bb, detail::pegs_in_frame(board, pose), board.peg_radius(), board.stiffness)
            .empty())
      return pose;
  }
  throw ParameterError("no contact-free start pose found");
}

/// CSV: t,A_f_deg,A_o_deg,n_contacts,net_torque_norm.
inline void write_amplitude_csv(std::ostream& os, const std::vector<AmplitudeSample>& history) {
  os << "# omegagait-csv v1\n";
  os << "t,A_f_deg,A_o_deg,n_contacts,net_torque_norm\n";
  const auto old = os.precision(17);
  for (const AmplitudeSample& h : history)
    os << h.t << ',' << rad2deg(h.a_f) << ',' << rad2deg(h.a_o) << ',' << h.n_contacts << ','
       << h.net_torque_norm << '\n';
  os.precision(old);
}

}  // namespace omegagait
