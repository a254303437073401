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

// Two-wave joint-angle template and the reference turning gaits built on it.
//
//   theta_i(t) = A_f(tau_f) sin(tau_f + 2 pi k_f i / N)
//              + A_o(tau_o) sin(tau_o + 2 pi k_o i / N)
//
// with tau_f = 2 pi w t + forward.phase_offset and
//      tau_o = 2 pi w t + omega.phase_offset (= psi).

#include <array>
#include <cmath>
#include <vector>

#include "omegagait/errors.hpp"
#include "omegagait/model.hpp"

namespace omegagait {

inline constexpr double kDefaultTemporalFreq = 0.2;  // Hz
inline constexpr int kDefaultPathSamples = 256;

struct WaveSpec {
  double spatial_freq = 0.0;   // waves per body
  double temporal_freq = kDefaultTemporalFreq;  // Hz
  double phase_offset = 0.0;   // rad
  /// The phase stays at phase_offset instead of advancing with time. Used to
  /// express a constant curvature offset with a zero-spatial-frequency wave.
  bool phase_frozen = false;

  double phase(double t) const {
    return phase_frozen ? phase_offset : kTwoPi * temporal_freq * t + phase_offset;
  }
  double phase_rate() const { return phase_frozen ? 0.0 : kTwoPi * temporal_freq; }
};

/// Wave amplitude as a function of the wave's own phase.
///   constant: A
///   f1-form:  a (gamma + sin(tau + phi)), gamma >= 1
///   f2-form:  a (1 + sin(tau + phi))
struct AmplitudeProfile {
  enum class Kind { kConstant, kF1, kF2 };

  Kind kind = Kind::kConstant;
  double scale = 0.0;  // A for constant, a_f / a_o otherwise
  double gamma = 1.0;
  double phi = 0.0;

  static AmplitudeProfile constant(double value) { return {Kind::kConstant, value, 1.0, 0.0}; }
  static AmplitudeProfile f1(double a_f, double gamma, double phi_f) {
    if (!(gamma >= 1.0)) throw ParameterError("f1 amplitude needs gamma >= 1");
    return {Kind::kF1, a_f, gamma, phi_f};
  }
  static AmplitudeProfile f2(double a_o, double phi_o) { return {Kind::kF2, a_o, 1.0, phi_o}; }

  double value(double tau) const {
    switch (kind) {
      case Kind::kConstant: return scale;
      case Kind::kF1: return scale * (gamma + std::sin(tau + phi));
      case Kind::kF2: return scale * (1.0 + std::sin(tau + phi));
    }
    return 0.0;
  }
  /// d value / d tau
  double slope(double tau) const {
    return kind == Kind::kConstant ? 0.0 : scale * std::cos(tau + phi);
  }
  AmplitudeProfile negated() const {
    AmplitudeProfile p = *this;
    p.scale = -p.scale;
    return p;
  }
};

struct GaitParams {
  WaveSpec forward;
  AmplitudeProfile forward_amp;
  WaveSpec omega;
  AmplitudeProfile omega_amp;

  double temporal_freq() const { return forward.temporal_freq; }
  double period() const { return 1.0 / forward.temporal_freq; }
  double psi() const { return omega.phase_offset; }

  void validate() const {
    for (const WaveSpec* w : {&forward, &omega}) {
      if (!(w->temporal_freq > 0)) throw ParameterError("temporal_freq must be > 0");
      if (!(w->spatial_freq >= 0)) throw ParameterError("spatial_freq must be >= 0");
    }
    if (forward.temporal_freq != omega.temporal_freq)
      throw ParameterError("forward and omega waves must share one temporal frequency");
    if (forward_amp.kind == AmplitudeProfile::Kind::kF1 && !(forward_amp.gamma >= 1.0))
      throw ParameterError("f1 amplitude needs gamma >= 1");
  }

  /// Mirror image: every joint angle negated.
  GaitParams mirrored() const {
    GaitParams g = *this;
    g.forward_amp = forward_amp.negated();
    g.omega_amp = omega_amp.negated();
    return g;
  }
};

namespace detail {
inline double wave_term(const WaveSpec& w, const AmplitudeProfile& amp, double tau, int i, int n) {
  return amp.value(tau) * std::sin(tau + kTwoPi * w.spatial_freq * i / n);
}
inline double wave_rate(const WaveSpec& w, const AmplitudeProfile& amp, double tau, int i, int n) {
  const double arg = tau + kTwoPi * w.spatial_freq * i / n;
  return w.phase_rate() * (amp.slope(tau) * std::sin(arg) + amp.value(tau) * std::cos(arg));
}
}  // namespace detail

inline double joint_angle(const GaitParams& gait, const RobotModel& robot, double t, int i) {
  if (i < 0 || i >= robot.n_joints) throw ParameterError("joint index out of range");
  const int n = robot.n_joints;
  return detail::wave_term(gait.forward, gait.forward_amp, gait.forward.phase(t), i, n) +
         detail::wave_term(gait.omega, gait.omega_amp, gait.omega.phase(t), i, n);
}

inline ShapeState shape_at(const GaitParams& gait, const RobotModel& robot, double t) {
  ShapeState s = ShapeState::zeros(robot.n_joints);
  const double tf = gait.forward.phase(t), to = gait.omega.phase(t);
  for (int i = 0; i < robot.n_joints; ++i)
    s[i] = detail::wave_term(gait.forward, gait.forward_amp, tf, i, robot.n_joints) +
           detail::wave_term(gait.omega, gait.omega_amp, to, i, robot.n_joints);
  return s;
}

/// Analytic d theta_i / dt, including the amplitude-modulation terms.
inline std::vector<double> shape_velocity(const GaitParams& gait, const RobotModel& robot, double t) {
  std::vector<double> v(robot.n_joints);
  const double tf = gait.forward.phase(t), to = gait.omega.phase(t);
  for (int i = 0; i < robot.n_joints; ++i)
    v[i] = detail::wave_rate(gait.forward, gait.forward_amp, tf, i, robot.n_joints) +
           detail::wave_rate(gait.omega, gait.omega_amp, to, i, robot.n_joints);
  return v;
}

/// Two-wave gait with constant amplitudes.
inline GaitParams two_wave_gait(double a_f, double k_f, double a_o, double k_o, double psi,
                                double omega = kDefaultTemporalFreq) {
  GaitParams g;
  g.forward = {k_f, omega, 0.0, false};
  g.forward_amp = AmplitudeProfile::constant(a_f);
  g.omega = {k_o, omega, psi, false};
  g.omega_amp = AmplitudeProfile::constant(a_o);
  g.validate();
  return g;
}

/// Serpenoid wave plus constant curvature offset kappa:
///   theta_i = A sin(2 pi w t + 2 pi k i / N) + kappa
/// The offset is carried by a k = 0 omega wave frozen at phase pi/2.
inline GaitParams offset_turn_gait(double amplitude, double omega, double k, double kappa) {
  if (!(amplitude >= 0)) throw ParameterError("offset turn amplitude must be >= 0");
  GaitParams g;
  g.forward = {k, omega, 0.0, false};
  g.forward_amp = AmplitudeProfile::constant(amplitude);
  g.omega = {0.0, omega, kPi / 2, true};
  g.omega_amp = AmplitudeProfile::constant(kappa);
  g.validate();
  return g;
}

/// Two-wave gait whose omega wave shares the forward spatial frequency.
inline GaitParams geometric_turn_gait(GaitParams base) {
  base.omega.spatial_freq = base.forward.spatial_freq;
  base.validate();
  return base;
}

inline GaitParams geometric_turn_gait(double a_f, double a_o, double k_f, double psi,
                                      double omega = kDefaultTemporalFreq) {
  return two_wave_gait(a_f, k_f, a_o, k_f, psi, omega);
}

/// Shape variable m = [A_f, tau_f, A_o, tau_o]; phases wrapped to [0, 2 pi).
using ShapeVariable = std::array<double, 4>;

inline ShapeVariable shape_variable(const GaitParams& gait, double t) {
  const double tf = gait.forward.phase(t), to = gait.omega.phase(t);
  return {gait.forward_amp.value(tf), wrap_positive(tf), gait.omega_amp.value(to),
          wrap_positive(to)};
}

/// samples + 1 points uniformly over one period; the last repeats the first.
inline std::vector<ShapeVariable> gait_path(const GaitParams& gait,
                                            int samples = kDefaultPathSamples) {
  if (samples < 8) throw ParameterError("gait_path needs at least 8 samples");
  std::vector<ShapeVariable> path;
  path.reserve(samples + 1);
  const double period = gait.period();
  for (int j = 0; j <= samples; ++j) path.push_back(shape_variable(gait, period * j / samples));
  return path;
}

}  // namespace omegagait
