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

// Coordinate-ascent design of the amplitude-modulated two-wave gait.
//
// The gait path through shape space is restricted to three simple functions:
//   f1: A_f = a_f (gamma + sin(tau_f + phi_f))
//   f2: A_o = a_o (1 + sin(tau_o + phi_o))
//   f3: tau_o = tau_f + psi
// One function's parameters are optimized at a time with the other two held
// fixed, cycling f1 -> f2 -> f3 until a round gains less than a threshold.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "omegagait/dynamics.hpp"
#include "omegagait/gait.hpp"
#include "omegagait/model.hpp"

namespace omegagait {

/// The six free scalars of the gait family.
struct GaitParamVector {
  double a_f = 0.0;    // rad
  double gamma = 1.0;  // >= 1
  double phi_f = 0.0;  // rad
  double a_o = 0.0;    // rad
  double phi_o = 0.0;  // rad
  double psi = 0.0;    // rad

  /// Clamps amplitudes and gamma into range and wraps phases to [0, 2 pi).
  GaitParamVector normalized() const {
    GaitParamVector p = *this;
    p.a_f = std::max(0.0, p.a_f);
    p.a_o = std::max(0.0, p.a_o);
    p.gamma = std::max(1.0, p.gamma);
    p.phi_f = wrap_positive(p.phi_f);
    p.phi_o = wrap_positive(p.phi_o);
    p.psi = wrap_positive(p.psi);
    return p;
  }

  /// Starting point for a robot with the given joint limit. Each wave peaks
  /// at half the limit, so the sum never exceeds it.
  static GaitParamVector default_init(double joint_limit) {
    return {joint_limit / 4, 1.0, 0.0, joint_limit / 4, 0.0, kPi / 2};
  }

  bool operator==(const GaitParamVector&) const = default;
};

inline GaitParams family_gait(const GaitParamVector& p, double k_f, double k_o,
                              double temporal_freq = kDefaultTemporalFreq) {
  GaitParams g;
  g.forward = {k_f, temporal_freq, 0.0, false};
  g.forward_amp = AmplitudeProfile::f1(p.a_f, p.gamma, p.phi_f);
  g.omega = {k_o, temporal_freq, p.psi, false};
  g.omega_amp = AmplitudeProfile::f2(p.a_o, p.phi_o);
  g.validate();
  return g;
}

enum class Infeasibility { kNone, kJointLimit, kSelfCollision, kSolverFailure };

inline const char* to_string(Infeasibility c) {
  switch (c) {
    case Infeasibility::kNone: return "none";
    case Infeasibility::kJointLimit: return "joint_limit";
    case Infeasibility::kSelfCollision: return "self_collision";
    case Infeasibility::kSolverFailure: return "solver_failure";
  }
  return "?";
}

/// Turning angle per cycle (rad), or the reason the gait was rejected.
struct ObjectiveValue {
  double value = -std::numeric_limits<double>::infinity();
  Infeasibility reason = Infeasibility::kNone;
  std::string diagnostic;

  bool feasible() const { return reason == Infeasibility::kNone; }
};

struct OptimizerSettings {
  FrictionModel friction;
  int steps_per_cycle = kDefaultStepsPerCycle;
  int feasibility_samples = kDefaultPathSamples;
  double temporal_freq = kDefaultTemporalFreq;
  int grid_points = 16;
  double gamma_max = 4.0;
  double pattern_tol = 1e-3;              // rad (or unit of gamma)
  double round_tol = deg2rad(0.5);        // rad/cycle
  int max_rounds = 20;
};

/// Checks every sampled shape of one cycle against the joint limit and self
/// collision.
inline Infeasibility path_feasibility(const RobotModel& robot, const GaitParams& gait,
                                      int samples) {
  const double period = gait.period();
  for (int j = 0; j < samples; ++j) {
    const ShapeState s = shape_at(gait, robot, period * j / samples);
    if (!within_joint_limits(robot, s)) return Infeasibility::kJointLimit;
  }
  for (int j = 0; j < samples; ++j) {
    const ShapeState s = shape_at(gait, robot, period * j / samples);
    if (self_collides(robot, s)) return Infeasibility::kSelfCollision;
  }
  return Infeasibility::kNone;
}

inline ObjectiveValue objective(const RobotModel& robot, const GaitParams& gait,
                                const OptimizerSettings& settings) {
  ObjectiveValue out;
  out.reason = path_feasibility(robot, gait, settings.feasibility_samples);
  if (!out.feasible()) return out;
  try {
    const Trajectory traj = integrate_cycle(robot, gait, settings.friction, settings.steps_per_cycle);
    out.value = angular_displacement(traj);
  } catch (const std::runtime_error& e) {
    out.value = -std::numeric_limits<double>::infinity();
    out.reason = Infeasibility::kSolverFailure;
    out.diagnostic = e.what();
  }
  return out;
}

inline ObjectiveValue objective(const RobotModel& robot, const GaitParamVector& p, double k_f,
                                double k_o, const OptimizerSettings& settings) {
  return objective(robot, family_gait(p.normalized(), k_f, k_o, settings.temporal_freq), settings);
}

enum class SubFunction { kF1, kF2, kF3 };

inline const char* to_string(SubFunction f) {
  switch (f) {
    case SubFunction::kF1: return "f1";
    case SubFunction::kF2: return "f2";
    case SubFunction::kF3: return "f3";
  }
  return "?";
}

struct Iterate {
  int round = 0;
  SubFunction stage = SubFunction::kF1;
  GaitParamVector params;
  double objective = 0.0;  // rad/cycle
};

struct OptimizationReport {
  std::vector<Iterate> iterates;
  bool converged = false;
  int rounds = 0;
  std::vector<Infeasibility> active_constraints;
  long evaluations = 0;

  const Iterate& best() const { return iterates.back(); }
};

/// One free coordinate of a sub-function slice.
struct SliceAxis {
  double GaitParamVector::*field;
  double lo;
  double hi;
  bool cyclic;
};

/// Black-box maximizer over a box: coarse grid then compass pattern search.
/// Candidates are visited in a fixed order so results are deterministic.
struct PatternSearch {
  int grid_points = 16;
  double tol = 1e-3;

  using Fn = std::function<double(const std::vector<double>&)>;

  struct Result {
    std::vector<double> x;
    double value;
    long evaluations;
  };

  struct Dim {
    double lo, hi;
    bool cyclic;
    double clamp(double v) const {
      if (cyclic) return wrap_positive(v);
      return std::min(hi, std::max(lo, v));
    }
    double spacing(int n) const { return cyclic ? (hi - lo) / n : (hi - lo) / (n - 1); }
    double node(int j, int n) const { return lo + j * spacing(n); }
  };

  /// `start` is always a candidate, so the result is never worse than it.
  Result maximize(const Fn& f, const std::vector<Dim>& dims, std::vector<double> start) const {
    const std::size_t d = dims.size();
    long evals = 0;
    auto eval = [&](const std::vector<double>& x) {
      ++evals;
      return f(x);
    };
    std::vector<double> best = start;
    double best_v = eval(start);

    std::vector<int> idx(d, 0);
    std::vector<double> x(d);
    for (;;) {
      for (std::size_t k = 0; k < d; ++k) x[k] = dims[k].node(idx[k], grid_points);
      const double v = eval(x);
      if (v > best_v) {
        best_v = v;
        best = x;
      }
      std::size_t k = 0;
      while (k < d && ++idx[k] == grid_points) idx[k++] = 0;
      if (k == d) break;
    }

    if (std::isfinite(best_v)) {
      std::vector<double> step(d);
      for (std::size_t k = 0; k < d; ++k) step[k] = dims[k].spacing(grid_points) / 2;
      auto max_step = [&] {
        double m = 0.0;
        for (double s : step) m = std::max(m, s);
        return m;
      };
      while (max_step() >= tol) {
        bool moved = false;
        for (std::size_t k = 0; k < d && !moved; ++k) {
          if (step[k] < tol) continue;
          for (double sign : {1.0, -1.0}) {
            std::vector<double> trial = best;
            trial[k] = dims[k].clamp(best[k] + sign * step[k]);
            if (trial[k] == best[k]) continue;
            const double v = eval(trial);
            if (v > best_v) {
              best_v = v;
              best = trial;
              moved = true;
              break;
            }
          }
        }
        if (!moved)
          for (double& s : step) s *= 0.5;
      }
    }
    return {best, best_v, evals};
  }
};

inline std::vector<SliceAxis> slice_axes(SubFunction which, const RobotModel& robot,
                                         const OptimizerSettings& settings) {
  switch (which) {
    case SubFunction::kF1:
      return {{&GaitParamVector::a_f, 0.0, robot.joint_limit, false},
              {&GaitParamVector::gamma, 1.0, settings.gamma_max, false},
              {&GaitParamVector::phi_f, 0.0, kTwoPi, true}};
    case SubFunction::kF2:
      return {{&GaitParamVector::a_o, 0.0, robot.joint_limit, false},
              {&GaitParamVector::phi_o, 0.0, kTwoPi, true}};
    case SubFunction::kF3:
      return {{&GaitParamVector::psi, 0.0, kTwoPi, true}};
  }
  return {};
}

/// Maximizes the objective over one sub-function's parameters with the other
/// two held fixed. Returns `start` unchanged when nothing feasible beats it.
inline GaitParamVector optimize_subfunction(SubFunction which, const GaitParamVector& start,
                                            const RobotModel& robot, double k_f, double k_o,
                                            const OptimizerSettings& settings,
                                            OptimizationReport* report = nullptr) {
  const auto axes = slice_axes(which, robot, settings);
  std::vector<PatternSearch::Dim> dims;
  std::vector<double> x0;
  const GaitParamVector base = start.normalized();
  for (const SliceAxis& a : axes) {
    dims.push_back({a.lo, a.hi, a.cyclic});
    x0.push_back(base.*(a.field));
  }
  bool any_feasible = false;
  auto f = [&](const std::vector<double>& x) {
    GaitParamVector p = base;
    for (std::size_t k = 0; k < axes.size(); ++k) p.*(axes[k].field) = x[k];
    const ObjectiveValue v = objective(robot, p, k_f, k_o, settings);
    if (v.feasible()) {
      any_feasible = true;
    } else if (report) {
      auto& ac = report->active_constraints;
      if (std::find(ac.begin(), ac.end(), v.reason) == ac.end()) ac.push_back(v.reason);
    }
    return v.value;
  };
  const PatternSearch search{settings.grid_points, settings.pattern_tol};
  const auto result = search.maximize(f, dims, x0);
  if (report) report->evaluations += result.evaluations;
  if (!any_feasible || !std::isfinite(result.value)) return start;
  GaitParamVector out = base;
  for (std::size_t k = 0; k < axes.size(); ++k) out.*(axes[k].field) = result.x[k];
  return out;
}

/// Cycles f1 -> f2 -> f3 from `init` until a full round gains less than
/// settings.round_tol or max_rounds is reached.
inline OptimizationReport optimize_gait(const RobotModel& robot, double k_f, double k_o,
                                        const GaitParamVector& init,
                                        const OptimizerSettings& settings) {
  if (settings.max_rounds < 1) throw ParameterError("max_rounds must be >= 1");
  robot.validate();
  OptimizationReport report;
  GaitParamVector current = init.normalized();
  ObjectiveValue v = objective(robot, current, k_f, k_o, settings);
  ++report.evaluations;
  // Shrink an infeasible start toward the zero gait, which is always feasible.
  for (int k = 0; !v.feasible(); ++k) {
    report.active_constraints.push_back(v.reason);
    if (k < 20) {
      current.a_f *= 0.5;
      current.a_o *= 0.5;
    } else {
      current.a_f = current.a_o = 0.0;
    }
    v = objective(robot, current, k_f, k_o, settings);
    ++report.evaluations;
  }
  report.iterates.push_back({0, SubFunction::kF3, current, v.value});
  double round_start = v.value;
  for (int round = 1; round <= settings.max_rounds; ++round) {
    report.rounds = round;
    for (SubFunction which : {SubFunction::kF1, SubFunction::kF2, SubFunction::kF3}) {
      const GaitParamVector next =
          optimize_subfunction(which, current, robot, k_f, k_o, settings, &report);
      const ObjectiveValue nv = objective(robot, next, k_f, k_o, settings);
      ++report.evaluations;
      if (nv.feasible() && nv.value >= report.iterates.back().objective) {
        current = next.normalized();
        report.iterates.push_back({round, which, current, nv.value});
      }
    }
    const double gain = report.iterates.back().objective - round_start;
    round_start = report.iterates.back().objective;
    if (gain < settings.round_tol) {
      report.converged = true;
      break;
    }
  }
  return report;
}

/// Start selection for optimize_gait_multistart. A seeded random pool of
/// family parameters is screened with a coarse step count; coordinate descent
/// then runs at full resolution from the default init and the best
/// `starts - 1` screened points.
struct MultiStartOptions {
  int starts = 4;
  int screen_samples = 4000;
  int screen_steps = 64;
  std::uint64_t seed = 1;
};

struct MultiStartReport {
  OptimizationReport best;
  std::vector<double> start_objectives;  // final objective per start, rad
  long evaluations = 0;
};

inline MultiStartReport optimize_gait_multistart(const RobotModel& robot, double k_f, double k_o,
                                                 const OptimizerSettings& settings,
                                                 const MultiStartOptions& ms = {}) {
  if (ms.starts < 1) throw ParameterError("starts must be >= 1");
  const double limit = robot.joint_limit;
  std::vector<GaitParamVector> inits{GaitParamVector::default_init(limit)};

  OptimizerSettings coarse = settings;
  coarse.steps_per_cycle = ms.screen_steps;
  std::mt19937_64 rng(ms.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<std::pair<double, GaitParamVector>> pool;
  MultiStartReport out;
  for (int k = 0; k < ms.screen_samples; ++k) {
    const GaitParamVector p{0.5 * limit * u01(rng),
                            1.0 + (settings.gamma_max - 1.0) * u01(rng),
                            kTwoPi * u01(rng),
                            0.5 * limit * u01(rng),
                            kTwoPi * u01(rng),
                            kTwoPi * u01(rng)};
    const ObjectiveValue v = objective(robot, p, k_f, k_o, coarse);
    ++out.evaluations;
    if (v.feasible()) pool.emplace_back(v.value, p);
  }
  std::stable_sort(pool.begin(), pool.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; k < pool.size() && static_cast<int>(inits.size()) < ms.starts; ++k)
    inits.push_back(pool[k].second);

  bool have = false;
  for (const GaitParamVector& init : inits) {
    OptimizationReport r = optimize_gait(robot, k_f, k_o, init, settings);
    out.evaluations += r.evaluations;
    out.start_objectives.push_back(r.iterates.back().objective);
    if (!have || r.iterates.back().objective > out.best.iterates.back().objective) {
      out.best = std::move(r);
      have = true;
    }
  }
  return out;
}

/// CSV: one row per accepted iterate; angles in degrees.
inline void write_report_csv(std::ostream& os, const OptimizationReport& report) {
  os << "# omegagait-csv v1\n";
  os << "round,stage,a_f_deg,gamma,phi_f_deg,a_o_deg,phi_o_deg,psi_deg,objective_deg\n";
  const auto old_prec = os.precision(10);
  for (const Iterate& it : report.iterates) {
    const GaitParamVector& p = it.params;
    os << it.round << ',' << (it.round == 0 ? "init" : to_string(it.stage)) << ','
       << rad2deg(p.a_f) << ',' << p.gamma << ',' << rad2deg(p.phi_f) << ',' << rad2deg(p.a_o)
       << ',' << rad2deg(p.phi_o) << ',' << rad2deg(p.psi) << ',' << rad2deg(it.objective)
       << '\n';
  }
  os.precision(old_prec);
}

}  // namespace omegagait
