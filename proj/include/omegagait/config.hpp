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

// Experiment configuration: a flat, sectioned key = value file.
//
//   # comment
//   [robot]
//   n_joints = 8
//   joint_limit_deg = 90
//
// Every key belongs to a known section; unknown sections or keys, duplicate
// keys and malformed values are reported with their line number. Angles are
// in degrees, everything else in SI units or body lengths as named.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "omegagait/compliance.hpp"
#include "omegagait/dynamics.hpp"
#include "omegagait/errors.hpp"
#include "omegagait/gait.hpp"
#include "omegagait/model.hpp"
#include "omegagait/optimizer.hpp"

namespace omegagait {

enum class AmplitudeMode { kFamily, kConstant, kOffset, kGeometric };

inline const char* to_string(AmplitudeMode m) {
  switch (m) {
    case AmplitudeMode::kFamily: return "family";
    case AmplitudeMode::kConstant: return "constant";
    case AmplitudeMode::kOffset: return "offset";
    case AmplitudeMode::kGeometric: return "geometric";
  }
  return "?";
}

/// Gait block. In family mode the six parameters are those of the modulated
/// template; constant and geometric modes read a_f / a_o as fixed amplitudes;
/// offset mode reads a_f as the serpenoid amplitude and kappa as the offset.
struct GaitConfig {
  AmplitudeMode mode = AmplitudeMode::kFamily;
  double k_f = 1.5;
  double k_o = 1.0;
  double omega_hz = kDefaultTemporalFreq;
  GaitParamVector params{deg2rad(22.5), 1.0, 0.0, deg2rad(22.5), 0.0, kPi / 2};
  double kappa = 0.0;  // rad

  GaitParams build(double k_o_override) const {
    switch (mode) {
      case AmplitudeMode::kFamily:
        return family_gait(params, k_f, k_o_override, omega_hz);
      case AmplitudeMode::kConstant:
        return two_wave_gait(params.a_f, k_f, params.a_o, k_o_override, params.psi, omega_hz);
      case AmplitudeMode::kOffset:
        return offset_turn_gait(params.a_f, omega_hz, k_f, kappa);
      case AmplitudeMode::kGeometric:
        return geometric_turn_gait(params.a_f, params.a_o, k_f, params.psi, omega_hz);
    }
    throw ConfigError("unknown amplitude mode", 0);
  }
  GaitParams build() const { return build(k_o); }
};

struct DynamicsConfig {
  FrictionModel friction;
  int steps_per_cycle = kDefaultStepsPerCycle;
  int cycles = 1;
};

struct OptimizerConfig {
  OptimizerSettings settings;
  MultiStartOptions multistart;
};

struct SweepConfig {
  std::vector<double> k_o;               // empty: use gait.k_o
  std::vector<double> k_f;               // empty: use gait.k_f
  std::vector<double> joint_limit;       // rad; empty: robot value
  std::vector<int> n_joints;             // empty: robot value
};

struct HeightfunConfig {
  int resolution = 65;
  double amp_max = 0.0;  // rad; 0 means the joint limit
  int path_samples = kDefaultPathSamples;
};

struct ComplianceConfig {
  std::vector<double> spacing_bl{0.2, 0.3, 0.4, 0.5, 0.6};  // 0 = empty board
  double peg_radius_bl = 0.02;
  double stiffness = 500.0;
  double extent_bl = 3.0;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  int cycles = 4;
  double torque_scale = 1.0;
  Eigen::Vector2d A0 = Eigen::Vector2d::Constant(deg2rad(45.0));
  Eigen::Matrix2d M = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d B = 8.0 * Eigen::Matrix2d::Identity();
  Eigen::Matrix2d K = 8.0 * Eigen::Matrix2d::Identity();

  AdmittanceState admittance(double joint_limit) const {
    AdmittanceState s;
    s.M = M;
    s.B = B;
    s.K = K;
    s.A0 = A0;
    s.amp = A0;
    s.amp_max = joint_limit;
    s.validate();
    return s;
  }
};

struct OutputConfig {
  std::string dir = "out";
  std::string format = "csv";  // csv | csv+svg
};

struct ExperimentConfig {
  RobotModel robot;
  GaitConfig gait;
  DynamicsConfig dynamics;
  OptimizerConfig optimizer;
  SweepConfig sweep;
  HeightfunConfig heightfun;
  ComplianceConfig compliance;
  OutputConfig output;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& text, int line) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + t + "'", line);
  }
  if (used != t.size() || !std::isfinite(v)) throw ConfigError("expected a number, got '" + t + "'", line);
  return v;
}

inline long parse_integer(const std::string& text, int line) {
  const double v = parse_number(text, line);
  if (v != std::floor(v) || std::abs(v) > 1e15) throw ConfigError("expected an integer, got '" + trim(text) + "'", line);
  return static_cast<long>(v);
}

inline std::vector<double> parse_list(const std::string& text, int line) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, line));
  if (out.empty()) throw ConfigError("expected a comma-separated list", line);
  return out;
}

inline bool parse_bool(const std::string& text, int line) {
  const std::string t = trim(text);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw ConfigError("expected true or false, got '" + t + "'", line);
}

}  // namespace detail

/// Parses a configuration stream.
inline ExperimentConfig parse_config(std::istream& in) {
  using detail::parse_integer;
  using detail::parse_list;
  using detail::parse_number;
  ExperimentConfig c;
  using Setter = std::function<void(const std::string&, int)>;
  auto deg = [](double d) { return deg2rad(d); };
  auto positive_int = [](const std::string& v, int line, const char* what) {
    const long n = parse_integer(v, line);
    if (n < 1) throw ConfigError(std::string(what) + " must be >= 1", line);
    return static_cast<int>(n);
  };
  auto mat2 = [](const std::string& v, int line) {
    const auto x = parse_list(v, line);
    Eigen::Matrix2d m;
    if (x.size() == 2) {
      m << x[0], 0.0, 0.0, x[1];
    } else if (x.size() == 4) {
      m << x[0], x[1], x[2], x[3];
    } else {
      throw ConfigError("matrix needs 2 diagonal or 4 row-major entries", line);
    }
    return m;
  };

  std::map<std::string, std::map<std::string, Setter>> schema;
  auto& robot = schema["robot"];
  robot["n_joints"] = [&](auto& v, int l) { c.robot.n_joints = positive_int(v, l, "n_joints"); };
  robot["module_length"] = [&](auto& v, int l) { c.robot.module_length = parse_number(v, l); };
  robot["module_width"] = [&](auto& v, int l) { c.robot.module_width = parse_number(v, l); };
  robot["module_mass"] = [&](auto& v, int l) { c.robot.module_mass = parse_number(v, l); };
  robot["joint_limit_deg"] = [&](auto& v, int l) { c.robot.joint_limit = deg(parse_number(v, l)); };

  auto& gait = schema["gait"];
  gait["mode"] = [&](auto& v, int l) {
    const std::string m = detail::trim(v);
    if (m == "family") c.gait.mode = AmplitudeMode::kFamily;
    else if (m == "constant") c.gait.mode = AmplitudeMode::kConstant;
    else if (m == "offset") c.gait.mode = AmplitudeMode::kOffset;
    else if (m == "geometric") c.gait.mode = AmplitudeMode::kGeometric;
    else throw ConfigError("mode must be family, constant, offset or geometric", l);
  };
  gait["k_f"] = [&](auto& v, int l) { c.gait.k_f = parse_number(v, l); };
  gait["k_o"] = [&](auto& v, int l) { c.gait.k_o = parse_number(v, l); };
  gait["omega_hz"] = [&](auto& v, int l) { c.gait.omega_hz = parse_number(v, l); };
  gait["a_f_deg"] = [&](auto& v, int l) { c.gait.params.a_f = deg(parse_number(v, l)); };
  gait["gamma"] = [&](auto& v, int l) { c.gait.params.gamma = parse_number(v, l); };
  gait["phi_f_deg"] = [&](auto& v, int l) { c.gait.params.phi_f = deg(parse_number(v, l)); };
  gait["a_o_deg"] = [&](auto& v, int l) { c.gait.params.a_o = deg(parse_number(v, l)); };
  gait["phi_o_deg"] = [&](auto& v, int l) { c.gait.params.phi_o = deg(parse_number(v, l)); };
  gait["psi_deg"] = [&](auto& v, int l) { c.gait.params.psi = deg(parse_number(v, l)); };
  gait["kappa_deg"] = [&](auto& v, int l) { c.gait.kappa = deg(parse_number(v, l)); };

  auto& dyn = schema["dynamics"];
  dyn["mu"] = [&](auto& v, int l) { c.dynamics.friction.mu = parse_number(v, l); };
  dyn["epsilon"] = [&](auto& v, int l) { c.dynamics.friction.epsilon = parse_number(v, l); };
  dyn["contact_points_per_module"] = [&](auto& v, int l) {
    c.dynamics.friction.contact_points_per_module = positive_int(v, l, "contact_points_per_module");
  };
  dyn["steps_per_cycle"] = [&](auto& v, int l) { c.dynamics.steps_per_cycle = positive_int(v, l, "steps_per_cycle"); };
  dyn["cycles"] = [&](auto& v, int l) { c.dynamics.cycles = positive_int(v, l, "cycles"); };

  auto& opt = schema["optimizer"];
  opt["max_rounds"] = [&](auto& v, int l) { c.optimizer.settings.max_rounds = positive_int(v, l, "max_rounds"); };
  opt["round_tol_deg"] = [&](auto& v, int l) { c.optimizer.settings.round_tol = deg(parse_number(v, l)); };
  opt["grid_points"] = [&](auto& v, int l) { c.optimizer.settings.grid_points = positive_int(v, l, "grid_points"); };
  opt["pattern_tol"] = [&](auto& v, int l) { c.optimizer.settings.pattern_tol = parse_number(v, l); };
  opt["gamma_max"] = [&](auto& v, int l) { c.optimizer.settings.gamma_max = parse_number(v, l); };
  opt["feasibility_samples"] = [&](auto& v, int l) {
    c.optimizer.settings.feasibility_samples = positive_int(v, l, "feasibility_samples");
  };
  opt["starts"] = [&](auto& v, int l) { c.optimizer.multistart.starts = positive_int(v, l, "starts"); };
  opt["screen_samples"] = [&](auto& v, int l) { c.optimizer.multistart.screen_samples = static_cast<int>(parse_integer(v, l)); };
  opt["screen_steps"] = [&](auto& v, int l) { c.optimizer.multistart.screen_steps = positive_int(v, l, "screen_steps"); };
  opt["seed"] = [&](auto& v, int l) { c.optimizer.multistart.seed = static_cast<std::uint64_t>(positive_int(v, l, "seed")); };

  auto& sweep = schema["sweep"];
  sweep["k_o"] = [&](auto& v, int l) { c.sweep.k_o = parse_list(v, l); };
  sweep["k_f"] = [&](auto& v, int l) { c.sweep.k_f = parse_list(v, l); };
  sweep["joint_limit_deg"] = [&](auto& v, int l) {
    c.sweep.joint_limit.clear();
    for (double d : parse_list(v, l)) c.sweep.joint_limit.push_back(deg(d));
  };
  sweep["n_joints"] = [&](auto& v, int l) {
    c.sweep.n_joints.clear();
    for (double d : parse_list(v, l)) {
      if (d != std::floor(d) || d < 2) throw ConfigError("n_joints entries must be integers >= 2", l);
      c.sweep.n_joints.push_back(static_cast<int>(d));
    }
  };

  auto& hf = schema["heightfun"];
  hf["resolution"] = [&](auto& v, int l) { c.heightfun.resolution = positive_int(v, l, "resolution"); };
  hf["amp_max_deg"] = [&](auto& v, int l) { c.heightfun.amp_max = deg(parse_number(v, l)); };
  hf["path_samples"] = [&](auto& v, int l) { c.heightfun.path_samples = positive_int(v, l, "path_samples"); };

  auto& comp = schema["compliance"];
  comp["spacing_bl"] = [&](auto& v, int l) { c.compliance.spacing_bl = parse_list(v, l); };
  comp["peg_radius_bl"] = [&](auto& v, int l) { c.compliance.peg_radius_bl = parse_number(v, l); };
  comp["stiffness"] = [&](auto& v, int l) { c.compliance.stiffness = parse_number(v, l); };
  comp["extent_bl"] = [&](auto& v, int l) { c.compliance.extent_bl = parse_number(v, l); };
  comp["seeds"] = [&](auto& v, int l) {
    c.compliance.seeds.clear();
    for (double d : parse_list(v, l)) {
      if (d != std::floor(d) || d < 0) throw ConfigError("seeds must be non-negative integers", l);
      c.compliance.seeds.push_back(static_cast<std::uint64_t>(d));
    }
  };
  comp["cycles"] = [&](auto& v, int l) { c.compliance.cycles = positive_int(v, l, "cycles"); };
  comp["torque_scale"] = [&](auto& v, int l) { c.compliance.torque_scale = parse_number(v, l); };
  comp["A0_deg"] = [&](auto& v, int l) {
    const auto x = parse_list(v, l);
    if (x.size() != 2) throw ConfigError("A0_deg needs two values", l);
    c.compliance.A0 = {deg(x[0]), deg(x[1])};
  };
  comp["M"] = [&](auto& v, int l) { c.compliance.M = mat2(v, l); };
  comp["B"] = [&](auto& v, int l) { c.compliance.B = mat2(v, l); };
  comp["K"] = [&](auto& v, int l) { c.compliance.K = mat2(v, l); };

  auto& out = schema["output"];
  out["dir"] = [&](auto& v, int) { c.output.dir = detail::trim(v); };
  out["format"] = [&](auto& v, int l) {
    const std::string f = detail::trim(v);
    if (f != "csv" && f != "csv+svg") throw ConfigError("format must be csv or csv+svg", l);
    c.output.format = f;
  };

  std::string raw, section;
  int line = 0;
  std::set<std::string> seen;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find_first_of("#;");
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = detail::trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("unterminated section header", line);
      section = detail::trim(s.substr(1, s.size() - 2));
      if (!schema.count(section)) throw ConfigError("unknown section [" + section + "]", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line);
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string value = detail::trim(s.substr(eq + 1));
    if (section.empty()) throw ConfigError("key '" + key + "' outside any section", line);
    auto& keys = schema[section];
    auto it = keys.find(key);
    if (it == keys.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]", line);
    if (!seen.insert(section + "." + key).second) throw ConfigError("duplicate key '" + key + "'", line);
    if (value.empty()) throw ConfigError("missing value for '" + key + "'", line);
    it->second(value, line);
  }

  // Whole-config validation; errors here have no single line.
  try {
    c.robot.validate();
    c.dynamics.friction.validate();
    if (c.dynamics.steps_per_cycle < 64) throw ParameterError("steps_per_cycle must be >= 64");
    if (c.optimizer.multistart.screen_steps < 64) throw ParameterError("screen_steps must be >= 64");
    if (c.heightfun.resolution < 17) throw ParameterError("heightfun resolution must be >= 17");
    if (!(c.gait.omega_hz > 0)) throw ParameterError("omega_hz must be > 0");
    if (c.gait.params.gamma < 1) throw ParameterError("gamma must be >= 1");
    c.gait.build();
    for (double s : c.compliance.spacing_bl)
      if (s < 0) throw ParameterError("spacing_bl entries must be >= 0");
    c.compliance.admittance(c.robot.joint_limit);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what(), 0);
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path, 0);
  return parse_config(in);
}

}  // namespace omegagait
