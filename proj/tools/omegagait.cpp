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

// omegagait command-line harness.
//
//   omegagait simulate   --config run.ini [--out DIR] [--format csv|csv+svg]
//   omegagait optimize   --config run.ini
//   omegagait sweep      --config run.ini [--jobs N]
//   omegagait heightfun  --config run.ini
//   omegagait compliance --config run.ini [--jobs N]
//
// Exit codes: 0 ok, 2 configuration error, 3 solver error, 1 anything else.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "omegagait/compliance.hpp"
#include "omegagait/config.hpp"
#include "omegagait/dynamics.hpp"
#include "omegagait/errors.hpp"
#include "omegagait/geomech.hpp"
#include "omegagait/io.hpp"
#include "omegagait/optimizer.hpp"

namespace og = omegagait;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct Options {
  std::string config;
  std::string out;
  std::string format;
  int jobs = 0;
};

struct Context {
  og::ExperimentConfig cfg;
  fs::path out;
  bool svg = false;
  int jobs = 1;
};

Context make_context(const Options& opt) {
  Context ctx{og::load_config(opt.config), {}, false, 1};
  if (!opt.out.empty()) ctx.cfg.output.dir = opt.out;
  if (!opt.format.empty()) ctx.cfg.output.format = opt.format;
  ctx.out = ctx.cfg.output.dir;
  ctx.svg = ctx.cfg.output.format == "csv+svg";
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  ctx.jobs = opt.jobs > 0 ? opt.jobs : static_cast<int>(hw);
  return ctx;
}

// Runs task(i) for i in [0, n) on up to `jobs` threads. Exceptions are caught
// per task by the callers; results are written by index so ordering never
// depends on scheduling.
void parallel_for(int n, int jobs, const std::function<void(int)>& task) {
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) task(i);
  };
  const int threads = std::max(1, std::min(jobs, n));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

std::string fmt_num(double v, int prec = 17) {
  if (std::isnan(v)) return "nan";
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

void write_params_ini(std::ostream& os, const og::GaitParamVector& p, double k_f, double k_o,
                      double omega) {
  os << "[gait]\nmode = family\n";
  os << "k_f = " << fmt_num(k_f) << "\nk_o = " << fmt_num(k_o) << "\nomega_hz = " << fmt_num(omega) << "\n";
  os << "a_f_deg = " << fmt_num(og::rad2deg(p.a_f)) << "\n";
  os << "gamma = " << fmt_num(p.gamma) << "\n";
  os << "phi_f_deg = " << fmt_num(og::rad2deg(p.phi_f)) << "\n";
  os << "a_o_deg = " << fmt_num(og::rad2deg(p.a_o)) << "\n";
  os << "phi_o_deg = " << fmt_num(og::rad2deg(p.phi_o)) << "\n";
  os << "psi_deg = " << fmt_num(og::rad2deg(p.psi)) << "\n";
}

og::OptimizerSettings optimizer_settings(const og::ExperimentConfig& cfg) {
  og::OptimizerSettings s = cfg.optimizer.settings;
  s.friction = cfg.dynamics.friction;
  s.steps_per_cycle = cfg.dynamics.steps_per_cycle;
  s.temporal_freq = cfg.gait.omega_hz;
  return s;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const og::GaitParams gait = cfg.gait.build();
  const auto reason = og::path_feasibility(cfg.robot, gait, cfg.optimizer.settings.feasibility_samples);
  if (reason != og::Infeasibility::kNone)
    spdlog::warn("gait path is infeasible ({}); simulating anyway", og::to_string(reason));
  const og::Trajectory traj = og::integrate_cycle(cfg.robot, gait, cfg.dynamics.friction,
                                                  cfg.dynamics.steps_per_cycle, cfg.dynamics.cycles);
  const double deg = og::rad2deg(og::angular_displacement(traj));
  og::write_atomically(ctx.out / "trajectory.csv", [&](std::ostream& os) { og::write_trajectory_csv(os, traj); });
  if (ctx.svg) {
    og::PlotSeries heading{"body axis", {}, {}, {}};
    for (std::size_t k = 0; k < traj.size(); ++k) {
      heading.x.push_back(traj.times[k]);
      heading.y.push_back(og::rad2deg(traj.body_axis[k] - traj.body_axis.front()));
    }
    og::write_atomically(ctx.out / "trajectory.svg", [&](std::ostream& os) {
      og::write_line_plot_svg(os, "Body-axis rotation", "t (s)", "rotation (deg)", {heading});
    });
  }
  std::printf("angular displacement: %.4f deg/cycle\n", deg);
  return kExitOk;
}

// ---------------------------------------------------------------- optimize

int cmd_optimize(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const og::OptimizerSettings s = optimizer_settings(cfg);
  const auto ms = og::optimize_gait_multistart(cfg.robot, cfg.gait.k_f, cfg.gait.k_o, s, cfg.optimizer.multistart);
  const og::Iterate& best = ms.best.iterates.back();
  og::write_atomically(ctx.out / "optimization.csv", [&](std::ostream& os) { og::write_report_csv(os, ms.best); });
  og::write_atomically(ctx.out / "optimized_gait.ini", [&](std::ostream& os) {
    write_params_ini(os, best.params, cfg.gait.k_f, cfg.gait.k_o, cfg.gait.omega_hz);
  });
  if (ctx.svg) {
    og::PlotSeries obj{"objective", {}, {}, {}};
    for (std::size_t k = 0; k < ms.best.iterates.size(); ++k) {
      obj.x.push_back(static_cast<double>(k));
      obj.y.push_back(og::rad2deg(ms.best.iterates[k].objective));
    }
    og::write_atomically(ctx.out / "optimization.svg", [&](std::ostream& os) {
      og::write_line_plot_svg(os, "Accepted iterates", "iterate", "turning angle (deg/cycle)", {obj});
    });
  }
  const auto& p = best.params;
  std::printf("objective: %.4f deg/cycle converged=%d rounds=%d evaluations=%ld\n",
              og::rad2deg(best.objective), ms.best.converged ? 1 : 0, ms.best.rounds, ms.evaluations);
  std::printf("params: a_f=%.4f gamma=%.4f phi_f=%.4f a_o=%.4f phi_o=%.4f psi=%.4f (deg)\n",
              og::rad2deg(p.a_f), p.gamma, og::rad2deg(p.phi_f), og::rad2deg(p.a_o),
              og::rad2deg(p.phi_o), og::rad2deg(p.psi));
  return kExitOk;
}

// ---------------------------------------------------------------- sweep

struct SweepPoint {
  int n_joints;
  double joint_limit;
  double k_f;
  double k_o;
};

struct SweepRow {
  SweepPoint point;
  double displacement = std::nan("");  // rad/cycle
  bool converged = false;
  int rounds = 0;
  long evaluations = 0;
  og::GaitParamVector params;
  std::string status = "ok";
};

int cmd_sweep(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto or_default = [](std::vector<double> v, double d) { return v.empty() ? std::vector<double>{d} : v; };
  const std::vector<int> ns = cfg.sweep.n_joints.empty() ? std::vector<int>{cfg.robot.n_joints} : cfg.sweep.n_joints;
  const auto limits = or_default(cfg.sweep.joint_limit, cfg.robot.joint_limit);
  const auto kfs = or_default(cfg.sweep.k_f, cfg.gait.k_f);
  const auto kos = or_default(cfg.sweep.k_o, cfg.gait.k_o);

  std::vector<SweepPoint> points;
  for (int n : ns)
    for (double lim : limits)
      for (double kf : kfs)
        for (double ko : kos) points.push_back({n, lim, kf, ko});

  std::vector<SweepRow> rows(points.size());
  std::mutex log_mu;
  parallel_for(static_cast<int>(points.size()), ctx.jobs, [&](int i) {
    SweepRow& row = rows[i];
    row.point = points[i];
    try {
      og::RobotModel robot = cfg.robot;
      robot.n_joints = row.point.n_joints;
      robot.joint_limit = row.point.joint_limit;
      robot.validate();
      const auto ms = og::optimize_gait_multistart(robot, row.point.k_f, row.point.k_o,
                                                   optimizer_settings(cfg), cfg.optimizer.multistart);
      const og::Iterate& best = ms.best.iterates.back();
      row.displacement = best.objective;
      row.converged = ms.best.converged;
      row.rounds = ms.best.rounds;
      row.evaluations = ms.evaluations;
      row.params = best.params;
    } catch (const std::exception& e) {
      row.status = e.what();
    }
    std::lock_guard<std::mutex> lock(log_mu);
    spdlog::info("sweep point {}/{}: N={} limit={} k_f={} k_o={} -> {} deg ({})", i + 1, points.size(),
                 row.point.n_joints, og::rad2deg(row.point.joint_limit), row.point.k_f, row.point.k_o,
                 og::rad2deg(row.displacement), row.status);
  });

  og::write_atomically(ctx.out / "sweep.csv", [&](std::ostream& os) {
    os << "# omegagait-csv v1\n";
    os << "n_joints,joint_limit_deg,k_f,k_o,displacement_deg,converged,rounds,evaluations,"
          "a_f_deg,gamma,phi_f_deg,a_o_deg,phi_o_deg,psi_deg,status\n";
    for (const SweepRow& r : rows) {
      std::string status = r.status;
      std::replace(status.begin(), status.end(), ',', ';');
      std::replace(status.begin(), status.end(), '\n', ' ');
      os << r.point.n_joints << ',' << fmt_num(og::rad2deg(r.point.joint_limit)) << ','
         << fmt_num(r.point.k_f) << ',' << fmt_num(r.point.k_o) << ','
         << fmt_num(og::rad2deg(r.displacement)) << ',' << (r.converged ? 1 : 0) << ','
         << r.rounds << ',' << r.evaluations << ',' << fmt_num(og::rad2deg(r.params.a_f)) << ','
         << fmt_num(r.params.gamma) << ',' << fmt_num(og::rad2deg(r.params.phi_f)) << ','
         << fmt_num(og::rad2deg(r.params.a_o)) << ',' << fmt_num(og::rad2deg(r.params.phi_o)) << ','
         << fmt_num(og::rad2deg(r.params.psi)) << ',' << status << '\n';
    }
  });

  if (ctx.svg) {
    // x axis: the first swept variable with more than one value (k_o, then
    // joint limit, k_f, N); one series per combination of the others.
    enum Var { kKo, kLimit, kKf, kN };
    const std::size_t sizes[] = {kos.size(), limits.size(), kfs.size(), ns.size()};
    int xvar = kKo;
    for (int v : {kKo, kLimit, kKf, kN})
      if (sizes[v] > 1) {
        xvar = v;
        break;
      }
    auto value = [&](const SweepPoint& p, int v) {
      switch (v) {
        case kKo: return p.k_o;
        case kLimit: return og::rad2deg(p.joint_limit);
        case kKf: return p.k_f;
        default: return static_cast<double>(p.n_joints);
      }
    };
    const char* names[] = {"k_o", "theta_max (deg)", "k_f", "N"};
    std::map<std::string, og::PlotSeries> by_label;
    std::vector<std::string> order;
    for (const SweepRow& r : rows) {
      std::string label;
      for (int v : {kN, kLimit, kKf, kKo}) {
        if (v == xvar || sizes[v] < 2) continue;
        if (!label.empty()) label += ", ";
        label += std::string(names[v]) + "=" + fmt_num(value(r.point, v), 4);
      }
      if (label.empty()) label = "optimized";
      if (!by_label.count(label)) order.push_back(label);
      auto& s = by_label[label];
      s.name = label;
      s.x.push_back(value(r.point, xvar));
      s.y.push_back(og::rad2deg(r.displacement));
    }
    std::vector<og::PlotSeries> series;
    for (const auto& l : order) series.push_back(by_label[l]);
    og::write_atomically(ctx.out / "sweep.svg", [&](std::ostream& os) {
      og::write_line_plot_svg(os, "Optimized turning angle", names[xvar], "turning angle (deg/cycle)", series);
    });
  }
  int failed = 0;
  for (const SweepRow& r : rows) {
    if (r.status != "ok") ++failed;
    std::printf("N=%d theta_max=%.1f k_f=%.3g k_o=%.3g: %.4f deg/cycle%s\n", r.point.n_joints,
                og::rad2deg(r.point.joint_limit), r.point.k_f, r.point.k_o,
                og::rad2deg(r.displacement), r.status == "ok" ? "" : " (failed)");
  }
  if (failed) spdlog::warn("{} of {} sweep points failed", failed, rows.size());
  return kExitOk;
}

// ---------------------------------------------------------------- heightfun

int cmd_heightfun(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (cfg.gait.mode != og::AmplitudeMode::kFamily)
    throw og::ConfigError("heightfun needs [gait] mode = family", 0);
  const og::GaitParams gait = cfg.gait.build();
  const og::SubSpace spaces[] = {og::SubSpace::kTauFAmpF, og::SubSpace::kTauOAmpO, og::SubSpace::kTauFTauO};
  const char* tags[] = {"tauf_af", "tauo_ao", "tauf_tauo"};
  struct Result {
    og::HeightFunctionGrid hf;
    og::FeasibilityGrid fg;
    std::vector<Eigen::Vector2d> path;
    og::SurfaceIntegral si;
    std::vector<std::string> failures;
  };
  std::vector<Result> results(3);
  std::vector<std::exception_ptr> errors(3);
  parallel_for(3, ctx.jobs, [&](int k) {
    try {
      og::SubShapeSpec spec{spaces[k], cfg.gait.params.normalized(), cfg.gait.k_f, cfg.gait.k_o,
                            cfg.heightfun.amp_max > 0 ? cfg.heightfun.amp_max : cfg.robot.joint_limit};
      Result& r = results[k];
      r.hf = og::height_function(cfg.robot, spec, cfg.heightfun.resolution, cfg.dynamics.friction, &r.failures);
      r.fg = og::feasibility_map(cfg.robot, spec, cfg.heightfun.resolution);
      r.path = og::project_path(spec, og::gait_path(gait, cfg.heightfun.path_samples));
      r.si = og::surface_integral(r.hf, r.path);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  });
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (int k = 0; k < 3; ++k) {
    const Result& r = results[k];
    for (const auto& f : r.failures) spdlog::warn("{}: solver failure masked at {}", tags[k], f);
    if (r.si.touches_masked) spdlog::warn("{}: gait path encloses masked (infeasible) cells", tags[k]);
    og::write_atomically(ctx.out / ("heightfun_" + std::string(tags[k]) + ".csv"),
                         [&](std::ostream& os) { og::write_grid_csv(os, r.hf); });
    og::write_atomically(ctx.out / ("feasibility_" + std::string(tags[k]) + ".csv"),
                         [&](std::ostream& os) { og::write_grid_csv(os, r.fg); });
    if (ctx.svg) {
      // Amplitude axes are shown in degrees, phases in radians.
      const bool amp_y = spaces[k] != og::SubSpace::kTauFTauO;
      std::vector<double> ys = r.hf.axes.y;
      std::vector<Eigen::Vector2d> path = r.path;
      if (amp_y) {
        for (double& y : ys) y = og::rad2deg(y);
        for (auto& p : path) p.y() = og::rad2deg(p.y());
      }
      for (auto& p : path) {
        p.x() = og::wrap_positive(p.x());
        if (!amp_y) p.y() = og::wrap_positive(p.y());
      }
      const std::string xl = spaces[k] == og::SubSpace::kTauOAmpO ? "tau_o (rad)" : "tau_f (rad)";
      const std::string yl = spaces[k] == og::SubSpace::kTauFAmpF   ? "A_f (deg)"
                             : spaces[k] == og::SubSpace::kTauOAmpO ? "A_o (deg)"
                                                                    : "tau_o (rad)";
      og::write_atomically(ctx.out / ("heightfun_" + std::string(tags[k]) + ".svg"), [&](std::ostream& os) {
        og::write_heatmap_svg(os, std::string("Height function ") + og::to_string(spaces[k]), xl, yl,
                              r.hf.axes.x, ys, r.hf.values, path);
      });
    }
    std::printf("%s: surface integral %.4f deg (enclosed %.4f, reference %.4f), max |h| %.6g\n",
                og::to_string(spaces[k]), og::rad2deg(r.si.total()), og::rad2deg(r.si.enclosed),
                og::rad2deg(r.si.reference), r.hf.max_abs());
  }
  return kExitOk;
}

// ---------------------------------------------------------------- compliance

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}
double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

int cmd_compliance(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& cc = cfg.compliance;
  const og::GaitParams gait = cfg.gait.build();
  og::ComplianceSettings base;
  base.steps_per_cycle = cfg.dynamics.steps_per_cycle;
  base.cycles = cc.cycles;
  base.torque_scale = cc.torque_scale;
  base.admittance = cc.admittance(cfg.robot.joint_limit);

  const int ns = static_cast<int>(cc.spacing_bl.size()), nseed = static_cast<int>(cc.seeds.size());
  struct Cell {
    double open = 0.0, compliant = 0.0;  // rad/cycle
    std::vector<og::AmplitudeSample> history;
  };
  std::vector<Cell> cells(static_cast<std::size_t>(ns) * nseed);
  std::vector<std::exception_ptr> errors(cells.size());
  parallel_for(static_cast<int>(cells.size()), ctx.jobs, [&](int idx) {
    try {
      const double sp = cc.spacing_bl[idx / nseed];
      const auto board = sp > 0 ? og::PegBoard::hexagonal(cfg.robot, sp, cc.peg_radius_bl, cc.stiffness, cc.extent_bl)
                                : og::PegBoard::none(cfg.robot);
      const og::Pose2 start = og::random_start_pose(cfg.robot, gait, board, base.admittance, cc.seeds[idx % nseed]);
      og::ComplianceSettings s = base;
      s.compliant = false;
      cells[idx].open = og::angular_displacement(
          og::simulate_compliant_turn(cfg.robot, gait, board, cfg.dynamics.friction, s, start).trajectory);
      s.compliant = true;
      auto run = og::simulate_compliant_turn(cfg.robot, gait, board, cfg.dynamics.friction, s, start);
      cells[idx].compliant = og::angular_displacement(run.trajectory);
      cells[idx].history = std::move(run.history);
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  });
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  og::write_atomically(ctx.out / "compliance_runs.csv", [&](std::ostream& os) {
    os << "# omegagait-csv v1\nspacing_bl,seed,open_loop_deg,compliant_deg\n";
    for (int i = 0; i < ns; ++i)
      for (int j = 0; j < nseed; ++j) {
        const Cell& c = cells[i * nseed + j];
        os << fmt_num(cc.spacing_bl[i]) << ',' << cc.seeds[j] << ',' << fmt_num(og::rad2deg(c.open)) << ','
           << fmt_num(og::rad2deg(c.compliant)) << '\n';
      }
  });
  og::PlotSeries open{"open loop", {}, {}, {}}, comp{"compliant", {}, {}, {}};
  og::write_atomically(ctx.out / "compliance.csv", [&](std::ostream& os) {
    os << "# omegagait-csv v1\nspacing_bl,open_mean_deg,open_std_deg,compliant_mean_deg,compliant_std_deg\n";
    for (int i = 0; i < ns; ++i) {
      std::vector<double> o, c;
      for (int j = 0; j < nseed; ++j) {
        o.push_back(og::rad2deg(cells[i * nseed + j].open));
        c.push_back(og::rad2deg(cells[i * nseed + j].compliant));
      }
      os << fmt_num(cc.spacing_bl[i]) << ',' << fmt_num(mean(o)) << ',' << fmt_num(stddev(o)) << ','
         << fmt_num(mean(c)) << ',' << fmt_num(stddev(c)) << '\n';
      open.x.push_back(cc.spacing_bl[i]);
      open.y.push_back(mean(o));
      open.y_err.push_back(stddev(o));
      comp.x.push_back(cc.spacing_bl[i]);
      comp.y.push_back(mean(c));
      comp.y_err.push_back(stddev(c));
      std::printf("spacing %.3g BL: open %.3f +- %.3f, compliant %.3f +- %.3f deg/cycle\n", cc.spacing_bl[i],
                  mean(o), stddev(o), mean(c), stddev(c));
    }
  });
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < nseed; ++j)
      og::write_atomically(ctx.out / "amplitude" / ("spacing_" + fmt_num(cc.spacing_bl[i], 4) + "_seed_" +
                                                    std::to_string(cc.seeds[j]) + ".csv"),
                           [&](std::ostream& os) { og::write_amplitude_csv(os, cells[i * nseed + j].history); });
  if (ctx.svg)
    og::write_atomically(ctx.out / "compliance.svg", [&](std::ostream& os) {
      og::write_line_plot_svg(os, "Open-loop vs compliant turning", "peg spacing (BL)",
                              "turning angle (deg/cycle)", {open, comp});
    });
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  og::configure_logging();
  CLI::App app{"Two-wave turning gait toolkit: simulation, sweeps, height functions, compliance."};
  app.require_subcommand(1);
  Options opt;
  std::map<std::string, std::function<int(const Context&)>> commands{
      {"simulate", cmd_simulate}, {"optimize", cmd_optimize}, {"sweep", cmd_sweep},
      {"heightfun", cmd_heightfun}, {"compliance", cmd_compliance}};
  const std::map<std::string, std::string> help{
      {"simulate", "Integrate the configured gait and report its turning angle"},
      {"optimize", "Optimize the gait family at the configured k_f, k_o"},
      {"sweep", "Optimize over k_o / joint limit / k_f / N lists"},
      {"heightfun", "Height functions and feasibility maps on the three sub-shape spaces"},
      {"compliance", "Open-loop vs compliant turning on peg boards"}};
  for (const auto& [name, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", opt.config, "Experiment configuration file")->required();
    sub->add_option("--out", opt.out, "Output directory (overrides [output] dir)");
    sub->add_option("--jobs", opt.jobs, "Worker threads (default: available parallelism)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--format", opt.format, "csv or csv+svg")->check(CLI::IsMember({"csv", "csv+svg"}));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  try {
    for (const auto& [name, fn] : commands)
      if (app.got_subcommand(name)) return fn(make_context(opt));
  } catch (const og::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const og::ParameterError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const og::SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  } catch (const og::DegenerateAxisError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitOther;
  }
  return kExitOther;
}
