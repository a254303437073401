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

// Acceptance run: prints one PASS/FAIL line per criterion.
//
//   acceptance [--strict] [criterion numbers...]
//
// Without --strict the exit status reflects only crashes, so a red criterion
// is reported without failing the surrounding test run.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "omegagait/compliance.hpp"
#include "omegagait/dynamics.hpp"
#include "omegagait/geomech.hpp"
#include "omegagait/optimizer.hpp"
#include "oracles.hpp"

namespace og = omegagait;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ------------------------------------------------------------ optimization

struct Point {
  int n_joints;
  double theta_deg;
  double k_f;
  double k_o;
  auto key() const { return std::make_tuple(n_joints, theta_deg, k_f, k_o); }
  bool operator<(const Point& o) const { return key() < o.key(); }
};

struct Optimum {
  double deg = std::nan("");
  og::GaitParamVector params;
  std::string error;
};

og::RobotModel robot_for(const Point& p) {
  og::RobotModel r;
  r.n_joints = p.n_joints;
  r.joint_limit = og::deg2rad(p.theta_deg);
  return r;
}

class OptimumCache {
 public:
  void request(const Point& p) { pending_.insert(p); }

  void run_all() {
    std::vector<Point> todo(pending_.begin(), pending_.end());
    pending_.clear();
    std::vector<Optimum> out(todo.size());
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    auto worker = [&] {
      for (std::size_t i = next++; i < todo.size(); i = next++) {
        const auto t0 = std::chrono::steady_clock::now();
        const Point& p = todo[i];
        try {
          const auto ms = og::optimize_gait_multistart(robot_for(p), p.k_f, p.k_o, og::OptimizerSettings{});
          out[i].deg = og::rad2deg(ms.best.best().objective);
          out[i].params = ms.best.best().params;
        } catch (const std::exception& e) {
          out[i].error = e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::lock_guard<std::mutex> lock(mu);
        std::printf("  optimized N=%d theta_max=%g k_f=%g k_o=%g: %.2f deg/cycle (%.0f s)%s%s\n", p.n_joints,
                    p.theta_deg, p.k_f, p.k_o, out[i].deg, secs, out[i].error.empty() ? "" : " error: ",
                    out[i].error.c_str());
        std::fflush(stdout);
      }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), todo.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (std::size_t i = 0; i < todo.size(); ++i) done_[todo[i]] = out[i];
  }

  const Optimum& at(const Point& p) const { return done_.at(p); }

 private:
  std::set<Point> pending_;
  std::map<Point, Optimum> done_;
};

const std::vector<double> kKoGrid{0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5};

double grid_argmax(const OptimumCache& c, int n, std::string* row) {
  double best = -1e300, arg = std::nan("");
  for (double ko : kKoGrid) {
    const double v = c.at({n, 90, 1.5, ko}).deg;
    *row += fmt("%s%.1f", row->empty() ? "" : " ", v);
    if (v > best) {
      best = v;
      arg = ko;
    }
  }
  return arg;
}

Outcome criterion_1(const OptimumCache& c) {
  std::string row;
  const double arg = grid_argmax(c, 8, &row);
  return {std::abs(arg - 1.0) <= 0.25 + 1e-12, fmt("argmax k_o = %.2f; deg/cycle over k_o 0..1.5: %s", arg, row.c_str())};
}

Outcome criterion_2(const OptimumCache& c) {
  const double a = c.at({8, 60, 1.5, 1.0}).deg, b = c.at({8, 75, 1.5, 1.0}).deg, d = c.at({8, 90, 1.5, 1.0}).deg;
  const bool increasing = a < b && b < d;
  const double ratio = d / a;
  return {increasing && ratio >= 3.0,
          fmt("theta_max 60/75/90: %.2f / %.2f / %.2f deg/cycle, increasing=%s, ratio 90/60 = %.2f (need >= 3)", a, b, d,
              increasing ? "yes" : "no", ratio)};
}

Outcome criterion_3(const OptimumCache& c) {
  const double d = c.at({8, 90, 1.5, 1.0}).deg;
  return {d >= 70.0 && d <= 140.0, fmt("optimized omega turn %.2f deg/cycle (band 70..140)", d)};
}

Outcome criterion_4(const OptimumCache& c) {
  std::vector<double> omega;
  bool beats = true;
  std::string detail;
  for (double kf : {1.0, 1.5, 2.0}) {
    const double w = c.at({8, 90, kf, 1.0}).deg, off = c.at({8, 90, kf, 0.0}).deg, geo = c.at({8, 90, kf, kf}).deg;
    omega.push_back(w);
    // At k_f = 1 the geometric turn is the omega turn itself.
    beats = beats && w > off && (kf == 1.0 ? w >= geo : w > geo);
    detail += fmt("k_f=%.1f omega %.2f offset %.2f geometric %.2f; ", kf, w, off, geo);
  }
  const auto [lo, hi] = std::minmax_element(omega.begin(), omega.end());
  const double spread = (*hi - *lo) / *hi;
  return {beats && spread <= 0.40, detail + fmt("relative spread %.1f%% (limit 40%%), omega beats both: %s", 100 * spread,
                                                beats ? "yes" : "no")};
}

Outcome criterion_5(const OptimumCache& c) {
  std::string r6, r7, r8;
  const double a6 = grid_argmax(c, 6, &r6), a7 = grid_argmax(c, 7, &r7), a8 = grid_argmax(c, 8, &r8);
  const bool ok = std::abs(a6 - 0.75) <= 0.25 + 1e-12 && std::abs(a7 - 0.75) <= 0.25 + 1e-12 &&
                  std::abs(a8 - 1.0) <= 0.25 + 1e-12;
  return {ok, fmt("argmax N=6: %.2f [%s]; N=7: %.2f [%s]; N=8: %.2f", a6, r6.c_str(), a7, r7.c_str(), a8)};
}

// ------------------------------------------------------------ direct checks

Outcome criterion_6(const og::GaitParamVector& best) {
  og::RobotModel r;
  og::FrictionModel fm;
  auto rot = [&](const og::RobotModel& rr, const og::FrictionModel& f, double w) {
    return og::rad2deg(og::angular_displacement(og::integrate_cycle(rr, og::family_gait(best, 1.5, 1.0, w), f, 256)));
  };
  const double base = rot(r, fm, og::kDefaultTemporalFreq);
  double worst = 0.0;
  std::string detail = fmt("baseline %.4f deg/cycle;", base);
  auto check = [&](const char* name, double v) {
    const double rel = std::abs(v - base) / std::abs(base);
    worst = std::max(worst, rel);
    detail += fmt(" %s %.3g%%", name, 100 * rel);
  };
  for (double mu : {0.1, 1.0}) {
    og::FrictionModel f = fm;
    f.mu = mu;
    check(mu < 0.5 ? "mu=0.1" : "mu=1", rot(r, f, og::kDefaultTemporalFreq));
  }
  check("w=0.1Hz", rot(r, fm, 0.1));
  check("w=0.4Hz", rot(r, fm, 0.4));
  og::RobotModel heavy = r;
  heavy.module_mass *= 10;
  check("mass*10", rot(heavy, fm, og::kDefaultTemporalFreq));
  return {worst < 0.01, detail};
}

Outcome criterion_7() {
  og::RobotModel r;
  og::FrictionModel fm;
  og::SolverOptions opts;
  std::mt19937_64 rng(2024);
  double worst = 0.0, worst_res = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto cs = og::contact_set(r, oracle::random_shape(rng, r.n_joints, r.joint_limit / 2),
                                    oracle::random_rates(rng, r.n_joints, 1.0), fm);
    og::BodyVelocitySolver solver(fm, opts);
    const auto a = solver.solve(cs);
    const auto b = oracle::brute_force_twist(cs, fm);
    worst = std::max({worst, std::abs(a.vx - b.vx), std::abs(a.vy - b.vy), std::abs(a.wz - b.wz)});
    worst_res = std::max(worst_res, solver.residual(cs, og::net_wrench(cs, a, fm)));
  }
  return {worst <= 1e-4 && worst_res < opts.rel_tol,
          fmt("max component error %.2e (limit 1e-4), max relative residual %.2e (tolerance %.0e)", worst, worst_res,
              opts.rel_tol)};
}

Outcome criterion_8() {
  og::RobotModel r;
  og::FrictionModel fm;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double amax = og::deg2rad(10);
  int ok = 0, relative = 0;
  std::string detail;
  for (int k = 0; k < 10; ++k) {
    const double gamma = 1.0 + u01(rng);
    const og::GaitParamVector p{amax / (gamma + 1) * u01(rng), gamma, og::kTwoPi * u01(rng), amax / 2 * u01(rng),
                                og::kTwoPi * u01(rng), og::kTwoPi * u01(rng)};
    const auto gait = og::family_gait(p, 1.5, 1.0);
    const double sim = og::rad2deg(og::angular_displacement(og::integrate_cycle(r, gait, fm, 256)));
    const og::SubShapeSpec spec{og::SubSpace::kTauFTauO, p, 1.5, 1.0, r.joint_limit};
    const auto hf = og::height_function(r, spec, og::kDefaultGridResolution, fm);
    const double si = og::rad2deg(og::surface_integral(hf, og::project_path(spec, og::gait_path(gait))).total());
    const double tol = std::max(1.0, 0.15 * std::max(std::abs(si), std::abs(sim)));
    const bool good = std::abs(si - sim) <= tol;
    ok += good;
    relative += std::abs(si - sim) <= 0.15 * std::max(std::abs(si), std::abs(sim));
    detail += fmt("%s%.3f/%.3f", k ? " " : "", si, sim);
  }
  return {ok == 10, fmt("%d/10 within tolerance (%d/10 within 15%% without the 1 deg floor); surface integral/simulated deg: ",
                        ok, relative) + detail};
}

Outcome criterion_9() {
  og::RobotModel r;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const double amp = 0.8 * std::abs(u(rng)), k = 2.0 * std::abs(u(rng)), kappa = 0.5 * u(rng), w = 0.1 + 0.3 * std::abs(u(rng));
    const auto g = og::offset_turn_gait(amp, w, k, kappa);
    for (int j = 0; j < 100; ++j) {
      const double t = g.period() * j / 100;
      for (int i = 0; i < r.n_joints; ++i)
        worst = std::max(worst, std::abs(og::joint_angle(g, r, t, i) - oracle::offset_turn_angle(amp, w, k, kappa, r.n_joints, t, i)));
    }
  }
  return {worst <= 1e-12, fmt("max pointwise difference %.2e rad over 5 gaits x 100 times x N joints", worst)};
}

Outcome criterion_10() {
  og::AdmittanceState s = og::AdmittanceState::at_rest(og::kPi / 2);
  const Eigen::Vector2d x0 = Eigen::Vector2d::Constant(og::deg2rad(2.0));
  s.amp = s.A0 + x0;
  const Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2, 8);
  const Eigen::VectorXd tau = Eigen::VectorXd::Zero(8);
  const double dt = 1e-3;
  double worst = 0.0, at3 = 0.0;
  for (int k = 1; k <= 5000; ++k) {
    s = og::admittance_step(s, tau, J, dt);
    for (int c = 0; c < 2; ++c) {
      const double exact = oracle::damped_free_response(s.M(c, c), s.B(c, c), s.K(c, c), x0[c], 0.0, k * dt);
      worst = std::max(worst, std::abs(s.amp[c] - s.A0[c] - exact) / x0[c]);
    }
    if (k >= 3000) at3 = std::max(at3, og::rad2deg((s.amp - s.A0).cwiseAbs().maxCoeff()));
  }
  return {worst <= 0.01 && at3 <= 0.1,
          fmt("max error %.3f%% of the 2 deg initial offset over 5 s; max |A - A0| after 3 s = %.4f deg", 100 * worst, at3)};
}

Outcome criterion_11(const og::GaitParamVector& best) {
  og::RobotModel r;
  og::FrictionModel fm;
  const auto gait = og::family_gait(best, 1.5, 1.0);
  og::ComplianceSettings base;
  base.admittance = og::AdmittanceState::at_rest(r.joint_limit);
  bool ok = true;
  std::string detail;
  for (double sp : {0.2, 0.3, 0.4, 0.5, 0.6}) {
    const auto board = og::PegBoard::hexagonal(r, sp, 0.02, 500.0, 3.0);
    std::vector<double> open, comp;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto start = og::random_start_pose(r, gait, board, base.admittance, seed);
      og::ComplianceSettings s = base;
      s.compliant = false;
      open.push_back(og::rad2deg(og::angular_displacement(og::simulate_compliant_turn(r, gait, board, fm, s, start).trajectory)));
      s.compliant = true;
      comp.push_back(og::rad2deg(og::angular_displacement(og::simulate_compliant_turn(r, gait, board, fm, s, start).trajectory)));
    }
    auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
    auto sd = [&](const std::vector<double>& v) {
      const double m = mean(v);
      double a = 0.0;
      for (double x : v) a += (x - m) * (x - m);
      return std::sqrt(a / (v.size() - 1));
    };
    const bool here = mean(comp) >= mean(open) && sd(comp) <= sd(open);
    ok = ok && here;
    detail += fmt("%s%.1f BL open %.2f+-%.2f compliant %.2f+-%.2f %s", detail.empty() ? "" : "; ", sp, mean(open), sd(open),
                  mean(comp), sd(comp), here ? "ok" : "worse");
  }
  return {ok, detail};
}

Outcome criterion_12() {
  og::RobotModel r;
  std::mt19937_64 rng(12);
  int agree = 0, disagree = 0, band = 0, colliding = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto s = oracle::random_shape(rng, r.n_joints, r.joint_limit);
    const auto truth = oracle::collision_truth(r, s, 2e-3);
    if (truth == oracle::CollisionTruth::kBoundary) {
      ++band;
      continue;
    }
    const bool hit = truth == oracle::CollisionTruth::kColliding;
    colliding += hit;
    (og::self_collides(r, s) == hit ? agree : disagree)++;
  }
  return {disagree == 0, fmt("%d agree, %d disagree, %d inside the 2 mm band (%d colliding)", agree, disagree, band, colliding)};
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  std::set<int> only;
  for (int a = 1; a < argc; ++a) {
    const std::string s = argv[a];
    if (s == "--strict")
      strict = true;
    else
      only.insert(std::stoi(s));
  }
  auto wanted = [&](int c) { return only.empty() || only.count(c); };

  OptimumCache cache;
  for (int c : {1, 2, 3, 4, 5, 6, 11})
    if (wanted(c)) cache.request({8, 90, 1.5, 1.0});
  if (wanted(1) || wanted(5))
    for (double ko : kKoGrid) cache.request({8, 90, 1.5, ko});
  if (wanted(5))
    for (int n : {6, 7})
      for (double ko : kKoGrid) cache.request({n, 90, 1.5, ko});
  if (wanted(2))
    for (double th : {60.0, 75.0}) cache.request({8, th, 1.5, 1.0});
  if (wanted(4))
    for (double kf : {1.0, 1.5, 2.0})
      for (double ko : {0.0, 1.0, kf}) cache.request({8, 90, kf, ko});
  std::printf("acceptance: running optimizations\n");
  std::fflush(stdout);
  cache.run_all();

  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, [&] { return criterion_1(cache); }},
      {2, [&] { return criterion_2(cache); }},
      {3, [&] { return criterion_3(cache); }},
      {4, [&] { return criterion_4(cache); }},
      {5, [&] { return criterion_5(cache); }},
      {6, [&] { return criterion_6(cache.at({8, 90, 1.5, 1.0}).params); }},
      {7, criterion_7},
      {8, criterion_8},
      {9, criterion_9},
      {10, criterion_10},
      {11, [&] { return criterion_11(cache.at({8, 90, 1.5, 1.0}).params); }},
      {12, criterion_12},
  };
  int failed = 0;
  for (const auto& [id, fn] : criteria) {
    if (!wanted(id)) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %d failed\n", failed);
  return strict && failed ? 1 : 0;
}
