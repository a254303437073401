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

// Height functions on two-dimensional slices of the gait shape space.
//
// The shape variable is m = [A_f, tau_f, A_o, tau_o]. Freezing two of the
// three simple functions f1, f2, f3 leaves a 2-D sub-shape space:
//   (tau_f, A_f)   with f2, f3 frozen
//   (tau_o, A_o)   with f1, f3 frozen
//   (tau_f, tau_o) with f1, f2 frozen
// Here f3 is written tau_o = tau_f + psi, matching the template's phases.
//
// The local connection is sampled by solving the quasi-static balance for a
// unit rate along each free coordinate. Its rotational row's curl is the
// height function; rotation over a closed gait path equals the height
// function integrated over the enclosed area plus, for paths that wrap a
// cyclic axis, the circulation along the reference lines used to close them.

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "omegagait/dynamics.hpp"
#include "omegagait/errors.hpp"
#include "omegagait/gait.hpp"
#include "omegagait/model.hpp"
#include "omegagait/optimizer.hpp"

namespace omegagait {

inline constexpr int kDefaultGridResolution = 65;

enum class SubSpace { kTauFAmpF, kTauOAmpO, kTauFTauO };

inline const char* to_string(SubSpace s) {
  switch (s) {
    case SubSpace::kTauFAmpF: return "tau_f,A_f";
    case SubSpace::kTauOAmpO: return "tau_o,A_o";
    case SubSpace::kTauFTauO: return "tau_f,tau_o";
  }
  return "?";
}

struct Axis {
  double lo = 0.0;
  double hi = kTwoPi;
  bool cyclic = true;
};

/// A 2-D slice of shape space plus the frozen functions that complete it.
struct SubShapeSpec {
  SubSpace which = SubSpace::kTauFTauO;
  GaitParamVector frozen;  // supplies the two frozen simple functions
  double k_f = 1.5;
  double k_o = 1.0;
  double amp_max = kPi / 2;  // upper end of an amplitude axis

  Axis x_axis() const { return {0.0, kTwoPi, true}; }
  Axis y_axis() const {
    return which == SubSpace::kTauFTauO ? Axis{0.0, kTwoPi, true} : Axis{0.0, amp_max, false};
  }

  /// Full shape variable at slice coordinates (x, y).
  ShapeVariable shape_variable(double x, double y) const {
    const AmplitudeProfile f1 = AmplitudeProfile::f1(frozen.a_f, frozen.gamma, frozen.phi_f);
    const AmplitudeProfile f2 = AmplitudeProfile::f2(frozen.a_o, frozen.phi_o);
    switch (which) {
      case SubSpace::kTauFAmpF: {
        const double to = x + frozen.psi;
        return {y, x, f2.value(to), to};
      }
      case SubSpace::kTauOAmpO: {
        const double tf = x - frozen.psi;
        return {f1.value(tf), tf, y, x};
      }
      case SubSpace::kTauFTauO:
        return {f1.value(x), x, f2.value(y), y};
    }
    return {};
  }

  /// d m / d x and d m / d y.
  std::array<ShapeVariable, 2> shape_variable_tangents(double x, double y) const {
    const AmplitudeProfile f1 = AmplitudeProfile::f1(frozen.a_f, frozen.gamma, frozen.phi_f);
    const AmplitudeProfile f2 = AmplitudeProfile::f2(frozen.a_o, frozen.phi_o);
    switch (which) {
      case SubSpace::kTauFAmpF:
        return {ShapeVariable{0.0, 1.0, f2.slope(x + frozen.psi), 1.0}, ShapeVariable{1.0, 0.0, 0.0, 0.0}};
      case SubSpace::kTauOAmpO:
        return {ShapeVariable{f1.slope(x - frozen.psi), 1.0, 0.0, 1.0}, ShapeVariable{0.0, 0.0, 1.0, 0.0}};
      case SubSpace::kTauFTauO:
        return {ShapeVariable{f1.slope(x), 1.0, 0.0, 0.0}, ShapeVariable{0.0, 0.0, f2.slope(y), 1.0}};
    }
    return {};
  }

  /// Projection of a 4-D shape variable onto the slice coordinates.
  Eigen::Vector2d project(const ShapeVariable& m) const {
    switch (which) {
      case SubSpace::kTauFAmpF: return {m[1], m[0]};
      case SubSpace::kTauOAmpO: return {m[3], m[2]};
      case SubSpace::kTauFTauO: return {m[1], m[3]};
    }
    return {};
  }
};

/// Joint angles of the template at shape variable m.
inline ShapeState shape_from_variable(const RobotModel& robot, double k_f, double k_o,
                                      const ShapeVariable& m) {
  ShapeState s = ShapeState::zeros(robot.n_joints);
  for (int i = 0; i < robot.n_joints; ++i)
    s[i] = m[0] * std::sin(m[1] + kTwoPi * k_f * i / robot.n_joints) +
           m[2] * std::sin(m[3] + kTwoPi * k_o * i / robot.n_joints);
  return s;
}

/// d theta / d m contracted with a shape-variable tangent dm.
inline std::vector<double> shape_rate_from_variable(const RobotModel& robot, double k_f, double k_o,
                                                    const ShapeVariable& m,
                                                    const ShapeVariable& dm) {
  std::vector<double> v(robot.n_joints);
  for (int i = 0; i < robot.n_joints; ++i) {
    const double af = m[1] + kTwoPi * k_f * i / robot.n_joints;
    const double ao = m[3] + kTwoPi * k_o * i / robot.n_joints;
    v[i] = dm[0] * std::sin(af) + dm[1] * m[0] * std::cos(af) + dm[2] * std::sin(ao) +
           dm[3] * m[2] * std::cos(ao);
  }
  return v;
}

inline ShapeState slice_shape(const RobotModel& robot, const SubShapeSpec& spec, double x,
                              double y) {
  return shape_from_variable(robot, spec.k_f, spec.k_o, spec.shape_variable(x, y));
}

/// Body velocity per unit rate of each free coordinate at (x, y).
inline std::array<BodyVelocity, 2> connection_row(const RobotModel& robot,
                                                  const SubShapeSpec& spec, double x, double y,
                                                  const FrictionModel& fm, double rate = 1.0) {
  const ShapeVariable m = spec.shape_variable(x, y);
  const auto tangents = spec.shape_variable_tangents(x, y);
  const ShapeState shape = shape_from_variable(robot, spec.k_f, spec.k_o, m);
  std::array<BodyVelocity, 2> out;
  for (int c = 0; c < 2; ++c) {
    ShapeVariable dm = tangents[c];
    for (double& d : dm) d *= rate;
    BodyVelocitySolver solver(fm);
    out[c] = solver.solve(contact_set(robot, shape,
                                      shape_rate_from_variable(robot, spec.k_f, spec.k_o, m, dm), fm));
  }
  return out;
}

/// Uniform grid over a slice. Cyclic axes hold n points spaced (hi - lo) / n
/// with no duplicated endpoint; other axes hold n points including both ends.
struct GridAxes {
  std::vector<double> x;
  std::vector<double> y;
  Axis x_axis;
  Axis y_axis;

  double dx() const { return x.size() > 1 ? x[1] - x[0] : 0.0; }
  double dy() const { return y.size() > 1 ? y[1] - y[0] : 0.0; }

  static std::vector<double> make(const Axis& a, int n) {
    std::vector<double> v(n);
    const double step = a.cyclic ? (a.hi - a.lo) / n : (a.hi - a.lo) / (n - 1);
    for (int i = 0; i < n; ++i) v[i] = a.lo + i * step;
    return v;
  }
  static GridAxes make(const Axis& xa, const Axis& ya, int n) {
    return {make(xa, n), make(ya, n), xa, ya};
  }
};

/// values(j, i) is at (x[i], y[j]); NaN marks masked (infeasible) cells.
/// conn_x / conn_y hold the rotational connection components (rad per unit
/// coordinate) when the grid was computed from the solver; they are empty for
/// grids built by hand.
struct HeightFunctionGrid {
  SubSpace which = SubSpace::kTauFTauO;
  GridAxes axes;
  Eigen::MatrixXd values;
  Eigen::MatrixXd conn_x;
  Eigen::MatrixXd conn_y;

  int resolution() const { return static_cast<int>(axes.x.size()); }
  bool has_connection() const { return conn_x.size() > 0; }

  double max_abs() const {
    double m = 0.0;
    for (Eigen::Index k = 0; k < values.size(); ++k)
      if (std::isfinite(values(k))) m = std::max(m, std::abs(values(k)));
    return m;
  }
};

struct FeasibilityGrid {
  SubSpace which = SubSpace::kTauFTauO;
  GridAxes axes;
  std::vector<std::vector<bool>> feasible;  // [j][i]

  bool at(int i, int j) const { return feasible[j][i]; }
  std::size_t count() const {
    std::size_t n = 0;
    for (const auto& row : feasible) n += std::count(row.begin(), row.end(), true);
    return n;
  }
};

inline void check_resolution(int resolution) {
  if (resolution < 17) throw ParameterError("grid resolution must be >= 17");
}

inline FeasibilityGrid feasibility_map(const RobotModel& robot, const SubShapeSpec& spec,
                                       int resolution = kDefaultGridResolution) {
  check_resolution(resolution);
  FeasibilityGrid fg;
  fg.which = spec.which;
  fg.axes = GridAxes::make(spec.x_axis(), spec.y_axis(), resolution);
  fg.feasible.assign(resolution, std::vector<bool>(resolution, false));
  for (int j = 0; j < resolution; ++j)
    for (int i = 0; i < resolution; ++i)
      fg.feasible[j][i] = is_feasible(robot, slice_shape(robot, spec, fg.axes.x[i], fg.axes.y[j]));
  return fg;
}

namespace detail {

// d f / d(axis) at index k of a sampled line. Fourth-order central stencil,
// wrapped on cyclic axes; near the ends of a bounded axis it drops to the
// second-order central or one-sided form.
template <typename Get>
double line_derivative(Get f, int k, int n, double h, bool cyclic) {
  if (cyclic) {
    auto at = [&](int m) { return f(((k + m) % n + n) % n); };
    return (8 * (at(1) - at(-1)) - (at(2) - at(-2))) / (12 * h);
  }
  if (k == 0) return (-3 * f(0) + 4 * f(1) - f(2)) / (2 * h);
  if (k == n - 1) return (3 * f(n - 1) - 4 * f(n - 2) + f(n - 3)) / (2 * h);
  if (k == 1 || k == n - 2) return (f(k + 1) - f(k - 1)) / (2 * h);
  return (8 * (f(k + 1) - f(k - 1)) - (f(k + 2) - f(k - 2))) / (12 * h);
}

}  // namespace detail

/// Curl of a sampled rotational connection: d conn_y / dx - d conn_x / dy.
inline Eigen::MatrixXd connection_curl(const GridAxes& axes, const Eigen::MatrixXd& conn_x,
                                       const Eigen::MatrixXd& conn_y) {
  const int nx = static_cast<int>(axes.x.size()), ny = static_cast<int>(axes.y.size());
  Eigen::MatrixXd curl(ny, nx);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double dcy_dx = detail::line_derivative([&](int k) { return conn_y(j, k); }, i, nx,
                                                    axes.dx(), axes.x_axis.cyclic);
      const double dcx_dy = detail::line_derivative([&](int k) { return conn_x(k, i); }, j, ny,
                                                    axes.dy(), axes.y_axis.cyclic);
      curl(j, i) = dcy_dx - dcx_dy;
    }
  return curl;
}

/// Samples the connection on the grid and takes its curl. Cells whose shape
/// is infeasible are masked with NaN; cells where the solve fails are masked
/// too and reported through `failures` when given.
inline HeightFunctionGrid height_function(const RobotModel& robot, const SubShapeSpec& spec,
                                          int resolution, const FrictionModel& fm,
                                          std::vector<std::string>* failures = nullptr) {
  check_resolution(resolution);
  HeightFunctionGrid hf;
  hf.which = spec.which;
  hf.axes = GridAxes::make(spec.x_axis(), spec.y_axis(), resolution);
  const int n = resolution;
  hf.conn_x.resize(n, n);
  hf.conn_y.resize(n, n);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      try {
        const auto row = connection_row(robot, spec, hf.axes.x[i], hf.axes.y[j], fm);
        hf.conn_x(j, i) = row[0].wz;
        hf.conn_y(j, i) = row[1].wz;
      } catch (const std::runtime_error& e) {
        if (failures)
          failures->push_back("cell (" + std::to_string(i) + "," + std::to_string(j) + "): " + e.what());
        hf.conn_x(j, i) = hf.conn_y(j, i) = 0.0;
        bad(j, i) = 1.0;
      }
    }
  hf.values = connection_curl(hf.axes, hf.conn_x, hf.conn_y);
  const FeasibilityGrid fg = feasibility_map(robot, spec, resolution);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (!fg.at(i, j) || bad(j, i) != 0.0)
        hf.values(j, i) = std::numeric_limits<double>::quiet_NaN();
  return hf;
}

/// Bilinear interpolation on grid samples; cyclic axes wrap.
inline double grid_interpolate(const GridAxes& axes, const Eigen::MatrixXd& field, double x,
                               double y) {
  auto locate = [](const std::vector<double>& v, const Axis& a, double q, int& i0, int& i1,
                   double& t) {
    const int n = static_cast<int>(v.size());
    const double step = v[1] - v[0];
    if (a.cyclic) {
      const double u = std::fmod(q - a.lo, a.hi - a.lo);
      const double w = (u < 0 ? u + (a.hi - a.lo) : u) / step;
      i0 = static_cast<int>(std::floor(w)) % n;
      i1 = (i0 + 1) % n;
      t = w - std::floor(w);
    } else {
      const double w = std::clamp((q - a.lo) / step, 0.0, static_cast<double>(n - 1));
      i0 = std::min(static_cast<int>(std::floor(w)), n - 2);
      i1 = i0 + 1;
      t = w - i0;
    }
  };
  int x0, x1, y0, y1;
  double tx, ty;
  locate(axes.x, axes.x_axis, x, x0, x1, tx);
  locate(axes.y, axes.y_axis, y, y0, y1, ty);
  return (1 - ty) * ((1 - tx) * field(y0, x0) + tx * field(y0, x1)) +
         ty * ((1 - tx) * field(y1, x0) + tx * field(y1, x1));
}

/// Rotation assigned to a closed path by the height function.
struct SurfaceIntegral {
  double enclosed = 0.0;   // height function over the enclosed region(s)
  double reference = 0.0;  // circulation along the closing reference lines
  bool touches_masked = false;

  double total() const { return enclosed + reference; }
};

namespace detail {

// Winding number of a closed polygon around p.
inline int winding_number(const std::vector<Eigen::Vector2d>& poly, const Eigen::Vector2d& p) {
  int wn = 0;
  const std::size_t n = poly.size();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Eigen::Vector2d& a = poly[k];
    const Eigen::Vector2d& b = poly[k + 1];
    const double cross = (b.x() - a.x()) * (p.y() - a.y()) - (p.x() - a.x()) * (b.y() - a.y());
    if (a.y() <= p.y()) {
      if (b.y() > p.y() && cross > 0) ++wn;
    } else if (b.y() <= p.y() && cross < 0) {
      --wn;
    }
  }
  return wn;
}

// Appends a straight segment with interior points every `step`.
inline void append_segment(std::vector<Eigen::Vector2d>& poly, const Eigen::Vector2d& to,
                           double step) {
  const Eigen::Vector2d from = poly.back();
  const int pieces = std::max(1, static_cast<int>(std::ceil((to - from).norm() / step)));
  for (int k = 1; k <= pieces; ++k) poly.push_back(from + (to - from) * (double(k) / pieces));
}

}  // namespace detail

inline constexpr int kScanlinesPerCell = 8;

// Largest grid-node abscissa (lifted) not above x.
inline double xa0(const GridAxes& axes, double x) {
  const double dx = axes.dx();
  return axes.x_axis.lo + std::floor((x - axes.x_axis.lo) / dx) * dx;
}

/// Integrates the height function over the region a closed path encloses.
///
/// The path is lifted to the universal cover (cyclic coordinates unwrapped).
/// A lift that does not close is closed with axis-aligned reference lines:
/// back along x at the end's y, then along y at the start's x. The enclosed
/// region is integrated scanline by scanline, weighting the wrapped field by
/// winding number. When the grid carries the connection, the circulation
/// along the reference lines is added so the total is the rotation of the
/// path itself.
inline SurfaceIntegral surface_integral(const HeightFunctionGrid& hf,
                                        const std::vector<Eigen::Vector2d>& path) {
  if (path.size() < 3) throw ParameterError("surface_integral needs a closed path");
  const Axis& xa = hf.axes.x_axis;
  const Axis& ya = hf.axes.y_axis;
  const double px = xa.hi - xa.lo, py = ya.hi - ya.lo;

  // Lift.
  std::vector<Eigen::Vector2d> lift{path.front()};
  for (std::size_t k = 1; k < path.size(); ++k) {
    Eigen::Vector2d d = path[k] - path[k - 1];
    if (xa.cyclic) d.x() = std::remainder(d.x(), px);
    if (ya.cyclic) d.y() = std::remainder(d.y(), py);
    lift.push_back(lift.back() + d);
  }
  const Eigen::Vector2d gap = lift.back() - lift.front();
  const double tol = 1e-6 * std::max(px, py);
  auto whole_turns = [&](double g, double period, bool cyclic) {
    if (!cyclic) return std::abs(g) <= tol;
    return std::abs(std::remainder(g, period)) <= tol;
  };
  if (!whole_turns(gap.x(), px, xa.cyclic) || !whole_turns(gap.y(), py, ya.cyclic))
    throw ParameterError("surface_integral path is not closed");

  SurfaceIntegral out;
  std::vector<Eigen::Vector2d> poly = lift;
  const double step = 0.25 * std::min(hf.axes.dx(), hf.axes.dy());
  const Eigen::Vector2d end = lift.back(), start = lift.front();
  if ((end - start).norm() > tol) {
    const Eigen::Vector2d corner(start.x(), end.y());
    const std::size_t closing_begin = poly.size() - 1;
    detail::append_segment(poly, corner, step);
    detail::append_segment(poly, start, step);
    // The path's rotation is the loop integral minus the closing legs.
    if (hf.has_connection()) {
      double closing = 0.0;
      for (std::size_t k = closing_begin; k + 1 < poly.size(); ++k) {
        const Eigen::Vector2d mid = 0.5 * (poly[k] + poly[k + 1]);
        const Eigen::Vector2d d = poly[k + 1] - poly[k];
        closing += grid_interpolate(hf.axes, hf.conn_x, mid.x(), mid.y()) * d.x() +
                   grid_interpolate(hf.axes, hf.conn_y, mid.x(), mid.y()) * d.y();
      }
      out.reference = -closing;
    }
  } else {
    poly.back() = poly.front();
  }

  // Scanline quadrature over the lifted polygon. Rows sit at sub-cell
  // spacing; along a row the winding number is constant between edge
  // crossings and the bilinear field is linear between grid nodes, so each
  // piece integrates exactly.
  double miny = poly[0].y(), maxy = miny;
  for (const auto& p : poly) {
    miny = std::min(miny, p.y());
    maxy = std::max(maxy, p.y());
  }
  const double dx = hf.axes.dx(), dy = hf.axes.dy();
  const int rows = std::max(1, static_cast<int>(std::ceil((maxy - miny) / (dy / kScanlinesPerCell))));
  const double hy = (maxy - miny) / rows;
  std::vector<std::pair<double, int>> hits;
  for (int r = 0; r < rows; ++r) {
    const double y = miny + (r + 0.5) * hy;
    hits.clear();
    for (std::size_t k = 0; k + 1 < poly.size(); ++k) {
      const Eigen::Vector2d& a = poly[k];
      const Eigen::Vector2d& b = poly[k + 1];
      const bool up = a.y() <= y && b.y() > y;
      const bool down = b.y() <= y && a.y() > y;
      if (!up && !down) continue;
      const double x = a.x() + (y - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      hits.emplace_back(x, up ? 1 : -1);
    }
    std::sort(hits.begin(), hits.end());
    int w = 0;
    for (std::size_t k = hits.size(); k-- > 1;) {
      w += hits[k].second;
      if (w == 0) continue;
      const double xa = hits[k - 1].first, xb = hits[k].first;
      // Breakpoints at grid nodes (in lifted coordinates) between xa and xb.
      double lo = xa;
      double node = xa0(hf.axes, xa) + dx;
      auto piece = [&](double u, double v) {
        if (v <= u) return;
        const double h = 0.5 * (grid_interpolate(hf.axes, hf.values, u, y) +
                                grid_interpolate(hf.axes, hf.values, v, y));
        if (!std::isfinite(h)) {
          out.touches_masked = true;
          return;
        }
        out.enclosed += w * h * (v - u) * hy;
      };
      for (; node < xb; node += dx) {
        piece(lo, node);
        lo = node;
      }
      piece(lo, xb);
    }
  }
  return out;
}

/// Projects a 4-D gait path onto the slice's coordinates.
inline std::vector<Eigen::Vector2d> project_path(const SubShapeSpec& spec,
                                                 const std::vector<ShapeVariable>& path) {
  std::vector<Eigen::Vector2d> out;
  out.reserve(path.size());
  for (const ShapeVariable& m : path) out.push_back(spec.project(m));
  return out;
}

/// Grid CSV: header comments carry the space and both axes, then one row per
/// y value. Values round-trip exactly.
inline void write_grid_csv(std::ostream& os, SubSpace which, const GridAxes& axes,
                           const Eigen::MatrixXd& values) {
  auto num = [](double v) {
    if (std::isnan(v)) return std::string("nan");
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
  };
  os << "# omegagait-csv v1\n";
  os << "# space: " << to_string(which) << "\n";
  os << "# x_cyclic: " << axes.x_axis.cyclic << " x_range: " << num(axes.x_axis.lo) << ' '
     << num(axes.x_axis.hi) << "\n";
  os << "# y_cyclic: " << axes.y_axis.cyclic << " y_range: " << num(axes.y_axis.lo) << ' '
     << num(axes.y_axis.hi) << "\n";
  os << "# x:";
  for (double x : axes.x) os << ' ' << num(x);
  os << "\n# y:";
  for (double y : axes.y) os << ' ' << num(y);
  os << '\n';
  for (Eigen::Index j = 0; j < values.rows(); ++j) {
    for (Eigen::Index i = 0; i < values.cols(); ++i) os << (i ? "," : "") << num(values(j, i));
    os << '\n';
  }
}

inline void write_grid_csv(std::ostream& os, const HeightFunctionGrid& hf) {
  write_grid_csv(os, hf.which, hf.axes, hf.values);
}

inline void write_grid_csv(std::ostream& os, const FeasibilityGrid& fg) {
  Eigen::MatrixXd v(fg.axes.y.size(), fg.axes.x.size());
  for (Eigen::Index j = 0; j < v.rows(); ++j)
    for (Eigen::Index i = 0; i < v.cols(); ++i) v(j, i) = fg.at(i, j) ? 1.0 : 0.0;
  write_grid_csv(os, fg.which, fg.axes, v);
}

/// Reads a grid written by write_grid_csv. The connection is not stored.
inline HeightFunctionGrid read_grid_csv(std::istream& is) {
  HeightFunctionGrid hf;
  std::string line;
  std::vector<std::vector<double>> rows;
  auto parse = [](const std::string& tok) {
    if (tok == "nan") return std::numeric_limits<double>::quiet_NaN();
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw ParameterError("bad number in grid csv: " + tok);
    return v;
  };
  bool have_x = false, have_y = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream s(line.substr(1));
      std::string key;
      s >> key;
      if (key == "space:") {
        std::string name;
        s >> name;
        if (name == to_string(SubSpace::kTauFAmpF)) hf.which = SubSpace::kTauFAmpF;
        else if (name == to_string(SubSpace::kTauOAmpO)) hf.which = SubSpace::kTauOAmpO;
        else hf.which = SubSpace::kTauFTauO;
      } else if (key == "x_cyclic:" || key == "y_cyclic:") {
        Axis& a = key[0] == 'x' ? hf.axes.x_axis : hf.axes.y_axis;
        int cyc;
        std::string range_key, lo, hi;
        s >> cyc >> range_key >> lo >> hi;
        a = {parse(lo), parse(hi), cyc != 0};
      } else if (key == "x:" || key == "y:") {
        std::vector<double>& v = key[0] == 'x' ? hf.axes.x : hf.axes.y;
        std::string tok;
        while (s >> tok) v.push_back(parse(tok));
        (key[0] == 'x' ? have_x : have_y) = true;
      }
      continue;
    }
    std::vector<double> row;
    std::istringstream s(line);
    std::string tok;
    while (std::getline(s, tok, ',')) row.push_back(parse(tok));
    rows.push_back(std::move(row));
  }
  if (!have_x || !have_y) throw ParameterError("grid csv lacks axis headers");
  hf.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(hf.axes.x.size()));
  if (rows.size() != hf.axes.y.size()) throw ParameterError("grid csv row count mismatch");
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].size() != hf.axes.x.size()) throw ParameterError("grid csv column count mismatch");
    for (std::size_t i = 0; i < rows[j].size(); ++i) hf.values(j, i) = rows[j][i];
  }
  return hf;
}

}  // namespace omegagait
