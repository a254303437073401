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

// Output plumbing: atomic file writes, self-contained SVG plots and the log
// level taken from OMEGAGAIT_LOG.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <spdlog/spdlog.h>

#include "omegagait/errors.hpp"

namespace omegagait {

/// Writes through a temporary sibling and renames it into place, so readers
/// never see a partial file. The temporary is removed if `body` throws.
inline void write_atomically(const std::filesystem::path& path,
                             const std::function<void(std::ostream&)>& body) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  try {
    {
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      if (!os) throw std::runtime_error("cannot open " + tmp.string());
      body(os);
      os.flush();
      if (!os) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

/// Sets the spdlog level from OMEGAGAIT_LOG (trace, debug, info, warn,
/// error, critical, off). Unset or unrecognized values leave "warn".
inline void configure_logging() {
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("OMEGAGAIT_LOG")) {
    const auto lvl = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only honor a real "off".
    if (lvl != spdlog::level::off || std::string(env) == "off") spdlog::set_level(lvl);
  }
}

namespace svg {

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

// Roughly five round tick values spanning [lo, hi].
inline std::vector<double> ticks(double lo, double hi) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / 5;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step)
    t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return t;
}

inline const char* series_color(std::size_t k) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};
  return colors[k % 8];
}

}  // namespace svg

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> y_err;  // optional, same length as y
};

/// Line plot with markers, optional error bars and a legend.
inline void write_line_plot_svg(std::ostream& os, const std::string& title,
                                const std::string& x_label, const std::string& y_label,
                                const std::vector<PlotSeries>& series) {
  const double W = 640, H = 420, L = 70, R = 160, T = 40, Bm = 55;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.y[k])) continue;
      const double e = s.y_err.empty() ? 0.0 : s.y_err[k];
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, s.y[k] - e);
      y1 = std::max(y1, s.y[k] + e);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  y0 = std::min(y0, 0.0);
  if (y1 <= y0) y1 = y0 + 1;
  const double pad = 0.05 * (y1 - y0);
  y1 += pad;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - Bm - (y - y0) / (y1 - y0) * (H - T - Bm); };

  using svg::num;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << svg::escape(title) << "</text>\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
     << H - T - Bm << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : svg::ticks(x0, x1))
    os << "<text x=\"" << num(px(t)) << "\" y=\"" << H - Bm + 16
       << "\" text-anchor=\"middle\">" << num(t) << "</text>\n";
  for (double t : svg::ticks(y0, y1)) {
    os << "<line x1=\"" << L << "\" x2=\"" << W - R << "\" y1=\"" << num(py(t)) << "\" y2=\""
       << num(py(t)) << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << num(py(t) + 4) << "\" text-anchor=\"end\">"
       << num(t) << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">"
     << svg::escape(x_label) << "</text>\n";
  os << "<text transform=\"translate(18," << (T + H - Bm) / 2
     << ") rotate(-90)\" text-anchor=\"middle\">" << svg::escape(y_label) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* c = svg::series_color(k);
    os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"";
    for (std::size_t j = 0; j < s.x.size(); ++j)
      if (std::isfinite(s.y[j])) os << num(px(s.x[j])) << ',' << num(py(s.y[j])) << ' ';
    os << "\"/>\n";
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      if (!std::isfinite(s.y[j])) continue;
      if (!s.y_err.empty())
        os << "<line x1=\"" << num(px(s.x[j])) << "\" x2=\"" << num(px(s.x[j])) << "\" y1=\""
           << num(py(s.y[j] - s.y_err[j])) << "\" y2=\"" << num(py(s.y[j] + s.y_err[j]))
           << "\" stroke=\"" << c << "\"/>\n";
      os << "<circle cx=\"" << num(px(s.x[j])) << "\" cy=\"" << num(py(s.y[j]))
         << "\" r=\"3.5\" fill=\"" << c << "\"/>\n";
    }
    const double ly = T + 14 + 18 * k;
    os << "<line x1=\"" << W - R + 12 << "\" x2=\"" << W - R + 32 << "\" y1=\"" << ly
       << "\" y2=\"" << ly << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << W - R + 38 << "\" y=\"" << ly + 4 << "\">" << svg::escape(s.name)
       << "</text>\n";
  }
  os << "</svg>\n";
}

/// Heatmap of values(j, i) at (x[i], y[j]). Positive values shade to red,
/// negative to black, symmetric about zero; NaN cells are drawn hatched
/// gray. `path` (same coordinates) is overlaid in blue, broken wherever it
/// wraps across a cyclic axis.
inline void write_heatmap_svg(std::ostream& os, const std::string& title,
                              const std::string& x_label, const std::string& y_label,
                              const std::vector<double>& x, const std::vector<double>& y,
                              const Eigen::MatrixXd& values,
                              const std::vector<Eigen::Vector2d>& path = {}) {
  const double W = 520, H = 500, L = 70, R = 30, T = 40, Bm = 55;
  const std::size_t nx = x.size(), ny = y.size();
  const double dx = nx > 1 ? x[1] - x[0] : 1.0, dy = ny > 1 ? y[1] - y[0] : 1.0;
  const double xlo = x.front() - dx / 2, xhi = x.back() + dx / 2;
  const double ylo = y.front() - dy / 2, yhi = y.back() + dy / 2;
  auto px = [&](double v) { return L + (v - xlo) / (xhi - xlo) * (W - L - R); };
  auto py = [&](double v) { return H - Bm - (v - ylo) / (yhi - ylo) * (H - T - Bm); };
  double vmax = 0.0;
  for (Eigen::Index k = 0; k < values.size(); ++k)
    if (std::isfinite(values(k))) vmax = std::max(vmax, std::abs(values(k)));
  if (vmax == 0.0) vmax = 1.0;

  using svg::num;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<defs><pattern id=\"mask\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\">"
        "<rect width=\"6\" height=\"6\" fill=\"#bdbdbd\"/>"
        "<path d=\"M0,6 L6,0\" stroke=\"#6d6d6d\" stroke-width=\"1\"/></pattern></defs>\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << svg::escape(title) << " (|max| " << num(vmax) << ")</text>\n";
  const double cw = (W - L - R) / nx, ch = (H - T - Bm) / ny;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const double v = values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
      std::string fill;
      if (!std::isfinite(v)) {
        fill = "url(#mask)";
      } else {
        const double a = std::clamp(std::abs(v) / vmax, 0.0, 1.0);
        int r, g, b;
        if (v >= 0) {  // white -> red
          r = 255;
          g = b = static_cast<int>(std::lround(255 * (1 - a)));
        } else {  // white -> black
          r = g = b = static_cast<int>(std::lround(255 * (1 - a)));
        }
        char buf[16];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
        fill = buf;
      }
      os << "<rect x=\"" << num(px(x[i] - dx / 2)) << "\" y=\"" << num(py(y[j] + dy / 2))
         << "\" width=\"" << num(cw + 0.3) << "\" height=\"" << num(ch + 0.3) << "\" fill=\""
         << fill << "\"/>\n";
    }
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
     << H - T - Bm << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (path.size() > 1) {
    const double jump_x = 0.5 * (xhi - xlo), jump_y = 0.5 * (yhi - ylo);
    os << "<path fill=\"none\" stroke=\"#1565c0\" stroke-width=\"2.5\" d=\"";
    for (std::size_t k = 0; k < path.size(); ++k) {
      const bool jump = k == 0 || std::abs(path[k].x() - path[k - 1].x()) > jump_x ||
                        std::abs(path[k].y() - path[k - 1].y()) > jump_y;
      os << (jump ? 'M' : 'L') << num(px(path[k].x())) << ',' << num(py(path[k].y())) << ' ';
    }
    os << "\"/>\n";
  }
  for (double t : svg::ticks(xlo, xhi))
    os << "<text x=\"" << num(px(t)) << "\" y=\"" << H - Bm + 16
       << "\" text-anchor=\"middle\">" << num(t) << "</text>\n";
  for (double t : svg::ticks(ylo, yhi))
    os << "<text x=\"" << L - 6 << "\" y=\"" << num(py(t) + 4) << "\" text-anchor=\"end\">"
       << num(t) << "</text>\n";
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">"
     << svg::escape(x_label) << "</text>\n";
  os << "<text transform=\"translate(18," << (T + H - Bm) / 2
     << ") rotate(-90)\" text-anchor=\"middle\">" << svg::escape(y_label) << "</text>\n";
  os << "</svg>\n";
}

}  // namespace omegagait
