/*
 * Copyright 2026 The coopadmm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "coopadmm/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coopadmm/errors.hpp"

namespace coopadmm {

namespace {

const char *kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#e377c2", "#17becf",
                          "#bcbd22", "#7f7f7f", "#aec7e8", "#ff9896"};
constexpr int kPaletteSize = 12;

std::string color_for(int vehicle) { return kPalette[vehicle % kPaletteSize]; }

void append_row(std::string &out, int vehicle, const std::string &iteration,
                int tau, const Eigen::VectorXd &x, const Eigen::VectorXd *u) {
  out += std::to_string(vehicle);
  out += ',';
  out += iteration;
  out += ',';
  out += std::to_string(tau);
  for (int c = 0; c < 4; ++c) {
    out += ',';
    out += format_double(x[c]);
  }
  if (u) {
    out += ',';
    out += format_double((*u)[0]);
    out += ',';
    out += format_double((*u)[1]);
  } else {
    out += ",,";
  }
  out += '\n';
}

void append_group(std::string &out, int vehicle, const std::string &iteration,
                  const Trajectory &traj) {
  const int T = traj.horizon();
  for (int tau = 0; tau <= T; ++tau) {
    const Eigen::VectorXd *u = tau < T ? &traj.inputs[tau] : nullptr;
    append_row(out, vehicle, iteration, tau, traj.states[tau], u);
  }
}

// Maps world coordinates into a fixed-size SVG pixel frame, preserving
// aspect ratio.
struct Frame {
  double x_min, x_max, y_min, y_max;
  double width, height, margin;
  double scale, ox, oy;

  Frame(double xmin, double xmax, double ymin, double ymax, double w, double h,
        double m)
      : x_min(xmin), x_max(xmax), y_min(ymin), y_max(ymax), width(w),
        height(h), margin(m) {
    const double sx = (w - 2 * m) / std::max(1e-9, x_max - x_min);
    const double sy = (h - 2 * m) / std::max(1e-9, y_max - y_min);
    scale = std::min(sx, sy);
    ox = 0.5 * (w - scale * (x_min + x_max));
    oy = 0.5 * (h + scale * (y_min + y_max));
  }

  double px(double x) const { return ox + scale * x; }
  double py(double y) const { return oy - scale * y; } // y up in world
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void polyline(std::string &svg, const std::vector<Eigen::Vector2d> &pts,
              const Frame &f, const std::string &color, double width,
              double opacity, const char *dash = nullptr) {
  svg += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
         num(width) + "\" stroke-opacity=\"" + num(opacity) + "\"";
  if (dash) svg += std::string(" stroke-dasharray=\"") + dash + "\"";
  svg += " points=\"";
  for (const auto &p : pts) {
    svg += num(f.px(p.x())) + "," + num(f.py(p.y())) + " ";
  }
  svg += "\"/>\n";
}

void text(std::string &svg, double x, double y, const std::string &s,
          const std::string &anchor = "start", int size = 12) {
  svg += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
         std::to_string(size) +
         "\" font-family=\"sans-serif\" fill=\"#333\" text-anchor=\"" +
         anchor + "\">" + s + "</text>\n";
}

// Grey cross for the road: one rectangle per axis spanning both arms.
void draw_road(std::string &svg, const ScenarioConfig &cfg, const Frame &f) {
  const double half = cfg.lane_width; // road half width (two lanes)
  const double reach = cfg.lane_width + cfg.arm_length + 20.0;
  auto rect = [&](double x0, double y0, double x1, double y1) {
    svg += "<rect x=\"" + num(f.px(x0)) + "\" y=\"" + num(f.py(y1)) +
           "\" width=\"" + num(f.scale * (x1 - x0)) + "\" height=\"" +
           num(f.scale * (y1 - y0)) + "\" fill=\"#e8e8e8\"/>\n";
  };
  rect(-reach, -half, reach, half);
  rect(-half, -reach, half, reach);
  // dashed centerlines
  polyline(svg, {{-reach, 0.0}, {reach, 0.0}}, f, "#bbbbbb", 1.0, 1.0, "6,6");
  polyline(svg, {{0.0, -reach}, {0.0, reach}}, f, "#bbbbbb", 1.0, 1.0, "6,6");
}

Frame scenario_frame(const ExperimentReport &report, double w, double h) {
  double x_min = -5, x_max = 5, y_min = -5, y_max = 5;
  auto grow = [&](double x, double y) {
    x_min = std::min(x_min, x - 3);
    x_max = std::max(x_max, x + 3);
    y_min = std::min(y_min, y - 3);
    y_max = std::max(y_max, y + 3);
  };
  for (const auto &traj : report.final_trajectories) {
    for (const auto &x : traj.states) grow(x[0], x[1]);
  }
  for (const auto &ref : report.references.refs) {
    for (int c = 0; c < ref.cols(); ++c) grow(ref(0, c), ref(1, c));
  }
  return Frame(x_min, x_max, y_min, y_max, w, h, 20.0);
}

void draw_vehicle_box(std::string &svg, const Frame &f,
                      const Eigen::VectorXd &x, double length, double width,
                      const std::string &color) {
  const double c = std::cos(x[2]), s = std::sin(x[2]);
  const double hl = 0.5 * length, hw = 0.5 * width;
  const double cx = x[0], cy = x[1];
  svg += "<polygon fill=\"" + color + "\" fill-opacity=\"0.85\" points=\"";
  const double corners[4][2] = {{hl, hw}, {hl, -hw}, {-hl, -hw}, {-hl, hw}};
  for (const auto &q : corners) {
    const double wx = cx + c * q[0] - s * q[1];
    const double wy = cy + s * q[0] + c * q[1];
    svg += num(f.px(wx)) + "," + num(f.py(wy)) + " ";
  }
  svg += "\"/>\n";
}

std::string svg_open(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) +
         "\" height=\"" + num(h) + "\" viewBox=\"0 0 " + num(w) + " " +
         num(h) + "\">\n<rect width=\"100%\" height=\"100%\" "
         "fill=\"white\"/>\n";
}

} // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string trajectories_csv(const ExperimentReport &report) {
  std::string out = "vehicle,iteration,tau,p_x,p_y,theta,v,delta,a\n";
  const int N = static_cast<int>(report.final_trajectories.size());
  for (int i = 0; i < N; ++i) {
    for (size_t k = 0; k < report.iterates.size(); ++k) {
      append_group(out, i, std::to_string(k + 1), report.iterates[k][i]);
    }
    append_group(out, i, "final", report.final_trajectories[i]);
  }
  return out;
}

std::string distances_csv(const ExperimentReport &report) {
  std::string out = "tau,pair,distance\n";
  for (size_t p = 0; p < report.dist_pairs.size(); ++p) {
    const auto [i, j] = report.dist_pairs[p];
    const std::string pair =
        std::to_string(i) + "-" + std::to_string(j);
    for (int t = 0; t < report.distances[p].size(); ++t) {
      out += std::to_string(t + 1) + "," + pair + "," +
             format_double(report.distances[p][t]) + "\n";
    }
  }
  return out;
}

std::string summary_csv_header() {
  return "scenario,backend,seed,status,iterations,residual,min_distance,"
         "y_step_ms_mean,z_step_ms_mean,total_s\n";
}

std::string summary_csv_row(const ExperimentReport &report) {
  double y_ms = 0.0, z_ms = 0.0;
  for (const auto &rec : report.records) {
    y_ms += rec.y_step_ms;
    z_ms += rec.z_step_ms;
  }
  const double n = std::max<size_t>(1, report.records.size());
  std::string out = report.config.name + "," + report.backend + "," +
                    std::to_string(report.config.seed) + ",";
  out += report.status == AdmmStatus::Converged ? "converged" : "not_converged";
  out += "," + std::to_string(report.iterations);
  out += "," + format_double(report.residual);
  out += "," + format_double(report.min_distance());
  out += "," + format_double(y_ms / n);
  out += "," + format_double(z_ms / n);
  out += "," + format_double(report.total_seconds);
  out += "\n";
  return out;
}

std::string fan_svg(const ExperimentReport &report) {
  const double w = 720, h = 720;
  const Frame f = scenario_frame(report, w, h);
  std::string svg = svg_open(w, h);
  draw_road(svg, report.config, f);

  const int N = static_cast<int>(report.final_trajectories.size());
  const int K = static_cast<int>(report.iterates.size());
  for (int i = 0; i < N; ++i) {
    // reference, thin dashes
    std::vector<Eigen::Vector2d> ref_pts;
    const auto &ref = report.references.refs[i];
    for (int c = 0; c < ref.cols(); ++c) ref_pts.push_back(ref.col(c).head<2>());
    polyline(svg, ref_pts, f, "#999999", 1.0, 0.8, "3,4");

    for (int k = 0; k < K; ++k) {
      std::vector<Eigen::Vector2d> pts;
      for (const auto &x : report.iterates[k][i].states)
        pts.push_back(x.head<2>());
      const double opacity = 0.08 + 0.5 * (k + 1.0) / std::max(1, K);
      polyline(svg, pts, f, color_for(i), 1.2, opacity);
    }
    std::vector<Eigen::Vector2d> pts;
    for (const auto &x : report.final_trajectories[i].states)
      pts.push_back(x.head<2>());
    polyline(svg, pts, f, color_for(i), 2.5, 1.0);
    text(svg, f.px(pts.front().x()), f.py(pts.front().y()) - 6,
         "v" + std::to_string(i), "middle");
  }
  text(svg, 10, 18,
       report.config.name + " — trajectories across " + std::to_string(K) +
           " iterations (+ final)");
  svg += "</svg>\n";
  return svg;
}

std::string snapshots_svg(const ExperimentReport &report) {
  const double pw = 360, ph = 360;
  const int cols = 3, rows = 2;
  const int T = report.config.horizon;
  const int taus[6] = {0, T / 5, 2 * T / 5, 3 * T / 5, 4 * T / 5, T};

  std::string svg = svg_open(cols * pw, rows * ph);
  const Frame base = scenario_frame(report, pw, ph);

  for (int panel = 0; panel < 6; ++panel) {
    const double offx = (panel % cols) * pw;
    const double offy = (panel / cols) * ph;
    svg += "<g transform=\"translate(" + num(offx) + "," + num(offy) + ")\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + num(pw) + "\" height=\"" +
           num(ph) + "\" fill=\"none\" stroke=\"#cccccc\"/>\n";
    draw_road(svg, report.config, base);
    const int tau = taus[panel];
    for (size_t i = 0; i < report.final_trajectories.size(); ++i) {
      std::vector<Eigen::Vector2d> pts;
      for (int t = 0; t <= tau; ++t)
        pts.push_back(report.final_trajectories[i].states[t].head<2>());
      if (pts.size() > 1)
        polyline(svg, pts, base, color_for(static_cast<int>(i)), 1.0, 0.6);
      draw_vehicle_box(svg, base, report.final_trajectories[i].states[tau],
                       report.config.vehicle_length,
                       report.config.vehicle_width,
                       color_for(static_cast<int>(i)));
    }
    text(svg, 8, 16,
         "t = " + num(tau * report.config.tau_s) + " s (tau = " +
             std::to_string(tau) + ")");
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string distances_svg(const ExperimentReport &report) {
  const double w = 720, h = 420, m = 50;
  const int T = report.config.horizon;
  double d_max = report.config.d_safe * 2;
  for (const auto &d : report.distances) d_max = std::max(d_max, d.maxCoeff());

  auto px = [&](double tau) { return m + (w - 2 * m) * tau / T; };
  auto py = [&](double d) { return h - m - (h - 2 * m) * d / d_max; };

  std::string svg = svg_open(w, h);
  // axes
  svg += "<line x1=\"" + num(m) + "\" y1=\"" + num(h - m) + "\" x2=\"" +
         num(w - m) + "\" y2=\"" + num(h - m) +
         "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
  svg += "<line x1=\"" + num(m) + "\" y1=\"" + num(m) + "\" x2=\"" + num(m) +
         "\" y2=\"" + num(h - m) + "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
  // d_safe line
  svg += "<line x1=\"" + num(m) + "\" y1=\"" + num(py(report.config.d_safe)) +
         "\" x2=\"" + num(w - m) + "\" y2=\"" +
         num(py(report.config.d_safe)) +
         "\" stroke=\"#d62728\" stroke-width=\"1\" "
         "stroke-dasharray=\"5,4\"/>\n";
  text(svg, w - m + 4, py(report.config.d_safe) + 4, "d_safe");
  text(svg, m - 6, py(0) + 4, "0", "end");
  text(svg, m - 6, py(d_max) + 4, num(d_max), "end");
  text(svg, px(T), h - m + 16, std::to_string(T), "middle");
  text(svg, px(0), h - m + 16, "0", "middle");
  text(svg, w / 2, h - 12, "timestep tau", "middle");
  text(svg, 10, 18, report.config.name + " — pairwise distances");

  for (size_t p = 0; p < report.distances.size(); ++p) {
    svg += "<polyline fill=\"none\" stroke=\"" +
           color_for(static_cast<int>(p)) +
           "\" stroke-width=\"1.2\" stroke-opacity=\"0.8\" points=\"";
    for (int t = 0; t < report.distances[p].size(); ++t) {
      svg += num(px(t + 1)) + "," + num(py(report.distances[p][t])) + " ";
    }
    svg += "\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void emit_outputs(const ExperimentReport &report, const std::string &out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw ConfigError("cannot create output directory '" + out_dir +
                      "': " + ec.message());
  }
  auto write = [&](const char *name, const std::string &content) {
    const fs::path path = fs::path(out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << content;
  };
  write("trajectories.csv", trajectories_csv(report));
  write("distances.csv", distances_csv(report));
  write("summary.csv", summary_csv_header() + summary_csv_row(report));
  write("fan.svg", fan_svg(report));
  write("snapshots.svg", snapshots_svg(report));
  write("distances.svg", distances_svg(report));
  write("config.json", config_to_json(report.config));
}

} // namespace coopadmm
