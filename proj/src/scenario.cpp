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

#include "coopadmm/scenario.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "coopadmm/errors.hpp"

namespace coopadmm {

using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

double arm_angle(const std::string &arm) {
  if (arm == "east") return 0.0;
  if (arm == "north") return 0.5 * kPi;
  if (arm == "west") return kPi;
  if (arm == "south") return -0.5 * kPi;
  throw ConfigError("unknown entry_arm '" + arm + "'");
}

// A path is a chain of segments traversed by arc length. Everything is
// built in the canonical east-entry frame (travel heading pi along
// y = lane_width/2) and rotated into place afterwards.
struct Segment {
  bool arc{false};
  // straight
  Eigen::Vector2d start{0, 0}, dir{0, 0};
  // arc
  Eigen::Vector2d center{0, 0};
  double radius{0.0};
  double ang0{0.0};   // angle of the entry point seen from the center
  double omega{0.0};  // +1/R counter-clockwise, -1/R clockwise (d ang / d s)
  double length{std::numeric_limits<double>::infinity()};
  double theta0{0.0}; // heading at s = 0 within the segment
};

struct Path {
  std::vector<Segment> segments;

  // Position and unwrapped heading at arc length s from the start. The last
  // segment extends indefinitely.
  void sample(double s, Eigen::Vector2d &p, double &theta) const {
    for (size_t k = 0; k < segments.size(); ++k) {
      const Segment &seg = segments[k];
      const bool last = k + 1 == segments.size();
      if (s <= seg.length || last) {
        if (seg.arc) {
          const double ang = seg.ang0 + seg.omega * s;
          p = seg.center + seg.radius * Eigen::Vector2d(std::cos(ang),
                                                        std::sin(ang));
          theta = seg.theta0 + seg.omega * s;
        } else {
          p = seg.start + s * seg.dir;
          theta = seg.theta0;
        }
        return;
      }
      s -= seg.length;
    }
    throw ConfigError("empty path");
  }
};

Path build_canonical_path(const ScenarioConfig &cfg, const VehicleSpec &veh) {
  const double lane = 0.5 * cfg.lane_width; // incoming lane center offset
  const double R = cfg.turn_radius;
  const double x_start =
      cfg.lane_width + cfg.arm_length + veh.start_offset;

  if (R < lane) {
    throw ConfigError("turn_radius must be at least half the lane width");
  }

  Path path;
  if (veh.maneuver == "Straight") {
    Segment s;
    s.start = {x_start, lane};
    s.dir = {-1.0, 0.0};
    s.theta0 = kPi;
    path.segments.push_back(s);
    return path;
  }

  double x_arc; // x of the tangent point on the entry lane line
  Segment arc;
  arc.arc = true;
  arc.radius = R;
  arc.length = 0.5 * kPi * R;
  Segment out;
  if (veh.maneuver == "Right") {
    // Quarter circle tangent to y = lane and x = lane, turning clockwise
    // into the northbound exit lane.
    x_arc = lane + R;
    arc.center = {lane + R, lane + R};
    arc.ang0 = -0.5 * kPi;
    arc.omega = -1.0 / R;
    arc.theta0 = kPi;
    out.start = {lane, lane + R};
    out.dir = {0.0, 1.0};
    out.theta0 = 0.5 * kPi;
  } else if (veh.maneuver == "Left") {
    // Counter-clockwise quarter circle crossing the box into the
    // southbound exit lane.
    x_arc = R - lane;
    arc.center = {R - lane, lane - R};
    arc.ang0 = 0.5 * kPi;
    arc.omega = 1.0 / R;
    arc.theta0 = kPi;
    out.start = {-lane, lane - R};
    out.dir = {0.0, -1.0};
    out.theta0 = 1.5 * kPi;
  } else {
    throw ConfigError("unknown maneuver '" + veh.maneuver + "'");
  }

  const double entry_len = x_start - x_arc;
  if (entry_len < 0.0) {
    throw ConfigError("entry arm too short for the turn geometry: need " +
                      std::to_string(x_arc) + " m before the arc, have " +
                      std::to_string(x_start) + " m");
  }
  Segment entry;
  entry.start = {x_start, lane};
  entry.dir = {-1.0, 0.0};
  entry.theta0 = kPi;
  entry.length = entry_len;

  path.segments.push_back(entry);
  path.segments.push_back(arc);
  path.segments.push_back(out);
  return path;
}

void reject_unknown(const json &obj, const std::set<std::string> &known,
                    const std::string &where) {
  for (const auto &item : obj.items()) {
    if (!known.count(item.key())) {
      throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
  }
}

template <typename T>
void read_field(const json &obj, const char *key, T &out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception &e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

void read_pair(const json &obj, const char *key, double &lo, double &hi) {
  if (!obj.contains(key)) return;
  const auto &v = obj.at(key);
  if (!v.is_array() || v.size() != 2) {
    throw ConfigError(std::string("'") + key + "' must be a [lo, hi] pair");
  }
  lo = v[0].get<double>();
  hi = v[1].get<double>();
}

template <int D>
void read_vec(const json &obj, const char *key, Eigen::Matrix<double, D, 1> &out) {
  if (!obj.contains(key)) return;
  const auto &v = obj.at(key);
  if (!v.is_array() || static_cast<int>(v.size()) != D) {
    throw ConfigError(std::string("'") + key + "' must have " +
                      std::to_string(D) + " entries");
  }
  for (int i = 0; i < D; ++i) out[i] = v[i].get<double>();
}

} // namespace

void ScenarioConfig::validate() const {
  if (vehicles.empty()) throw ConfigError("no vehicles configured");
  if (horizon < 1) throw ConfigError("horizon must be positive");
  if (tau_s <= 0.0) throw ConfigError("tau_s must be positive");
  if (sigma <= 0.0) throw ConfigError("sigma must be positive");
  if (eps <= 0.0) throw ConfigError("eps must be positive");
  if (max_admm_iterations < 1 || max_ddp_iterations < 1) {
    throw ConfigError("iteration limits must be positive");
  }
  if (d_safe <= 0.0) throw ConfigError("d_safe must be positive");
  if (d_cmu < d_safe) throw ConfigError("d_cmu must be at least d_safe");
  if (lane_width <= 0.0 || arm_length < 0.0 || turn_radius <= 0.0) {
    throw ConfigError("road geometry values must be positive");
  }
  if (delta_min >= delta_max || accel_min >= accel_max) {
    throw ConfigError("input bounds must satisfy lo < hi");
  }
  if (nominal_speed <= 0.0) throw ConfigError("nominal_speed must be positive");
  if (wheelbase <= 0.0) throw ConfigError("wheelbase must be positive");
  if ((q_diag.array() < 0.0).any()) {
    throw ConfigError("q_diag entries must be nonnegative");
  }
  if ((r_diag.array() <= 0.0).any()) {
    throw ConfigError("r_diag entries must be positive");
  }
  backend_from_string(backend);
  for (const auto &veh : vehicles) {
    arm_angle(veh.entry_arm);
    if (veh.maneuver != "Left" && veh.maneuver != "Right" &&
        veh.maneuver != "Straight") {
      throw ConfigError("unknown maneuver '" + veh.maneuver + "'");
    }
    if (veh.lane != 0) {
      throw ConfigError("only single-lane arms are supported (lane 0)");
    }
  }
}

ScenarioConfig parse_config(const std::string &json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception &e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  reject_unknown(doc, {"name", "road", "params", "vehicles", "backend",
                       "seed", "threads"},
                 "config root");

  ScenarioConfig cfg;
  read_field(doc, "name", cfg.name);
  read_field(doc, "backend", cfg.backend);
  read_field(doc, "seed", cfg.seed);
  read_field(doc, "threads", cfg.threads);

  if (doc.contains("road")) {
    const json &road = doc.at("road");
    reject_unknown(road, {"lane_width", "arm_length", "turn_radius"}, "road");
    read_field(road, "lane_width", cfg.lane_width);
    read_field(road, "arm_length", cfg.arm_length);
    read_field(road, "turn_radius", cfg.turn_radius);
  }

  if (doc.contains("params")) {
    const json &p = doc.at("params");
    reject_unknown(p,
                   {"d_safe", "d_cmu", "tau_s", "horizon", "sigma", "eps",
                    "max_admm_iterations", "max_ddp_iterations",
                    "delta_bounds", "accel_bounds", "vehicle_length",
                    "vehicle_width", "wheelbase", "nominal_speed", "q_diag",
                    "r_diag"},
                   "params");
    read_field(p, "d_safe", cfg.d_safe);
    read_field(p, "d_cmu", cfg.d_cmu);
    read_field(p, "tau_s", cfg.tau_s);
    read_field(p, "horizon", cfg.horizon);
    read_field(p, "sigma", cfg.sigma);
    read_field(p, "eps", cfg.eps);
    read_field(p, "max_admm_iterations", cfg.max_admm_iterations);
    read_field(p, "max_ddp_iterations", cfg.max_ddp_iterations);
    read_pair(p, "delta_bounds", cfg.delta_min, cfg.delta_max);
    read_pair(p, "accel_bounds", cfg.accel_min, cfg.accel_max);
    read_field(p, "vehicle_length", cfg.vehicle_length);
    read_field(p, "vehicle_width", cfg.vehicle_width);
    read_field(p, "wheelbase", cfg.wheelbase);
    read_field(p, "nominal_speed", cfg.nominal_speed);
    read_vec<4>(p, "q_diag", cfg.q_diag);
    read_vec<2>(p, "r_diag", cfg.r_diag);
  }

  if (!doc.contains("vehicles")) throw ConfigError("missing 'vehicles' list");
  const json &vehicles = doc.at("vehicles");
  if (!vehicles.is_array()) throw ConfigError("'vehicles' must be an array");
  for (const json &v : vehicles) {
    if (!v.is_object()) throw ConfigError("vehicle entries must be objects");
    reject_unknown(v, {"entry_arm", "maneuver", "lane", "start_offset",
                       "initial_state"},
                   "vehicle entry");
    VehicleSpec spec;
    if (!v.contains("entry_arm") || !v.contains("maneuver")) {
      throw ConfigError("vehicle entries need 'entry_arm' and 'maneuver'");
    }
    read_field(v, "entry_arm", spec.entry_arm);
    read_field(v, "maneuver", spec.maneuver);
    read_field(v, "lane", spec.lane);
    read_field(v, "start_offset", spec.start_offset);
    if (v.contains("initial_state")) {
      Eigen::Vector4d x0 = Eigen::Vector4d::Zero();
      read_vec<4>(v, "initial_state", x0);
      spec.initial_state = x0;
    }
    cfg.vehicles.push_back(std::move(spec));
  }

  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ScenarioConfig &cfg) {
  json doc;
  doc["name"] = cfg.name;
  doc["road"] = {{"lane_width", cfg.lane_width},
                 {"arm_length", cfg.arm_length},
                 {"turn_radius", cfg.turn_radius}};
  json p;
  p["d_safe"] = cfg.d_safe;
  if (std::isfinite(cfg.d_cmu)) p["d_cmu"] = cfg.d_cmu;
  p["tau_s"] = cfg.tau_s;
  p["horizon"] = cfg.horizon;
  p["sigma"] = cfg.sigma;
  p["eps"] = cfg.eps;
  p["max_admm_iterations"] = cfg.max_admm_iterations;
  p["max_ddp_iterations"] = cfg.max_ddp_iterations;
  p["delta_bounds"] = {cfg.delta_min, cfg.delta_max};
  p["accel_bounds"] = {cfg.accel_min, cfg.accel_max};
  p["vehicle_length"] = cfg.vehicle_length;
  p["vehicle_width"] = cfg.vehicle_width;
  p["wheelbase"] = cfg.wheelbase;
  p["nominal_speed"] = cfg.nominal_speed;
  p["q_diag"] = {cfg.q_diag[0], cfg.q_diag[1], cfg.q_diag[2], cfg.q_diag[3]};
  p["r_diag"] = {cfg.r_diag[0], cfg.r_diag[1]};
  doc["params"] = p;
  doc["vehicles"] = json::array();
  for (const auto &veh : cfg.vehicles) {
    json v = {{"entry_arm", veh.entry_arm},
              {"maneuver", veh.maneuver},
              {"lane", veh.lane},
              {"start_offset", veh.start_offset}};
    if (veh.initial_state) {
      const Eigen::Vector4d &x0 = *veh.initial_state;
      v["initial_state"] = {x0[0], x0[1], x0[2], x0[3]};
    }
    doc["vehicles"].push_back(v);
  }
  doc["backend"] = cfg.backend;
  doc["seed"] = cfg.seed;
  doc["threads"] = cfg.threads;
  return doc.dump(2) + "\n";
}

Backend backend_from_string(const std::string &name) {
  if (name == "sdr") return Backend::Sdr;
  if (name == "miqp") return Backend::Miqp;
  if (name == "oracle") return Backend::Oracle;
  throw ConfigError("unknown backend '" + name +
                    "' (expected sdr, miqp, or oracle)");
}

std::string backend_to_string(Backend backend) {
  switch (backend) {
  case Backend::Sdr:
    return "sdr";
  case Backend::Miqp:
    return "miqp";
  case Backend::Oracle:
    return "oracle";
  }
  return "sdr";
}

ReferenceSet generate_reference(const ScenarioConfig &cfg) {
  cfg.validate();
  ReferenceSet out;
  const int T = cfg.horizon;
  const double step = cfg.nominal_speed * cfg.tau_s;

  for (const auto &veh : cfg.vehicles) {
    const Path canonical = build_canonical_path(cfg, veh);
    const double alpha = arm_angle(veh.entry_arm);
    const Eigen::Rotation2Dd rot(alpha);

    Eigen::MatrixXd ref(4, T);
    Eigen::Vector2d p;
    double theta;
    for (int tau = 1; tau <= T; ++tau) {
      canonical.sample(tau * step, p, theta);
      const Eigen::Vector2d pr = rot * p;
      ref.col(tau - 1) << pr.x(), pr.y(), theta + alpha, cfg.nominal_speed;
    }
    out.refs.push_back(std::move(ref));

    if (veh.initial_state) {
      out.x0.push_back(*veh.initial_state);
    } else {
      canonical.sample(0.0, p, theta);
      const Eigen::Vector2d pr = rot * p;
      out.x0.push_back({pr.x(), pr.y(), theta + alpha, cfg.nominal_speed});
    }
  }
  return out;
}

MultiVehicleProblem build_problem(const ScenarioConfig &cfg) {
  const ReferenceSet refs = generate_reference(cfg);
  const int N = static_cast<int>(cfg.vehicles.size());

  MultiVehicleProblem problem;
  problem.layout = HorizonLayout{N, cfg.horizon};
  problem.d_safe = cfg.d_safe;

  VehicleParams params;
  params.wheelbase = cfg.wheelbase;
  params.tau_s = cfg.tau_s;
  params.length = cfg.vehicle_length;
  params.width = cfg.vehicle_width;
  auto model = std::make_shared<BicycleModel>(params);

  for (int i = 0; i < N; ++i) {
    AgentProblem agent;
    agent.model = model;
    agent.x0 = refs.x0[i];
    agent.weights.Q = cfg.q_diag.asDiagonal();
    agent.weights.R = cfg.r_diag.asDiagonal();
    agent.weights.x_ref = refs.refs[i];
    agent.weights.validate();
    agent.bounds.u_lo = Eigen::Vector2d(cfg.delta_min, cfg.accel_min);
    agent.bounds.u_hi = Eigen::Vector2d(cfg.delta_max, cfg.accel_max);
    agent.bounds.validate();
    problem.agents.push_back(std::move(agent));
  }

  std::vector<Eigen::Vector2d> positions;
  positions.reserve(N);
  for (int i = 0; i < N; ++i) positions.push_back(refs.x0[i].head<2>());
  problem.graph = build_graph(positions, cfg.d_safe, cfg.d_cmu);
  return problem;
}

double ExperimentReport::min_distance() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto &d : distances) {
    if (d.size() > 0) best = std::min(best, d.minCoeff());
  }
  return best;
}

ExperimentReport run_experiment(const ScenarioConfig &cfg,
                                const ProgressSink &sink) {
  ExperimentReport report;
  report.config = cfg;
  report.backend = cfg.backend;
  report.references = generate_reference(cfg);

  const MultiVehicleProblem problem = build_problem(cfg);

  AdmmOptions opts;
  opts.sigma = cfg.sigma;
  opts.eps = cfg.eps;
  opts.max_iterations = cfg.max_admm_iterations;
  opts.backend = backend_from_string(cfg.backend);
  opts.ddp.max_iterations = cfg.max_ddp_iterations;
  opts.seed = cfg.seed;
  opts.threads = cfg.threads;

  const auto t0 = std::chrono::steady_clock::now();
  AdmmResult res = run(problem, opts, sink);
  report.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  report.status = res.status;
  report.residual = res.residual;
  report.iterations = static_cast<int>(res.iterates.size());
  report.iterates = std::move(res.iterates);
  report.final_trajectories = std::move(res.trajectories);
  report.records = res.state.records;

  const int N = problem.layout.N;
  const int T = problem.layout.T;
  for (int i = 0; i < N; ++i) {
    for (int j = i + 1; j < N; ++j) {
      Eigen::VectorXd d(T);
      for (int tau = 1; tau <= T; ++tau) {
        const Eigen::Vector2d pi =
            report.final_trajectories[i].states[tau].head<2>();
        const Eigen::Vector2d pj =
            report.final_trajectories[j].states[tau].head<2>();
        d[tau - 1] = (pi - pj).norm();
      }
      report.dist_pairs.emplace_back(i, j);
      report.distances.push_back(std::move(d));
    }
  }
  return report;
}

ScenarioConfig junction_scenario() {
  ScenarioConfig cfg;
  cfg.name = "junction";
  // The tighter residual target leaves enough consensus slack for the
  // trajectories to inherit the safety distance from z.
  cfg.eps = 0.005;
  cfg.vehicles = {
      {"west", "Straight", 0, 0.0, std::nullopt},
      {"east", "Left", 0, 0.0, std::nullopt},
      {"south", "Right", 0, 4.5, std::nullopt},
  };
  return cfg;
}

ScenarioConfig intersection_scenario() {
  ScenarioConfig cfg;
  cfg.name = "intersection";
  cfg.eps = 0.005;
  const char *arms[] = {"east", "north", "west", "south"};
  const char *maneuvers[] = {"Right", "Straight", "Left"};
  const double offsets[] = {0.0, 8.0, 16.0};
  // The left-turner starts are spread across the arms: with identical
  // offsets all four left turns meet at the exit-lane crossings in the same
  // handful of timesteps and the projection cannot break the symmetry.
  const double left_spread[] = {0.0, 5.0, 10.0, 15.0};
  for (int a = 0; a < 4; ++a) {
    for (int k = 0; k < 3; ++k) {
      const double extra = k == 2 ? left_spread[a] : 0.0;
      cfg.vehicles.push_back(
          {arms[a], maneuvers[k], 0, offsets[k] + extra, std::nullopt});
    }
  }
  return cfg;
}

} // namespace coopadmm
