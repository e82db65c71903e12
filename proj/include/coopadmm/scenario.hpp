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

#ifndef COOPADMM_SCENARIO_HPP
#define COOPADMM_SCENARIO_HPP

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "coopadmm/admm.hpp"

namespace coopadmm {

struct VehicleSpec {
  std::string entry_arm;  // east | west | north | south
  std::string maneuver;   // Left | Right | Straight
  int lane{0};
  double start_offset{0.0}; // extra entry distance behind the default start
  std::optional<Eigen::Vector4d> initial_state; // defaults to the path start
};

/// Full experiment description: road geometry, solver parameters, and the
/// vehicle list. Loadable from JSON (unknown keys rejected).
struct ScenarioConfig {
  std::string name{"scenario"};

  // road
  double lane_width{4.0};
  double arm_length{20.0};
  double turn_radius{6.0};

  // params
  double d_safe{3.0};
  double d_cmu{std::numeric_limits<double>::infinity()};
  double tau_s{0.1};
  int horizon{100};
  double sigma{10.0};
  double eps{0.01};
  int max_admm_iterations{100};
  int max_ddp_iterations{100};
  double delta_min{-0.6}, delta_max{0.6};
  double accel_min{-3.0}, accel_max{3.0};
  double vehicle_length{2.5};
  double vehicle_width{1.6};
  double wheelbase{2.5};
  double nominal_speed{5.0};
  Eigen::Vector4d q_diag{1.0, 1.0, 0.1, 0.1};
  Eigen::Vector2d r_diag{0.1, 0.1};

  std::vector<VehicleSpec> vehicles;
  std::string backend{"sdr"};
  std::uint64_t seed{0};
  int threads{0};

  void validate() const; // throws ConfigError
};

ScenarioConfig parse_config(const std::string &json_text);
ScenarioConfig load_config(const std::string &path);
std::string config_to_json(const ScenarioConfig &config);

Backend backend_from_string(const std::string &name); // throws ConfigError
std::string backend_to_string(Backend backend);

/// Reference trajectories sampled along the lane-arc-lane path at the
/// nominal speed, plus the path start used as the default initial state.
struct ReferenceSet {
  std::vector<Eigen::MatrixXd> refs; // 4 x T per vehicle
  std::vector<Eigen::Vector4d> x0;
};

ReferenceSet generate_reference(const ScenarioConfig &config);

MultiVehicleProblem build_problem(const ScenarioConfig &config);

struct ExperimentReport {
  ScenarioConfig config;
  std::string backend;
  AdmmStatus status{AdmmStatus::NotConverged};
  double residual{0.0};
  int iterations{0};
  double total_seconds{0.0};
  ReferenceSet references;
  std::vector<std::vector<Trajectory>> iterates;
  std::vector<Trajectory> final_trajectories;
  std::vector<IterationRecord> records;
  std::vector<std::pair<int, int>> dist_pairs;  // all pairs i < j
  std::vector<Eigen::VectorXd> distances;       // per pair, length T

  double min_distance() const;
};

/// Builds the problem, runs the ADMM loop, and assembles the report.
/// Never throws on NotConverged; solver errors are rethrown.
ExperimentReport run_experiment(const ScenarioConfig &config,
                                const ProgressSink &sink = nullptr);

/// Built-in configurations matching the two driving scenarios.
ScenarioConfig junction_scenario();     // 3 vehicles, three-way junction
ScenarioConfig intersection_scenario(); // 12 vehicles, four-way crossing

} // namespace coopadmm

#endif // COOPADMM_SCENARIO_HPP
