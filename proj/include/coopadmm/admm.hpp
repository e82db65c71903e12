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

#ifndef COOPADMM_ADMM_HPP
#define COOPADMM_ADMM_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "coopadmm/ddp.hpp"
#include "coopadmm/dynamics.hpp"
#include "coopadmm/layout.hpp"
#include "coopadmm/projection.hpp"
#include "coopadmm/topology.hpp"

namespace coopadmm {

struct AgentProblem {
  std::shared_ptr<const DynamicsModel> model;
  Eigen::VectorXd x0;
  CostWeights weights;
  Bounds bounds;
};

/// The stacked multi-vehicle problem handed to the ADMM loop.
struct MultiVehicleProblem {
  HorizonLayout layout;
  std::vector<AgentProblem> agents;
  ConstraintGraph graph;
  double d_safe{0.0};
};

struct AdmmOptions {
  double sigma{10.0};
  double eps{0.01};
  int max_iterations{100};
  Backend backend{Backend::Sdr};
  DdpOptions ddp;
  std::uint64_t seed{0};
  int threads{0}; // 0 = COOP_ADMM_THREADS / hardware default
};

struct IterationRecord {
  int k{0};
  double residual{0.0};
  double dual_residual{0.0};
  double y_step_ms{0.0};
  double z_step_ms{0.0};
};

using ProgressSink = std::function<void(const IterationRecord &)>;

struct AdmmState {
  int k{0};
  Eigen::VectorXd y, z, lambda;
  std::vector<double> residual_history;
  std::vector<IterationRecord> records;
  std::vector<Trajectory> trajectories; // current per-agent DDP output
};

enum class AdmmStatus { Converged, NotConverged };

struct AdmmResult {
  AdmmStatus status{AdmmStatus::NotConverged};
  AdmmState state; // best-residual iterate when not converged
  std::vector<Trajectory> trajectories;
  // Decoded per-iteration trajectories, outer index = ADMM iteration.
  std::vector<std::vector<Trajectory>> iterates;
  double residual{0.0};
};

/// Fresh state: zero z and lambda, y decoded from the zero-input rollouts.
AdmmState initial_state(const MultiVehicleProblem &problem);

/// One ADMM iteration: parallel per-agent DDP, parallel per-timestep
/// projection, dual ascent. Mutates state in place and returns the record.
IterationRecord admm_step(AdmmState &state, const MultiVehicleProblem &problem,
                          const AdmmOptions &opts);

/// Full loop with the primal-residual stopping rule.
AdmmResult run(const MultiVehicleProblem &problem, const AdmmOptions &opts,
               const ProgressSink &sink = nullptr);

} // namespace coopadmm

#endif // COOPADMM_ADMM_HPP
