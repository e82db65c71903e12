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

#ifndef COOPADMM_PROJECTION_HPP
#define COOPADMM_PROJECTION_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace coopadmm {

enum class Backend { Sdr, Miqp, Oracle };

/// Per-timestep projection data: proximal targets for the input and position
/// components plus the active pair list.
struct ProjectionTarget {
  int tau{0};
  Eigen::VectorXd c_u;  // N * m
  Eigen::VectorXd c_p;  // N * n_p
  std::vector<std::pair<int, int>> pairs;
  double d_safe{0.0};
  Eigen::VectorXd u_lo, u_hi; // N * m, stacked like c_u
};

/// Elementwise box projection (the closed-form z_u update).
Eigen::VectorXd clamp_inputs(const Eigen::VectorXd &c_u,
                             const Eigen::VectorXd &lo,
                             const Eigen::VectorXd &hi);

/// Nonconvex position projection. The Oracle backend is a brute-force local
/// search intended for tests and baselines, not production runs.
Eigen::VectorXd project_positions(const ProjectionTarget &target,
                                  Backend backend, std::uint64_t rng_seed);

} // namespace coopadmm

#endif // COOPADMM_PROJECTION_HPP
