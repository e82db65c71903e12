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

#ifndef COOPADMM_SDP_HPP
#define COOPADMM_SDP_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace coopadmm {

/// Small dense SDP:
///   min <C, X>  s.t.  <A_l, X> >= b_l,  <E_j, X> = c_j,  X >= 0.
struct SdpProblem {
  int d{0};
  Eigen::MatrixXd C;
  std::vector<std::pair<Eigen::MatrixXd, double>> ineq;
  std::vector<std::pair<Eigen::MatrixXd, double>> eq;
};

enum class SdpStatus { Optimal, MaxIterations, Infeasible };

struct SdpSolution {
  Eigen::MatrixXd X;
  double objective{0.0};
  SdpStatus status{SdpStatus::MaxIterations};
  int iterations{0};
  double duality_gap{0.0};
  double dual_objective{0.0};
};

/// Primal-dual path-following solver (symmetrized Newton direction with a
/// Mehrotra predictor-corrector step, fraction-to-boundary 0.99).
/// Inequalities are handled through nonnegative slacks.
SdpSolution solve_sdp(const SdpProblem &p, double tol = 1e-7,
                      int max_iterations = 200);

/// Structure of the lifted collision projection: X = [Z z; z' 1] with
/// z stacking N position vectors of dimension n_p, pairwise-distance
/// constraints on the listed pairs, and target c_p in the objective.
struct LiftedLayout {
  int N{0};
  int n_p{2};
  Eigen::VectorXd c_p; // N * n_p
  std::vector<std::pair<int, int>> pairs;
  double d_safe{0.0};

  int dim() const { return N * n_p; }
};

/// Assembles the lifted SDP (linear objective Tr(Z) - 2 c_p' z, trace
/// inequalities per pair, corner entry pinned to 1).
SdpProblem build_lifted_problem(const LiftedLayout &layout);

struct ExtractionResult {
  Eigen::VectorXd z_p;
  bool rank1{false}; // border read directly, no randomization needed
};

/// Recovers a feasible position vector from the relaxed solution: direct
/// border read when X is numerically rank-1, otherwise Gaussian
/// randomization with outward-scaling repair (64 samples, best kept).
ExtractionResult extract_position(const SdpSolution &sol,
                                  const LiftedLayout &layout,
                                  std::uint64_t rng_seed);

} // namespace coopadmm

#endif // COOPADMM_SDP_HPP
