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

#ifndef COOPADMM_MIQP_HPP
#define COOPADMM_MIQP_HPP

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace coopadmm {

/// Big-M reformulation of the position projection: keep-out per pair is the
/// axis-aligned square; one of the four half-plane rows
///   r = 0: +dx, 1: -dx, 2: +dy, 3: -dy  of z_i - z_j
/// must reach d_safe with its binary at 0.
struct BigMProjection {
  Eigen::VectorXd c; // stacked target, N * 2
  std::vector<std::pair<int, int>> pairs;
  double d_safe{0.0};
  double big_m{0.0}; // <= 0 selects the instance-scaled default

  static constexpr int kRowsPerPair = 4;

  /// d_safe + 2 max|c| + 10 when big_m is unset.
  double effective_big_m() const;
};

struct MiqpResult {
  Eigen::VectorXd z;
  double objective{0.0};
  int nodes{0};
};

/// Exact best-first branch-and-bound over the per-pair row choice;
/// continuous relaxations solved by least-distance programming.
MiqpResult solve_miqp(const BigMProjection &p);

/// min ||z - c||^2 s.t. G z >= h, solved through the NNLS reduction of
/// least-distance programming. Returns nullopt when infeasible.
std::optional<Eigen::VectorXd> solve_least_distance(const Eigen::VectorXd &c,
                                                    const Eigen::MatrixXd &G,
                                                    const Eigen::VectorXd &h);

} // namespace coopadmm

#endif // COOPADMM_MIQP_HPP
