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

#ifndef COOPADMM_TOPOLOGY_HPP
#define COOPADMM_TOPOLOGY_HPP

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "coopadmm/errors.hpp"

namespace coopadmm {

/// Undirected coupling-constraint graph over the vehicle set. Edges are
/// stored once as (i, j) with i < j; the adjacency matrix is kept symmetric.
struct ConstraintGraph {
  int N{0};
  std::vector<std::pair<int, int>> edges;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adjacency;

  /// Sorted neighbor list of node i. Throws std::out_of_range on i >= N.
  std::vector<int> neighbors(int i) const;
};

/// Builds the graph from current positions: an edge is present iff the
/// pairwise distance lies in [d_safe, d_cmu] (both ends inclusive).
/// d_cmu may be +infinity (fully connected beyond d_safe).
ConstraintGraph build_graph(const std::vector<Eigen::Vector2d> &positions,
                            double d_safe, double d_cmu);

} // namespace coopadmm

#endif // COOPADMM_TOPOLOGY_HPP
