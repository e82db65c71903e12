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

#include "coopadmm/topology.hpp"

#include <cmath>
#include <stdexcept>

namespace coopadmm {

std::vector<int> ConstraintGraph::neighbors(int i) const {
  if (i < 0 || i >= N) {
    throw std::out_of_range("ConstraintGraph::neighbors: node index " +
                            std::to_string(i) + " outside [0, " +
                            std::to_string(N) + ")");
  }
  std::vector<int> out;
  for (int j = 0; j < N; ++j) {
    if (adjacency(i, j)) out.push_back(j);
  }
  return out;
}

ConstraintGraph build_graph(const std::vector<Eigen::Vector2d> &positions,
                            double d_safe, double d_cmu) {
  if (d_safe > d_cmu) {
    throw ConfigError("build_graph: d_safe exceeds d_cmu");
  }
  for (const auto &p : positions) {
    if (!p.allFinite()) throw ConfigError("build_graph: non-finite position");
  }
  ConstraintGraph g;
  g.N = static_cast<int>(positions.size());
  g.adjacency.setConstant(g.N, g.N, false);
  for (int i = 0; i < g.N; ++i) {
    for (int j = i + 1; j < g.N; ++j) {
      const double d = (positions[i] - positions[j]).norm();
      if (d >= d_safe && d <= d_cmu) {
        g.edges.emplace_back(i, j);
        g.adjacency(i, j) = true;
        g.adjacency(j, i) = true;
      }
    }
  }
  return g;
}

} // namespace coopadmm
