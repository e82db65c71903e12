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

#include "coopadmm/layout.hpp"

#include <Eigen/Eigenvalues>

namespace coopadmm {

Eigen::VectorXd select(const HorizonLayout &layout, const Eigen::VectorXd &y) {
  Eigen::VectorXd out(layout.z_size());
  for (int zi = 0; zi < layout.z_size(); ++zi) {
    out[zi] = y[layout.z_to_y_index(zi)];
  }
  return out;
}

double primal_residual(const HorizonLayout &layout, const Eigen::VectorXd &y,
                       const Eigen::VectorXd &z) {
  return (select(layout, y) - z).norm();
}

void CostWeights::validate() const {
  if (Q.rows() != Q.cols() || R.rows() != R.cols()) {
    throw ConfigError("CostWeights: Q and R must be square");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eq(Q);
  if (eq.eigenvalues().minCoeff() < -1e-10) {
    throw ConfigError("CostWeights: Q is not positive semi-definite");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> er(R);
  if (er.eigenvalues().minCoeff() <= 0.0) {
    throw ConfigError("CostWeights: R is not positive definite");
  }
}

void Bounds::validate() const {
  if (u_lo.size() != u_hi.size()) {
    throw ConfigError("Bounds: input bound sizes differ");
  }
  if ((u_lo.array() > u_hi.array()).any()) {
    throw ConfigError("Bounds: input lower bound above upper bound");
  }
  if (x_lo.size() != x_hi.size()) {
    throw ConfigError("Bounds: state bound sizes differ");
  }
  if (x_lo.size() > 0 && (x_lo.array() > x_hi.array()).any()) {
    throw ConfigError("Bounds: state lower bound above upper bound");
  }
}

} // namespace coopadmm
