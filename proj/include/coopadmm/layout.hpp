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

#ifndef COOPADMM_LAYOUT_HPP
#define COOPADMM_LAYOUT_HPP

#include <Eigen/Dense>

#include "coopadmm/errors.hpp"

namespace coopadmm {

// Stacked consensus variables. The flat y vector holds one block per
// (vehicle i, step tau in [1, T]) in vehicle-major order:
//   y_{i,tau} = (x_{i,tau}, u_{i,tau-1})            length n + m
// The consensus copy z and dual lambda share the layout
//   z_{i,tau} = (z_{p,i,tau}, z_{u,i,tau-1})        length n_p + m
// Selection is realized through index arithmetic, never dense matrices.
struct HorizonLayout {
  int N{0};   // vehicle count
  int T{0};   // horizon steps
  int n{4};   // state dim
  int m{2};   // input dim
  int n_p{2}; // position dim (leading components of the state)

  int y_block() const { return n + m; }
  int z_block() const { return n_p + m; }
  int y_size() const { return N * T * y_block(); }
  int z_size() const { return N * T * z_block(); }

  // Offset of block (i, tau), tau in [1, T].
  int y_offset(int i, int tau) const {
    return (i * T + (tau - 1)) * y_block();
  }
  int z_offset(int i, int tau) const {
    return (i * T + (tau - 1)) * z_block();
  }

  // Offsets of the components inside a block.
  int y_state_offset(int i, int tau) const { return y_offset(i, tau); }
  int y_input_offset(int i, int tau) const { return y_offset(i, tau) + n; }
  int z_pos_offset(int i, int tau) const { return z_offset(i, tau); }
  int z_input_offset(int i, int tau) const { return z_offset(i, tau) + n_p; }

  // Source index in y for a given flat z index (the A-block structure of
  // the selection operator).
  int z_to_y_index(int zi) const {
    const int blk = zi / z_block();
    const int off = zi % z_block();
    return blk * y_block() + (off < n_p ? off : n + (off - n_p));
  }

  bool operator==(const HorizonLayout &) const = default;
};

/// Extracts the (position, input) components of every y block: the action of
/// the selection operator on y.
Eigen::VectorXd select(const HorizonLayout &layout, const Eigen::VectorXd &y);

/// Consensus violation ||select(y) - z||.
double primal_residual(const HorizonLayout &layout, const Eigen::VectorXd &y,
                       const Eigen::VectorXd &z);

/// Per-vehicle cost data. Weights are validated once at load.
struct CostWeights {
  Eigen::MatrixXd Q; // n x n, positive semi-definite
  Eigen::MatrixXd R; // m x m, positive definite
  // Reference states x_{r,tau} for tau = 1..T, one column per step.
  Eigen::MatrixXd x_ref; // n x T

  /// Eigenvalue check of the definiteness invariants; throws ConfigError.
  void validate() const;
};

/// Elementwise input box, shared across steps. State bounds are accepted but
/// inactive unless set.
struct Bounds {
  Eigen::VectorXd u_lo, u_hi; // m
  Eigen::VectorXd x_lo, x_hi; // n, empty when unbounded

  void validate() const;
  bool has_state_bounds() const { return x_lo.size() > 0; }
};

} // namespace coopadmm

#endif // COOPADMM_LAYOUT_HPP
