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

#ifndef COOPADMM_DDP_HPP
#define COOPADMM_DDP_HPP

#include <vector>

#include <Eigen/Dense>

#include "coopadmm/dynamics.hpp"
#include "coopadmm/layout.hpp"

namespace coopadmm {

/// State/input sequences x_0..x_T, u_0..u_{T-1}. All solver entry points
/// keep trajectories dynamically consistent: states[t+1] = f(states[t],
/// inputs[t]).
struct Trajectory {
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> inputs;

  int horizon() const { return static_cast<int>(inputs.size()); }

  /// Zero-input rollout from x0.
  static Trajectory zero_rollout(const DynamicsModel &model,
                                 const Eigen::VectorXd &x0, int T);

  /// Re-rolls the states from states[0] under the stored inputs.
  static Trajectory rollout(const DynamicsModel &model,
                            const Eigen::VectorXd &x0,
                            const std::vector<Eigen::VectorXd> &inputs);
};

/// Quadratic tracking stage cost with an optional consensus proximal term.
/// Over a horizon-T trajectory the objective is
///   sum_{tau=1..T} ||x_tau - x_ref_tau||^2_Q
///                  + (sigma/2) ||pos(x_tau) - t_p_tau||^2
/// + sum_{tau=0..T-1} ||u_tau||^2_R + (sigma/2) ||u_tau - t_u_tau||^2
/// where pos() takes the first n_p state components. sigma = 0 turns the
/// proximal term off (plain tracking / LQR form).
struct StageCostModel {
  Eigen::MatrixXd Q;     // n x n, PSD
  Eigen::MatrixXd R;     // m x m, PD
  Eigen::MatrixXd x_ref; // n x T, column tau-1 pairs with x_tau
  double sigma{0.0};
  int n_p{0};
  Eigen::MatrixXd t_p; // n_p x T, column tau-1 pairs with pos(x_tau)
  Eigen::MatrixXd t_u; // m x T, column tau pairs with u_tau

  double total_cost(const Trajectory &traj) const;
  double state_cost(const Eigen::VectorXd &x, int tau) const; // tau in [1,T]
  double input_cost(const Eigen::VectorXd &u, int tau) const; // tau in [0,T)

  // Gradients/Hessians of the per-step terms above.
  Eigen::VectorXd state_grad(const Eigen::VectorXd &x, int tau) const;
  Eigen::MatrixXd state_hess() const;
  Eigen::VectorXd input_grad(const Eigen::VectorXd &u, int tau) const;
  Eigen::MatrixXd input_hess() const;
};

/// Feedforward/feedback policy from one backward pass, plus the predicted
/// value reduction per step.
struct GainSchedule {
  std::vector<Eigen::VectorXd> k; // m
  std::vector<Eigen::MatrixXd> K; // m x n
  std::vector<double> delta_v;    // -(1/2) Q_u' Q_uu^-1 Q_u per step

  double predicted_reduction() const;
};

struct DdpOptions {
  int max_iterations{100};
  double cost_tol{1e-6};  // relative decrease threshold
  double alpha_min{1e-4}; // backtracking floor before regularization grows
  double reg_init{1e-6};
  double reg_max{1e8};
};

struct DdpResult {
  Trajectory traj;
  double cost{0.0};
  int iterations{0};
  bool converged{false};
};

/// Gauss-Newton backward recursion along traj. Throws NotPositiveDefinite
/// when Q_uu + reg*I fails the Cholesky factorization; the caller raises
/// reg and retries.
GainSchedule backward_pass(const DynamicsModel &model, const Trajectory &traj,
                           const StageCostModel &cost, double reg);

/// Rollout under u = u_hat + alpha*k + K (x - x_hat), inputs clamped to the
/// box before stepping.
Trajectory forward_pass(const DynamicsModel &model, const Trajectory &traj,
                        const GainSchedule &gains, double alpha,
                        const Bounds &bounds);

/// Full DDP iteration loop with backtracking line search and Levenberg-style
/// regularization on Q_uu.
DdpResult solve_agent(const DynamicsModel &model, const StageCostModel &cost,
                      const Bounds &bounds, const Trajectory &init,
                      const DdpOptions &opts = {});

} // namespace coopadmm

#endif // COOPADMM_DDP_HPP
