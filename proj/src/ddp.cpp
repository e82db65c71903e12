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

#include "coopadmm/ddp.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace coopadmm {

Trajectory Trajectory::zero_rollout(const DynamicsModel &model,
                                    const Eigen::VectorXd &x0, int T) {
  std::vector<Eigen::VectorXd> inputs(
      T, Eigen::VectorXd::Zero(model.input_dim()));
  return rollout(model, x0, inputs);
}

Trajectory Trajectory::rollout(const DynamicsModel &model,
                               const Eigen::VectorXd &x0,
                               const std::vector<Eigen::VectorXd> &inputs) {
  Trajectory traj;
  traj.inputs = inputs;
  traj.states.reserve(inputs.size() + 1);
  traj.states.push_back(x0);
  for (const auto &u : inputs) {
    traj.states.push_back(model.step(traj.states.back(), u));
  }
  return traj;
}

double StageCostModel::state_cost(const Eigen::VectorXd &x, int tau) const {
  const Eigen::VectorXd dx = x - x_ref.col(tau - 1);
  double c = dx.dot(Q * dx);
  if (sigma > 0.0 && n_p > 0) {
    const Eigen::VectorXd dp = x.head(n_p) - t_p.col(tau - 1);
    c += 0.5 * sigma * dp.squaredNorm();
  }
  return c;
}

double StageCostModel::input_cost(const Eigen::VectorXd &u, int tau) const {
  double c = u.dot(R * u);
  if (sigma > 0.0) {
    const Eigen::VectorXd du = u - t_u.col(tau);
    c += 0.5 * sigma * du.squaredNorm();
  }
  return c;
}

double StageCostModel::total_cost(const Trajectory &traj) const {
  const int T = traj.horizon();
  double c = 0.0;
  for (int tau = 0; tau < T; ++tau) c += input_cost(traj.inputs[tau], tau);
  for (int tau = 1; tau <= T; ++tau) c += state_cost(traj.states[tau], tau);
  return c;
}

Eigen::VectorXd StageCostModel::state_grad(const Eigen::VectorXd &x,
                                           int tau) const {
  Eigen::VectorXd g = 2.0 * Q * (x - x_ref.col(tau - 1));
  if (sigma > 0.0 && n_p > 0) {
    g.head(n_p) += sigma * (x.head(n_p) - t_p.col(tau - 1));
  }
  return g;
}

Eigen::MatrixXd StageCostModel::state_hess() const {
  Eigen::MatrixXd h = 2.0 * Q;
  if (sigma > 0.0 && n_p > 0) {
    h.topLeftCorner(n_p, n_p) +=
        sigma * Eigen::MatrixXd::Identity(n_p, n_p);
  }
  return h;
}

Eigen::VectorXd StageCostModel::input_grad(const Eigen::VectorXd &u,
                                           int tau) const {
  Eigen::VectorXd g = 2.0 * R * u;
  if (sigma > 0.0) g += sigma * (u - t_u.col(tau));
  return g;
}

Eigen::MatrixXd StageCostModel::input_hess() const {
  Eigen::MatrixXd h = 2.0 * R;
  if (sigma > 0.0) {
    h += sigma * Eigen::MatrixXd::Identity(R.rows(), R.cols());
  }
  return h;
}

double GainSchedule::predicted_reduction() const {
  double s = 0.0;
  for (double dv : delta_v) s += dv;
  return s;
}

GainSchedule backward_pass(const DynamicsModel &model, const Trajectory &traj,
                           const StageCostModel &cost, double reg) {
  const int T = traj.horizon();
  const int n = model.state_dim();
  const int m = model.input_dim();

  GainSchedule gains;
  gains.k.resize(T);
  gains.K.resize(T);
  gains.delta_v.resize(T);

  Eigen::VectorXd v_x = cost.state_grad(traj.states[T], T);
  Eigen::MatrixXd v_xx = cost.state_hess();

  Eigen::MatrixXd f_x(n, n), f_u(n, m);
  for (int tau = T - 1; tau >= 0; --tau) {
    model.linearize(traj.states[tau], traj.inputs[tau], f_x, f_u);

    Eigen::VectorXd l_x = tau > 0
                              ? cost.state_grad(traj.states[tau], tau)
                              : Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd l_xx = tau > 0 ? cost.state_hess()
                                   : Eigen::MatrixXd::Zero(n, n);

    const Eigen::VectorXd q_x = l_x + f_x.transpose() * v_x;
    const Eigen::VectorXd q_u =
        cost.input_grad(traj.inputs[tau], tau) + f_u.transpose() * v_x;
    const Eigen::MatrixXd q_xx = l_xx + f_x.transpose() * v_xx * f_x;
    const Eigen::MatrixXd q_ux = f_u.transpose() * v_xx * f_x;
    Eigen::MatrixXd q_uu =
        cost.input_hess() + f_u.transpose() * v_xx * f_u;
    q_uu.diagonal().array() += reg;

    Eigen::LLT<Eigen::MatrixXd> llt(q_uu);
    if (llt.info() != Eigen::Success) {
      throw NotPositiveDefinite("backward_pass: Q_uu not positive definite "
                                "at step " +
                                std::to_string(tau));
    }
    gains.k[tau] = -llt.solve(q_u);
    gains.K[tau] = -llt.solve(q_ux);
    gains.delta_v[tau] = 0.5 * q_u.dot(gains.k[tau]);

    v_x = q_x + gains.K[tau].transpose() * q_uu * gains.k[tau] +
          gains.K[tau].transpose() * q_u + q_ux.transpose() * gains.k[tau];
    v_xx = q_xx + gains.K[tau].transpose() * q_uu * gains.K[tau] +
           gains.K[tau].transpose() * q_ux +
           q_ux.transpose() * gains.K[tau];
    v_xx = 0.5 * (v_xx + v_xx.transpose()).eval();
  }
  return gains;
}

Trajectory forward_pass(const DynamicsModel &model, const Trajectory &traj,
                        const GainSchedule &gains, double alpha,
                        const Bounds &bounds) {
  const int T = traj.horizon();
  Trajectory out;
  out.states.reserve(T + 1);
  out.inputs.reserve(T);
  out.states.push_back(traj.states[0]);
  for (int tau = 0; tau < T; ++tau) {
    Eigen::VectorXd u = traj.inputs[tau] + alpha * gains.k[tau] +
                        gains.K[tau] * (out.states.back() - traj.states[tau]);
    if (bounds.u_lo.size() > 0) {
      u = u.cwiseMax(bounds.u_lo).cwiseMin(bounds.u_hi);
    }
    out.inputs.push_back(u);
    out.states.push_back(model.step(out.states.back(), u));
  }
  return out;
}

DdpResult solve_agent(const DynamicsModel &model, const StageCostModel &cost,
                      const Bounds &bounds, const Trajectory &init,
                      const DdpOptions &opts) {
  DdpResult best;
  best.traj = init;
  best.cost = cost.total_cost(init);

  double reg = opts.reg_init;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    best.iterations = iter + 1;

    GainSchedule gains;
    for (;;) {
      try {
        gains = backward_pass(model, best.traj, cost, reg);
        break;
      } catch (const NotPositiveDefinite &) {
        reg *= 10.0;
        if (reg > opts.reg_max) throw;
      }
    }

    // Nothing left to gain: stationary point of the quadratic model.
    if (std::abs(gains.predicted_reduction()) <
        1e-12 * (1.0 + std::abs(best.cost))) {
      best.converged = true;
      return best;
    }

    bool accepted = false;
    for (double alpha = 1.0; alpha >= opts.alpha_min; alpha *= 0.5) {
      Trajectory cand;
      try {
        cand = forward_pass(model, best.traj, gains, alpha, bounds);
      } catch (const DomainError &) {
        continue; // rollout left the validity region; shrink the step
      }
      const double cand_cost = cost.total_cost(cand);
      if (cand_cost < best.cost) {
        const double decrease = best.cost - cand_cost;
        best.traj = std::move(cand);
        const double prev = best.cost;
        best.cost = cand_cost;
        accepted = true;
        reg = std::max(opts.reg_init, reg * 0.5);
        if (decrease < opts.cost_tol * (1.0 + std::abs(prev))) {
          best.converged = true;
          return best;
        }
        break;
      }
    }
    if (!accepted) {
      reg *= 2.0;
      if (reg > opts.reg_max) {
        // Line search cannot improve any further; accept the iterate.
        best.converged = true;
        return best;
      }
    }
  }
  return best; // max iterations, converged stays false
}

} // namespace coopadmm
