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

#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "coopadmm/ddp.hpp"
#include "coopadmm/dynamics.hpp"

using namespace coopadmm;

namespace {

struct LqrInstance {
  Eigen::MatrixXd A, B, Q, R;
  Eigen::VectorXd x0;
  int T{0};
};

struct LqrSolution {
  double cost{0.0};
  std::vector<Eigen::VectorXd> inputs;
};

// Independent finite-horizon Riccati recursion for the regulator
//   min sum_{tau=1..T} x_tau' Q x_tau + sum_{tau=0..T-1} u_tau' R u_tau
// subject to x_{tau+1} = A x_tau + B u_tau.
LqrSolution riccati_oracle(const LqrInstance &inst) {
  const int n = static_cast<int>(inst.A.rows());
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  std::vector<Eigen::MatrixXd> K(inst.T);
  for (int t = inst.T - 1; t >= 0; --t) {
    const Eigen::MatrixXd S = inst.Q + P;
    const Eigen::MatrixXd H = inst.R + inst.B.transpose() * S * inst.B;
    K[t] = H.ldlt().solve(inst.B.transpose() * S * inst.A);
    P = inst.A.transpose() * S * (inst.A - inst.B * K[t]);
    P = 0.5 * (P + P.transpose()).eval();
  }
  LqrSolution sol;
  sol.cost = inst.x0.dot(P * inst.x0);
  Eigen::VectorXd x = inst.x0;
  for (int t = 0; t < inst.T; ++t) {
    sol.inputs.push_back(-K[t] * x);
    x = inst.A * x + inst.B * sol.inputs.back();
  }
  return sol;
}

LqrInstance random_lqr(int n, int m, int T, std::mt19937_64 &rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto fill = [&](int r, int c) {
    Eigen::MatrixXd M(r, c);
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < c; ++j) M(i, j) = gauss(rng);
    }
    return M;
  };

  LqrInstance inst;
  inst.T = T;
  inst.A = fill(n, n);
  const double spectral =
      inst.A.jacobiSvd().singularValues().maxCoeff();
  inst.A *= 0.95 / std::max(1.0, spectral); // keep rollouts bounded
  inst.B = fill(n, m);
  const Eigen::MatrixXd G = fill(n, n);
  inst.Q = G.transpose() * G / n;
  const Eigen::MatrixXd H = fill(m, m);
  inst.R = H.transpose() * H / m +
           0.1 * Eigen::MatrixXd::Identity(m, m);
  inst.x0 = fill(n, 1);
  return inst;
}

StageCostModel regulator_cost(const LqrInstance &inst) {
  StageCostModel cost;
  cost.Q = inst.Q;
  cost.R = inst.R;
  cost.x_ref = Eigen::MatrixXd::Zero(inst.A.rows(), inst.T);
  return cost;
}

// Central finite-difference gradient of the shooting objective with
// respect to the flattened input sequence.
Eigen::VectorXd shooting_gradient(const DynamicsModel &model,
                                  const StageCostModel &cost,
                                  const Eigen::VectorXd &x0,
                                  const Eigen::VectorXd &u_flat, int T,
                                  double h = 1e-6) {
  const int m = model.input_dim();
  const auto objective = [&](const Eigen::VectorXd &flat) {
    std::vector<Eigen::VectorXd> inputs(T);
    for (int t = 0; t < T; ++t) inputs[t] = flat.segment(t * m, m);
    return cost.total_cost(Trajectory::rollout(model, x0, inputs));
  };
  Eigen::VectorXd g(u_flat.size());
  for (int i = 0; i < u_flat.size(); ++i) {
    Eigen::VectorXd up = u_flat, um = u_flat;
    up[i] += h;
    um[i] -= h;
    g[i] = (objective(up) - objective(um)) / (2 * h);
  }
  return g;
}

Eigen::VectorXd flatten_inputs(const Trajectory &traj) {
  const int T = traj.horizon();
  const int m = static_cast<int>(traj.inputs[0].size());
  Eigen::VectorXd flat(T * m);
  for (int t = 0; t < T; ++t) flat.segment(t * m, m) = traj.inputs[t];
  return flat;
}

} // namespace

TEST_CASE("rollout helpers keep states dynamically consistent") {
  VehicleParams params;
  BicycleModel model(params);
  Eigen::VectorXd x0(4);
  x0 << 1.0, -2.0, 0.3, 5.0;
  const Trajectory traj = Trajectory::zero_rollout(model, x0, 12);
  REQUIRE(traj.horizon() == 12);
  REQUIRE(traj.states.size() == 13);
  CHECK((traj.states[0] - x0).norm() == 0.0);
  for (int t = 0; t < 12; ++t) {
    CHECK(traj.inputs[t].norm() == 0.0);
    CHECK((traj.states[t + 1] - model.step(traj.states[t], traj.inputs[t]))
              .norm() == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("solve_agent matches the Riccati recursion on random instances") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const LqrInstance inst = random_lqr(4, 2, 20, rng);
    const LqrSolution oracle = riccati_oracle(inst);

    LinearModel model(inst.A, inst.B,
                      Eigen::VectorXd::Zero(inst.A.rows()));
    const StageCostModel cost = regulator_cost(inst);
    DdpOptions opts;
    opts.cost_tol = 1e-12; // drive the quadratic model to stationarity
    opts.reg_init = 1e-12;
    const DdpResult res =
        solve_agent(model, cost, Bounds{},
                    Trajectory::zero_rollout(model, inst.x0, inst.T), opts);

    CHECK(res.converged);
    CHECK(std::abs(res.cost - oracle.cost) <=
          1e-6 * (1.0 + std::abs(oracle.cost)));
    for (int t = 0; t < inst.T; ++t) {
      CHECK((res.traj.inputs[t] - oracle.inputs[t]).lpNorm<Eigen::Infinity>() <=
            1e-6);
    }
  }
}

TEST_CASE("backward pass is silent at a global minimum") {
  VehicleParams params;
  BicycleModel model(params);
  Eigen::VectorXd x0(4);
  x0 << 0.0, 0.0, 0.2, 6.0;
  const int T = 15;
  const Trajectory traj = Trajectory::zero_rollout(model, x0, T);

  StageCostModel cost;
  cost.Q = Eigen::Vector4d(1.0, 1.0, 0.1, 0.1).asDiagonal();
  cost.R = Eigen::Vector2d(0.1, 0.1).asDiagonal();
  cost.x_ref.resize(4, T);
  for (int tau = 1; tau <= T; ++tau) cost.x_ref.col(tau - 1) = traj.states[tau];

  // The zero-input rollout reproduces the reference exactly, so the
  // feedforward terms and the predicted reduction vanish.
  const GainSchedule gains = backward_pass(model, traj, cost, 1e-6);
  for (int t = 0; t < T; ++t) {
    CHECK(gains.k[t].norm() == doctest::Approx(0.0).epsilon(1e-10));
  }
  CHECK(std::abs(gains.predicted_reduction()) < 1e-12);
}

TEST_CASE("forward pass with zero gains reproduces the trajectory") {
  VehicleParams params;
  BicycleModel model(params);
  Eigen::VectorXd x0(4);
  x0 << 0.0, 0.0, 0.0, 4.0;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> steer(-0.3, 0.3);
  std::vector<Eigen::VectorXd> inputs;
  for (int t = 0; t < 10; ++t) {
    inputs.push_back(Eigen::Vector2d(steer(rng), steer(rng)));
  }
  const Trajectory traj = Trajectory::rollout(model, x0, inputs);

  GainSchedule zero;
  zero.k.assign(10, Eigen::VectorXd::Zero(2));
  zero.K.assign(10, Eigen::MatrixXd::Zero(2, 4));
  zero.delta_v.assign(10, 0.0);

  const Trajectory out = forward_pass(model, traj, zero, 1.0, Bounds{});
  for (int t = 0; t <= 10; ++t) {
    CHECK((out.states[t] - traj.states[t]).norm() ==
          doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("forward pass clamps inputs to the box") {
  VehicleParams params;
  BicycleModel model(params);
  Eigen::VectorXd x0(4);
  x0 << 0.0, 0.0, 0.0, 4.0;
  const Trajectory traj = Trajectory::zero_rollout(model, x0, 5);

  GainSchedule gains;
  gains.k.assign(5, Eigen::Vector2d(5.0, -9.0)); // far outside the box
  gains.K.assign(5, Eigen::MatrixXd::Zero(2, 4));
  gains.delta_v.assign(5, 0.0);

  Bounds bounds;
  bounds.u_lo = Eigen::Vector2d(-0.6, -3.0);
  bounds.u_hi = Eigen::Vector2d(0.6, 3.0);
  const Trajectory out = forward_pass(model, traj, gains, 1.0, bounds);
  for (const auto &u : out.inputs) {
    CHECK(u[0] == 0.6);
    CHECK(u[1] == -3.0);
  }
}

TEST_CASE("solve_agent decreases cost and stays consistent and bounded") {
  VehicleParams params;
  BicycleModel model(params);
  Eigen::VectorXd x0(4);
  x0 << 0.0, 2.0, M_PI, 5.0;

  const int T = 40;
  StageCostModel cost;
  cost.Q = Eigen::Vector4d(1.0, 1.0, 0.1, 0.1).asDiagonal();
  cost.R = Eigen::Vector2d(0.1, 0.1).asDiagonal();
  cost.x_ref.resize(4, T);
  for (int tau = 1; tau <= T; ++tau) {
    // Slow down while drifting one lane over.
    cost.x_ref.col(tau - 1) << -0.5 * tau, 2.0 + 0.05 * tau, M_PI, 4.0;
  }

  Bounds bounds;
  bounds.u_lo = Eigen::Vector2d(-0.6, -3.0);
  bounds.u_hi = Eigen::Vector2d(0.6, 3.0);

  const Trajectory init = Trajectory::zero_rollout(model, x0, T);
  const double init_cost = cost.total_cost(init);
  const DdpResult res = solve_agent(model, cost, bounds, init);

  CHECK(res.cost < init_cost);
  CHECK(res.cost == doctest::Approx(cost.total_cost(res.traj)).epsilon(1e-12));
  for (int t = 0; t < T; ++t) {
    CHECK((res.traj.states[t + 1] -
           model.step(res.traj.states[t], res.traj.inputs[t]))
              .norm() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK((res.traj.inputs[t].array() >= bounds.u_lo.array() - 1e-15).all());
    CHECK((res.traj.inputs[t].array() <= bounds.u_hi.array() + 1e-15).all());
  }
}

TEST_CASE("solve_agent matches a single-shooting numerical minimizer") {
  VehicleParams params;
  BicycleModel model(params);
  Eigen::VectorXd x0(4);
  x0 << 0.0, 0.0, 0.0, 5.0;

  const int T = 5;
  StageCostModel cost;
  cost.Q = Eigen::Vector4d(1.0, 1.0, 0.1, 0.1).asDiagonal();
  cost.R = Eigen::Vector2d(0.1, 0.1).asDiagonal();
  cost.x_ref.resize(4, T);
  for (int tau = 1; tau <= T; ++tau) {
    cost.x_ref.col(tau - 1) << 0.45 * tau, 0.1 * tau, 0.1, 4.5;
  }

  const DdpResult res = solve_agent(model, cost, Bounds{},
                                    Trajectory::zero_rollout(model, x0, T));

  // Independent oracle: gradient descent with backtracking on the
  // flattened input vector (10 variables), finite-difference gradients.
  const int m = 2;
  const auto objective = [&](const Eigen::VectorXd &flat) {
    std::vector<Eigen::VectorXd> inputs(T);
    for (int t = 0; t < T; ++t) inputs[t] = flat.segment(t * m, m);
    return cost.total_cost(Trajectory::rollout(model, x0, inputs));
  };
  Eigen::VectorXd u = Eigen::VectorXd::Zero(T * m);
  double f = objective(u);
  for (int iter = 0; iter < 4000; ++iter) {
    const Eigen::VectorXd g = shooting_gradient(model, cost, x0, u, T);
    if (g.norm() < 1e-9) break;
    double step = 1.0;
    while (step > 1e-12 && objective(u - step * g) >= f) step *= 0.5;
    u -= step * g;
    f = objective(u);
  }

  CHECK(res.cost <= f + 1e-4 * (1.0 + std::abs(f)));
  CHECK(std::abs(res.cost - f) <= 1e-4 * (1.0 + std::abs(f)));
  CHECK((flatten_inputs(res.traj) - u).lpNorm<Eigen::Infinity>() < 1e-3);
}

TEST_CASE("solve_agent reaches a stationary point with a proximal term") {
  VehicleParams params;
  BicycleModel model(params);
  Eigen::VectorXd x0(4);
  x0 << 0.0, 0.0, 0.0, 5.0;

  const int T = 8;
  StageCostModel cost;
  cost.Q = Eigen::Vector4d(1.0, 1.0, 0.1, 0.1).asDiagonal();
  cost.R = Eigen::Vector2d(0.1, 0.1).asDiagonal();
  cost.x_ref.resize(4, T);
  cost.sigma = 10.0;
  cost.n_p = 2;
  cost.t_p.resize(2, T);
  cost.t_u.resize(2, T);
  for (int tau = 1; tau <= T; ++tau) {
    cost.x_ref.col(tau - 1) << 0.5 * tau, 0.0, 0.0, 5.0;
    cost.t_p.col(tau - 1) << 0.5 * tau, 0.3; // pull one lane off-reference
    cost.t_u.col(tau - 1) << 0.0, -0.1;
  }

  DdpOptions opts;
  opts.cost_tol = 1e-10;
  const DdpResult res = solve_agent(model, cost, Bounds{},
                                    Trajectory::zero_rollout(model, x0, T),
                                    opts);
  CHECK(res.converged);

  const Eigen::VectorXd g = shooting_gradient(
      model, cost, x0, flatten_inputs(res.traj), T);
  CHECK(g.lpNorm<Eigen::Infinity>() < 1e-3 * (1.0 + std::abs(res.cost)));
}

TEST_CASE("backward pass reports indefinite input Hessians") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(2, 2);
  LinearModel model(A, B, Eigen::VectorXd::Zero(2));

  StageCostModel cost;
  cost.Q = Eigen::MatrixXd::Zero(2, 2);
  cost.R = -Eigen::MatrixXd::Identity(2, 2); // deliberately indefinite
  cost.x_ref = Eigen::MatrixXd::Zero(2, 3);

  const Trajectory traj =
      Trajectory::zero_rollout(model, Eigen::VectorXd::Ones(2), 3);
  CHECK_THROWS_AS(backward_pass(model, traj, cost, 0.0), NotPositiveDefinite);
}
