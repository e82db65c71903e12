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

#include "coopadmm/admm.hpp"

#include <chrono>
#include <string>

#include "coopadmm/errors.hpp"
#include "coopadmm/threading.hpp"

namespace coopadmm {

namespace {

// splitmix64-style seed mixing so every (seed, k, tau) draw stream is
// independent of worker scheduling.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = seed ^ (a * 0x9E3779B97F4A7C15ULL) ^
                    (b * 0xBF58476D1CE4E5B9ULL);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

void write_agent_to_y(const HorizonLayout &layout, int i,
                      const Trajectory &traj, Eigen::VectorXd &y) {
  for (int tau = 1; tau <= layout.T; ++tau) {
    y.segment(layout.y_state_offset(i, tau), layout.n) = traj.states[tau];
    y.segment(layout.y_input_offset(i, tau), layout.m) = traj.inputs[tau - 1];
  }
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

} // namespace

AdmmState initial_state(const MultiVehicleProblem &problem) {
  const auto &layout = problem.layout;
  AdmmState st;
  st.y = Eigen::VectorXd::Zero(layout.y_size());
  st.z = Eigen::VectorXd::Zero(layout.z_size());
  st.lambda = Eigen::VectorXd::Zero(layout.z_size());
  st.trajectories.resize(problem.agents.size());
  for (size_t i = 0; i < problem.agents.size(); ++i) {
    const auto &agent = problem.agents[i];
    st.trajectories[i] =
        Trajectory::zero_rollout(*agent.model, agent.x0, layout.T);
    write_agent_to_y(layout, static_cast<int>(i), st.trajectories[i], st.y);
  }
  return st;
}

IterationRecord admm_step(AdmmState &state,
                          const MultiVehicleProblem &problem,
                          const AdmmOptions &opts) {
  const auto &layout = problem.layout;
  const int N = layout.N;
  const int T = layout.T;
  const double sigma = opts.sigma;

  IterationRecord rec;
  rec.k = state.k + 1;

  // y-update: one augmented DDP solve per agent, target z - lambda/sigma.
  auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> failures(N);
  parallel_for(N, opts.threads, [&](int i) {
    const auto &agent = problem.agents[i];
    StageCostModel cost;
    cost.Q = agent.weights.Q;
    cost.R = agent.weights.R;
    cost.x_ref = agent.weights.x_ref;
    cost.sigma = sigma;
    cost.n_p = layout.n_p;
    cost.t_p.resize(layout.n_p, T);
    cost.t_u.resize(layout.m, T);
    for (int tau = 1; tau <= T; ++tau) {
      const int po = layout.z_pos_offset(i, tau);
      const int uo = layout.z_input_offset(i, tau);
      cost.t_p.col(tau - 1) =
          state.z.segment(po, layout.n_p) -
          state.lambda.segment(po, layout.n_p) / sigma;
      cost.t_u.col(tau - 1) = state.z.segment(uo, layout.m) -
                              state.lambda.segment(uo, layout.m) / sigma;
    }
    try {
      DdpResult res = solve_agent(*agent.model, cost, agent.bounds,
                                  state.trajectories[i], opts.ddp);
      state.trajectories[i] = std::move(res.traj);
    } catch (const std::exception &e) {
      failures[i] = e.what();
    }
  });
  for (int i = 0; i < N; ++i) {
    if (!failures[i].empty()) {
      throw BackendFailure("admm_step: agent " + std::to_string(i) +
                           " DDP failed: " + failures[i]);
    }
  }
  for (int i = 0; i < N; ++i) {
    write_agent_to_y(layout, i, state.trajectories[i], state.y);
  }
  rec.y_step_ms = ms_since(t0);

  // z-update: independent per-timestep clamp + position projection with
  // target select(y) + lambda/sigma.
  t0 = std::chrono::steady_clock::now();
  const Eigen::VectorXd z_prev = state.z;
  const Eigen::VectorXd ty = select(layout, state.y);
  const Eigen::VectorXd target = ty + state.lambda / sigma;
  std::vector<std::string> zfail(T);
  parallel_for(T, opts.threads, [&](int t) {
    const int tau = t + 1;
    ProjectionTarget pt;
    pt.tau = tau;
    pt.c_p.resize(N * layout.n_p);
    pt.c_u.resize(N * layout.m);
    pt.u_lo.resize(N * layout.m);
    pt.u_hi.resize(N * layout.m);
    for (int i = 0; i < N; ++i) {
      pt.c_p.segment(i * layout.n_p, layout.n_p) =
          target.segment(layout.z_pos_offset(i, tau), layout.n_p);
      pt.c_u.segment(i * layout.m, layout.m) =
          target.segment(layout.z_input_offset(i, tau), layout.m);
      pt.u_lo.segment(i * layout.m, layout.m) = problem.agents[i].bounds.u_lo;
      pt.u_hi.segment(i * layout.m, layout.m) = problem.agents[i].bounds.u_hi;
    }
    pt.pairs = problem.graph.edges;
    pt.d_safe = problem.d_safe;
    try {
      const Eigen::VectorXd z_u = clamp_inputs(pt.c_u, pt.u_lo, pt.u_hi);
      const Eigen::VectorXd z_p = project_positions(
          pt, opts.backend, mix_seed(opts.seed, rec.k, tau));
      for (int i = 0; i < N; ++i) {
        state.z.segment(layout.z_pos_offset(i, tau), layout.n_p) =
            z_p.segment(i * layout.n_p, layout.n_p);
        state.z.segment(layout.z_input_offset(i, tau), layout.m) =
            z_u.segment(i * layout.m, layout.m);
      }
    } catch (const std::exception &e) {
      zfail[t] = e.what();
    }
  });
  for (int t = 0; t < T; ++t) {
    if (!zfail[t].empty()) {
      throw BackendFailure("admm_step: projection failed at tau " +
                           std::to_string(t + 1) + ": " + zfail[t]);
    }
  }
  rec.z_step_ms = ms_since(t0);

  // Dual ascent and residuals.
  const Eigen::VectorXd consensus_gap = ty - state.z;
  state.lambda += sigma * consensus_gap;
  rec.residual = consensus_gap.norm();
  rec.dual_residual = sigma * (state.z - z_prev).norm(); // logged only

  state.k += 1;
  state.residual_history.push_back(rec.residual);
  state.records.push_back(rec);
  return rec;
}

AdmmResult run(const MultiVehicleProblem &problem, const AdmmOptions &opts,
               const ProgressSink &sink) {
  AdmmState state = initial_state(problem);

  AdmmResult result;
  double best_residual = std::numeric_limits<double>::infinity();

  for (int k = 0; k < opts.max_iterations; ++k) {
    const IterationRecord rec = admm_step(state, problem, opts);
    result.iterates.push_back(state.trajectories);
    if (sink) sink(rec);

    if (rec.residual < best_residual) {
      best_residual = rec.residual;
      result.state = state;
      result.trajectories = state.trajectories;
      result.residual = rec.residual;
    }
    if (rec.residual <= opts.eps) {
      result.status = AdmmStatus::Converged;
      result.state = state;
      result.trajectories = state.trajectories;
      result.residual = rec.residual;
      return result;
    }
  }
  result.status = AdmmStatus::NotConverged;
  return result;
}

} // namespace coopadmm
