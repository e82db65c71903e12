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

#include "coopadmm/projection.hpp"

#include <cmath>
#include <random>

#include "coopadmm/errors.hpp"
#include "coopadmm/miqp.hpp"
#include "coopadmm/sdp.hpp"

namespace coopadmm {

Eigen::VectorXd clamp_inputs(const Eigen::VectorXd &c_u,
                             const Eigen::VectorXd &lo,
                             const Eigen::VectorXd &hi) {
  return c_u.cwiseMax(lo).cwiseMin(hi);
}

namespace {

bool pairs_satisfied(const Eigen::VectorXd &z,
                     const std::vector<std::pair<int, int>> &pairs,
                     double d_safe) {
  for (const auto &[i, j] : pairs) {
    if ((z.segment<2>(2 * i) - z.segment<2>(2 * j)).norm() < d_safe) {
      return false;
    }
  }
  return true;
}

// Alternating pairwise expansion to feasibility, then per-vehicle
// retraction toward the target.
Eigen::VectorXd oracle_local_search(const ProjectionTarget &t,
                                    const Eigen::VectorXd &start,
                                    std::mt19937_64 &rng) {
  const double d = t.d_safe;
  Eigen::VectorXd z = start;
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);

  // Phase 1: cyclic projection onto each pair constraint.
  for (int sweep = 0; sweep < 512; ++sweep) {
    bool ok = true;
    for (const auto &[i, j] : t.pairs) {
      auto pi = z.segment<2>(2 * i);
      auto pj = z.segment<2>(2 * j);
      Eigen::Vector2d diff = pi - pj;
      double dist = diff.norm();
      if (dist >= d) continue;
      ok = false;
      if (dist < 1e-12) {
        const double a = angle(rng);
        diff = {std::cos(a), std::sin(a)};
        dist = 1.0;
      }
      const Eigen::Vector2d push = diff * (0.5 * (d - dist) / dist);
      pi += push;
      pj -= push;
    }
    if (ok) break;
  }
  if (!pairs_satisfied(z, t.pairs, d - 1e-9)) return z;

  // Phase 2: pull each vehicle back toward its target as far as its pair
  // constraints permit; z_i(s) = c_i + s (z_i - c_i), s in [0, 1].
  for (int sweep = 0; sweep < 256; ++sweep) {
    double change = 0.0;
    const int N = static_cast<int>(t.c_p.size() / 2);
    for (int i = 0; i < N; ++i) {
      const Eigen::Vector2d ci = t.c_p.segment<2>(2 * i);
      const Eigen::Vector2d zi = z.segment<2>(2 * i);
      const Eigen::Vector2d v = zi - ci;
      if (v.norm() < 1e-14) continue;
      double s_min = 0.0;
      for (const auto &[a, b] : t.pairs) {
        int other = -1;
        if (a == i) other = b;
        if (b == i) other = a;
        if (other < 0) continue;
        const Eigen::Vector2d w = ci - z.segment<2>(2 * other);
        // ||w + s v||^2 >= d^2; keep the component of [0,1] connected to 1.
        const double A = v.squaredNorm();
        const double B = 2.0 * w.dot(v);
        const double C = w.squaredNorm() - d * d;
        const double disc = B * B - 4.0 * A * C;
        if (disc <= 0.0) continue; // constraint inactive for all s
        const double root2 = (-B + std::sqrt(disc)) / (2.0 * A);
        if (root2 > s_min && root2 <= 1.0 + 1e-12) {
          s_min = std::min(1.0, root2);
        } else if (root2 > 1.0 + 1e-12) {
          const double root1 = (-B - std::sqrt(disc)) / (2.0 * A);
          // 1 must lie left of the infeasible window for this to happen.
          if (root1 <= 1.0) s_min = 1.0; // cannot retract at all
        }
      }
      const Eigen::Vector2d zi_new = ci + s_min * v;
      change += (zi_new - zi).norm();
      z.segment<2>(2 * i) = zi_new;
    }
    if (change < 1e-12) break;
  }
  return z;
}

Eigen::VectorXd project_oracle(const ProjectionTarget &t,
                               std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> gauss(0.0, 0.25 * t.d_safe);

  Eigen::VectorXd best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (int s = 0; s < 32; ++s) {
    Eigen::VectorXd start = t.c_p;
    if (s > 0) {
      for (int i = 0; i < start.size(); ++i) start[i] += gauss(rng);
    }
    const Eigen::VectorXd z = oracle_local_search(t, start, rng);
    if (!pairs_satisfied(z, t.pairs, t.d_safe - 1e-9)) continue;
    const double obj = (z - t.c_p).squaredNorm();
    if (obj < best_obj) {
      best_obj = obj;
      best = z;
    }
  }
  if (best.size() == 0) {
    throw BackendFailure("oracle projection: no feasible point found at tau " +
                         std::to_string(t.tau));
  }
  return best;
}

Eigen::VectorXd project_sdr(const ProjectionTarget &t,
                            std::uint64_t rng_seed) {
  LiftedLayout layout;
  layout.N = static_cast<int>(t.c_p.size() / 2);
  layout.n_p = 2;
  layout.c_p = t.c_p;
  layout.pairs = t.pairs;
  layout.d_safe = t.d_safe;

  const SdpProblem sdp = build_lifted_problem(layout);
  const SdpSolution sol = solve_sdp(sdp, 1e-7);
  if (sol.status == SdpStatus::Infeasible) {
    throw BackendFailure("SDR projection: SDP reported infeasible at tau " +
                         std::to_string(t.tau));
  }
  return extract_position(sol, layout, rng_seed).z_p;
}

Eigen::VectorXd dispatch(const ProjectionTarget &t, Backend backend,
                         std::uint64_t rng_seed) {
  switch (backend) {
  case Backend::Sdr:
    return project_sdr(t, rng_seed);
  case Backend::Miqp: {
    BigMProjection p;
    p.c = t.c_p;
    p.pairs = t.pairs;
    p.d_safe = t.d_safe;
    return solve_miqp(p).z;
  }
  case Backend::Oracle:
    return project_oracle(t, rng_seed);
  }
  throw BackendFailure("project_positions: unknown backend");
}

// Solves the projection restricted to one connected set of pairs and
// scatters the moved positions back into z.
void solve_component(const ProjectionTarget &full,
                     const std::vector<std::pair<int, int>> &pairs,
                     const std::vector<int> &vehicles, Backend backend,
                     std::uint64_t rng_seed, Eigen::VectorXd &z) {
  std::vector<int> local(full.c_p.size() / 2, -1);
  for (size_t k = 0; k < vehicles.size(); ++k) local[vehicles[k]] = k;

  ProjectionTarget sub;
  sub.tau = full.tau;
  sub.d_safe = full.d_safe;
  sub.c_p.resize(2 * vehicles.size());
  for (size_t k = 0; k < vehicles.size(); ++k) {
    sub.c_p.segment<2>(2 * k) = full.c_p.segment<2>(2 * vehicles[k]);
  }
  sub.pairs.reserve(pairs.size());
  for (const auto &[i, j] : pairs) sub.pairs.emplace_back(local[i], local[j]);

  const Eigen::VectorXd zs = dispatch(sub, backend, rng_seed);
  for (size_t k = 0; k < vehicles.size(); ++k) {
    z.segment<2>(2 * vehicles[k]) = zs.segment<2>(2 * k);
  }
}

} // namespace

// Active-pair outer loop. A pair whose constraint holds strictly at the
// solution of the restricted problem can be dropped without changing the
// optimum (the restricted feasible set only shrinks back to the full one),
// so we start from the pairs violated at the target and grow the set until
// the candidate is feasible for every pair. Restricted problems split into
// connected components, each solved independently.
Eigen::VectorXd project_positions(const ProjectionTarget &target,
                                  Backend backend, std::uint64_t rng_seed) {
  const int N = static_cast<int>(target.c_p.size() / 2);
  const int P = static_cast<int>(target.pairs.size());
  Eigen::VectorXd z = target.c_p;

  // The big-M backend keeps the axis-separation (square) restriction of the
  // distance constraint, so its violation test must match what it enforces;
  // mixing the two criteria makes z oscillate between them.
  const auto violated = [&](int i, int j) {
    const Eigen::Vector2d d = z.segment<2>(2 * i) - z.segment<2>(2 * j);
    if (backend == Backend::Miqp) {
      return d.cwiseAbs().maxCoeff() < target.d_safe - 1e-9;
    }
    return d.norm() < target.d_safe - 1e-9;
  };

  std::vector<bool> active(P, false);
  for (int round = 0; round <= P; ++round) {
    bool grew = false;
    for (int p = 0; p < P; ++p) {
      if (active[p]) continue;
      const auto &[i, j] = target.pairs[p];
      if (violated(i, j)) {
        active[p] = true;
        grew = true;
      }
    }
    if (!grew) return z; // feasible for every pair (passthrough when none)

    // Connected components of the active-pair graph (union-find).
    std::vector<int> parent(N);
    for (int i = 0; i < N; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int i) {
      while (parent[i] != i) i = parent[i] = parent[parent[i]];
      return i;
    };
    for (int p = 0; p < P; ++p) {
      if (active[p]) parent[find(target.pairs[p].first)] =
                         find(target.pairs[p].second);
    }

    z = target.c_p;
    std::vector<int> roots;
    for (int i = 0; i < N; ++i) {
      if (find(i) == i) roots.push_back(i);
    }
    for (int root : roots) {
      std::vector<int> vehicles;
      for (int i = 0; i < N; ++i) {
        if (find(i) == root) vehicles.push_back(i);
      }
      if (vehicles.size() < 2) continue;
      std::vector<std::pair<int, int>> pairs;
      for (int p = 0; p < P; ++p) {
        if (active[p] && find(target.pairs[p].first) == root) {
          pairs.push_back(target.pairs[p]);
        }
      }
      if (pairs.empty()) continue;
      // Stream split keyed by the component anchor so the draw sequence is
      // independent of how the components are enumerated.
      solve_component(target, pairs, vehicles, backend,
                      rng_seed ^ (0x9E3779B97F4A7C15ULL *
                                  static_cast<std::uint64_t>(root + 1)),
                      z);
    }
  }
  // The loop adds at least one pair per round, so P+1 rounds always suffice.
  throw BackendFailure("project_positions: active-set loop failed to settle");
}

} // namespace coopadmm
