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

#include "coopadmm/miqp.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace coopadmm {

namespace {

// Lawson-Hanson nonnegative least squares: min ||A mu - f||, mu >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd &A, const Eigen::VectorXd &f) {
  const int r = static_cast<int>(A.cols());
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(r);
  std::vector<bool> passive(r, false);
  const double tol = 1e-12 * std::max(1.0, A.norm() * f.norm());

  for (int outer = 0; outer < 4 * r + 8; ++outer) {
    const Eigen::VectorXd w = A.transpose() * (f - A * mu);
    int j = -1;
    double wmax = tol;
    for (int i = 0; i < r; ++i) {
      if (!passive[i] && w[i] > wmax) {
        wmax = w[i];
        j = i;
      }
    }
    if (j < 0) break;
    passive[j] = true;

    for (int inner = 0; inner < 4 * r + 8; ++inner) {
      std::vector<int> idx;
      for (int i = 0; i < r; ++i)
        if (passive[i]) idx.push_back(i);
      Eigen::MatrixXd Ap(A.rows(), idx.size());
      for (size_t k = 0; k < idx.size(); ++k) Ap.col(k) = A.col(idx[k]);
      const Eigen::VectorXd sp =
          Ap.colPivHouseholderQr().solve(f);

      bool all_pos = true;
      for (size_t k = 0; k < idx.size(); ++k) {
        if (sp[k] <= 0.0) {
          all_pos = false;
          break;
        }
      }
      if (all_pos) {
        mu.setZero();
        for (size_t k = 0; k < idx.size(); ++k) mu[idx[k]] = sp[k];
        break;
      }
      double alpha = 1.0;
      for (size_t k = 0; k < idx.size(); ++k) {
        if (sp[k] <= 0.0) {
          alpha = std::min(alpha, mu[idx[k]] / (mu[idx[k]] - sp[k]));
        }
      }
      Eigen::VectorXd s = Eigen::VectorXd::Zero(r);
      for (size_t k = 0; k < idx.size(); ++k) s[idx[k]] = sp[k];
      mu += alpha * (s - mu);
      for (int i = 0; i < r; ++i) {
        if (passive[i] && mu[i] <= tol) {
          passive[i] = false;
          mu[i] = 0.0;
        }
      }
    }
  }
  return mu;
}

} // namespace

std::optional<Eigen::VectorXd> solve_least_distance(const Eigen::VectorXd &c,
                                                    const Eigen::MatrixXd &G,
                                                    const Eigen::VectorXd &h) {
  const int n = static_cast<int>(c.size());
  const int r = static_cast<int>(G.rows());
  if (r == 0) return c;

  // Shift to w = z - c and apply the LDP-to-NNLS reduction.
  const Eigen::VectorXd ht = h - G * c;
  Eigen::MatrixXd E(n + 1, r);
  E.topRows(n) = G.transpose();
  E.bottomRows(1) = ht.transpose();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n + 1);
  f[n] = 1.0;

  const Eigen::VectorXd mu = nnls(E, f);
  const Eigen::VectorXd res = E * mu - f;
  if (res.norm() <= 1e-10) return std::nullopt; // no feasible point
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w[i] = -res[i] / res[n];
  return c + w;
}

double BigMProjection::effective_big_m() const {
  if (big_m > 0.0) return big_m;
  const double cmax = c.size() > 0 ? c.cwiseAbs().maxCoeff() : 0.0;
  return d_safe + 2.0 * cmax + 10.0;
}

namespace {

// Signed row value P_{ijr} z for row r of pair (i, j).
double row_value(const Eigen::VectorXd &z, int i, int j, int r) {
  const int axis = r / 2;
  const double sign = (r % 2 == 0) ? 1.0 : -1.0;
  return sign * (z[2 * i + axis] - z[2 * j + axis]);
}

void append_row(Eigen::MatrixXd &G, Eigen::VectorXd &h, int &row, int i,
                int j, int r, double rhs, int dim) {
  const int axis = r / 2;
  const double sign = (r % 2 == 0) ? 1.0 : -1.0;
  G.row(row).setZero();
  G(row, 2 * i + axis) = sign;
  G(row, 2 * j + axis) = -sign;
  h[row] = rhs;
  (void)dim;
  ++row;
}

struct Node {
  std::vector<int> choice; // -1 undecided, else enforced row per pair
  double bound{0.0};
  Eigen::VectorXd z;
  long seq{0};
};

struct NodeOrder {
  bool operator()(const Node &a, const Node &b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.seq > b.seq; // fixed tie-break keeps expansion deterministic
  }
};

} // namespace

MiqpResult solve_miqp(const BigMProjection &p) {
  const int npairs = static_cast<int>(p.pairs.size());
  const int dim = static_cast<int>(p.c.size());
  const double M = p.effective_big_m();

  // Relaxation of a partial assignment: the chosen row of every decided
  // pair at d_safe, every other row at d_safe - M.
  auto relax = [&](const std::vector<int> &choice)
      -> std::optional<std::pair<Eigen::VectorXd, double>> {
    const int rows = npairs * BigMProjection::kRowsPerPair;
    Eigen::MatrixXd G(rows, dim);
    Eigen::VectorXd h(rows);
    int row = 0;
    for (int pi = 0; pi < npairs; ++pi) {
      const auto [i, j] = p.pairs[pi];
      for (int r = 0; r < BigMProjection::kRowsPerPair; ++r) {
        const double rhs =
            (choice[pi] == r) ? p.d_safe : p.d_safe - M;
        append_row(G, h, row, i, j, r, rhs, dim);
      }
    }
    auto z = solve_least_distance(p.c, G, h);
    if (!z) return std::nullopt;
    return std::make_pair(*z, (*z - p.c).squaredNorm());
  };

  MiqpResult best;
  best.objective = std::numeric_limits<double>::infinity();

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long seq = 0;

  Node root;
  root.choice.assign(npairs, -1);
  if (auto rl = relax(root.choice)) {
    root.z = rl->first;
    root.bound = rl->second;
    root.seq = seq++;
    open.push(root);
  }

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    ++best.nodes;
    if (node.bound >= best.objective - 1e-9) continue;

    // Most violated undecided pair at the relaxed solution.
    int branch_pair = -1;
    double worst = 1e-9;
    for (int pi = 0; pi < npairs; ++pi) {
      if (node.choice[pi] >= 0) continue;
      const auto [i, j] = p.pairs[pi];
      double best_row = -std::numeric_limits<double>::infinity();
      for (int r = 0; r < BigMProjection::kRowsPerPair; ++r) {
        best_row = std::max(best_row, row_value(node.z, i, j, r));
      }
      const double viol = p.d_safe - best_row;
      if (viol > worst) {
        worst = viol;
        branch_pair = pi;
      }
    }

    if (branch_pair < 0) {
      // Every pair's disjunction already holds: feasible incumbent.
      if (node.bound < best.objective) {
        best.objective = node.bound;
        best.z = node.z;
      }
      continue;
    }

    // Children ordered by the row's violation at the parent solution.
    const auto [i, j] = p.pairs[branch_pair];
    std::vector<int> order{0, 1, 2, 3};
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return row_value(node.z, i, j, a) > row_value(node.z, i, j, b);
    });
    for (int r : order) {
      Node child;
      child.choice = node.choice;
      child.choice[branch_pair] = r;
      auto rl = relax(child.choice);
      if (!rl) continue;
      child.z = rl->first;
      child.bound = rl->second;
      child.seq = seq++;
      if (child.bound < best.objective - 1e-9) open.push(child);
    }
  }
  return best;
}

} // namespace coopadmm
