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

#include "coopadmm/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>
#include <limits>
#include <random>

#include "coopadmm/errors.hpp"

namespace coopadmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest alpha with X + alpha*D staying positive definite, via the
// spectrum of L^-1 D L^-T.
double max_step_psd(const Eigen::LLT<Eigen::MatrixXd> &llt,
                    const Eigen::MatrixXd &D) {
  const Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd W = L.triangularView<Eigen::Lower>().solve(D);
  W = L.triangularView<Eigen::Lower>().solve(W.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (W + W.transpose()));
  const double lmin = es.eigenvalues().minCoeff();
  return lmin >= 0.0 ? kInf : -1.0 / lmin;
}

double max_step_pos(const Eigen::VectorXd &v, const Eigen::VectorXd &dv) {
  double a = kInf;
  for (int i = 0; i < v.size(); ++i) {
    if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
  }
  return a;
}

} // namespace

SdpSolution solve_sdp(const SdpProblem &prob, double tol, int max_iterations) {
  const int d = prob.d;
  const int p = static_cast<int>(prob.ineq.size());
  const int q = static_cast<int>(prob.eq.size());
  const int rows = p + q;

  // Unified constraint list; the first p rows carry slacks.
  std::vector<const Eigen::MatrixXd *> B(rows);
  Eigen::VectorXd b(rows);
  for (int k = 0; k < p; ++k) {
    B[k] = &prob.ineq[k].first;
    b[k] = prob.ineq[k].second;
  }
  for (int j = 0; j < q; ++j) {
    B[p + j] = &prob.eq[j].first;
    b[p + j] = prob.eq[j].second;
  }

  const double bnorm = rows > 0 ? b.cwiseAbs().maxCoeff() : 0.0;
  const double eta = 10.0 * std::max({1.0, prob.C.norm(), bnorm});

  Eigen::MatrixXd X = eta * Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd S = eta * Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(rows);
  y.head(p).setOnes();
  Eigen::VectorXd slack = eta * Eigen::VectorXd::Ones(p);

  SdpSolution sol;
  sol.X = X;

  for (int iter = 0; iter < max_iterations; ++iter) {
    sol.iterations = iter;

    // Residuals.
    Eigen::VectorXd rp(rows);
    for (int k = 0; k < rows; ++k) {
      rp[k] = b[k] - (B[k]->cwiseProduct(X)).sum();
      if (k < p) rp[k] += slack[k];
    }
    Eigen::MatrixXd Rd = prob.C - S;
    for (int k = 0; k < rows; ++k) Rd -= y[k] * (*B[k]);

    const double pobj = (prob.C.cwiseProduct(X)).sum();
    const double dobj = b.dot(y);
    const double pinf = rp.norm() / (1.0 + b.norm());
    const double dinf = Rd.norm() / (1.0 + prob.C.norm());
    const double relgap =
        std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    sol.X = X;
    sol.objective = pobj;
    sol.dual_objective = dobj;
    sol.duality_gap = relgap;

    if (std::max({pinf, dinf, relgap}) <= tol) {
      sol.status = SdpStatus::Optimal;
      return sol;
    }
    if (y.cwiseAbs().maxCoeff() > 1e8 && pinf > tol) {
      sol.status = SdpStatus::Infeasible;
      return sol;
    }

    const double mu =
        ((X.cwiseProduct(S)).sum() + slack.dot(y.head(p))) / (d + p);

    Eigen::LLT<Eigen::MatrixXd> llt_x(X);
    Eigen::LLT<Eigen::MatrixXd> llt_s(S);
    if (llt_s.info() != Eigen::Success || llt_x.info() != Eigen::Success) {
      break;
    }

    // T_l = X B_l S^-1 and the Schur complement.
    std::vector<Eigen::MatrixXd> T(rows);
    for (int l = 0; l < rows; ++l) {
      const Eigen::MatrixXd G = X * (*B[l]);
      T[l] = llt_s.solve(G.transpose()).transpose();
    }
    Eigen::MatrixXd M(rows, rows);
    for (int k = 0; k < rows; ++k) {
      for (int l = 0; l < rows; ++l) {
        M(k, l) = (B[k]->cwiseProduct(T[l])).sum();
      }
    }
    for (int k = 0; k < p; ++k) M(k, k) += slack[k] / y[k];

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);

    const Eigen::MatrixXd XRdSinv =
        llt_s.solve((X * Rd).transpose()).transpose();

    // One Newton direction for target nu with optional second-order
    // correction terms.
    auto direction = [&](double nu, const Eigen::MatrixXd &Mcorr,
                         const Eigen::VectorXd &scorr, Eigen::MatrixXd &dX,
                         Eigen::MatrixXd &dS, Eigen::VectorXd &dy,
                         Eigen::VectorXd &ds) {
      Eigen::MatrixXd Rhat =
          nu * llt_s.solve(Eigen::MatrixXd::Identity(d, d)) - X - XRdSinv;
      if (Mcorr.size() > 0) {
        Rhat -= llt_s.solve(Mcorr.transpose()).transpose();
      }
      Eigen::VectorXd rhs(rows);
      for (int k = 0; k < rows; ++k) {
        rhs[k] = rp[k] - (B[k]->cwiseProduct(Rhat)).sum();
        if (k < p) {
          const double sc = scorr.size() > 0 ? scorr[k] : 0.0;
          rhs[k] += (nu - sc) / y[k] - slack[k];
        }
      }
      dy = lu.solve(rhs);
      dS = Rd;
      dX = Rhat;
      for (int l = 0; l < rows; ++l) {
        dS -= dy[l] * (*B[l]);
        dX += dy[l] * T[l];
      }
      dX = (0.5 * (dX + dX.transpose())).eval();
      ds.resize(p);
      for (int k = 0; k < p; ++k) {
        const double sc = scorr.size() > 0 ? scorr[k] : 0.0;
        ds[k] = (nu - sc) / y[k] - slack[k] - (slack[k] / y[k]) * dy[k];
      }
    };

    Eigen::MatrixXd dXa, dSa;
    Eigen::VectorXd dya, dsa;
    direction(0.0, Eigen::MatrixXd(), Eigen::VectorXd(), dXa, dSa, dya, dsa);

    double ap = std::min({1.0, 0.99 * max_step_psd(llt_x, dXa),
                          0.99 * max_step_pos(slack, dsa)});
    double ad = std::min({1.0, 0.99 * max_step_psd(llt_s, dSa),
                          0.99 * max_step_pos(y.head(p), dya.head(p))});

    const double mu_aff =
        (((X + ap * dXa).cwiseProduct(S + ad * dSa)).sum() +
         (slack + ap * dsa).dot((y + ad * dya).head(p))) /
        (d + p);
    const double sigma =
        std::pow(std::max(0.0, std::min(1.0, mu_aff / mu)), 3);

    Eigen::MatrixXd dX, dS;
    Eigen::VectorXd dy, ds;
    const Eigen::MatrixXd Mcorr = dXa * dSa;
    const Eigen::VectorXd scorr = dsa.cwiseProduct(dya.head(p));
    direction(sigma * mu, Mcorr, scorr, dX, dS, dy, ds);

    ap = std::min({1.0, 0.99 * max_step_psd(llt_x, dX),
                   0.99 * max_step_pos(slack, ds)});
    ad = std::min({1.0, 0.99 * max_step_psd(llt_s, dS),
                   0.99 * max_step_pos(y.head(p), dy.head(p))});

    X += ap * dX;
    slack += ap * ds;
    S += ad * dS;
    y += ad * dy;
  }

  sol.status = SdpStatus::MaxIterations;
  return sol;
}

SdpProblem build_lifted_problem(const LiftedLayout &layout) {
  const int nz = layout.dim();
  const int D = nz + 1;
  SdpProblem p;
  p.d = D;
  p.C = Eigen::MatrixXd::Zero(D, D);
  p.C.topLeftCorner(nz, nz).setIdentity();
  p.C.topRightCorner(nz, 1) = -layout.c_p;
  p.C.bottomLeftCorner(1, nz) = -layout.c_p.transpose();

  for (const auto &[i, j] : layout.pairs) {
    // K_ij = M_ij' M_ij with M_ij z = z_i - z_j, written via index maps.
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(D, D);
    const int oi = i * layout.n_p;
    const int oj = j * layout.n_p;
    for (int r = 0; r < layout.n_p; ++r) {
      K(oi + r, oi + r) += 1.0;
      K(oj + r, oj + r) += 1.0;
      K(oi + r, oj + r) -= 1.0;
      K(oj + r, oi + r) -= 1.0;
    }
    p.ineq.emplace_back(std::move(K), layout.d_safe * layout.d_safe);
  }

  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(D, D);
  E(nz, nz) = 1.0;
  p.eq.emplace_back(std::move(E), 1.0);
  return p;
}

namespace {

// Push every violated pair symmetrically apart until all distances reach
// d_safe. Returns false when the loop fails to settle.
bool repair_sample(Eigen::VectorXd &w, const LiftedLayout &layout,
                   std::mt19937_64 &rng) {
  const int n_p = layout.n_p;
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  for (int pass = 0; pass < 256; ++pass) {
    bool ok = true;
    for (const auto &[i, j] : layout.pairs) {
      auto pi = w.segment(i * n_p, n_p);
      auto pj = w.segment(j * n_p, n_p);
      Eigen::VectorXd diff = pi - pj;
      double dist = diff.norm();
      if (dist >= layout.d_safe) continue;
      ok = false;
      if (dist < 1e-12) {
        // Coincident points: pick a random separation direction.
        diff.setZero();
        const double a = angle(rng);
        diff[0] = std::cos(a);
        if (n_p > 1) diff[1] = std::sin(a);
        dist = 1.0;
      }
      const Eigen::VectorXd push =
          diff * (0.5 * (layout.d_safe - dist) / dist);
      pi += push;
      pj -= push;
    }
    if (ok) return true;
  }
  // Final feasibility check after the last pass.
  for (const auto &[i, j] : layout.pairs) {
    if ((w.segment(i * n_p, n_p) - w.segment(j * n_p, n_p)).norm() <
        layout.d_safe - 1e-9) {
      return false;
    }
  }
  return true;
}

} // namespace

ExtractionResult extract_position(const SdpSolution &sol,
                                  const LiftedLayout &layout,
                                  std::uint64_t rng_seed) {
  const int nz = layout.dim();
  const Eigen::MatrixXd Z = sol.X.topLeftCorner(nz, nz);
  const Eigen::VectorXd z = sol.X.topRightCorner(nz, 1);

  std::mt19937_64 rng(rng_seed);
  const Eigen::MatrixXd residual = Z - z * z.transpose();

  if (residual.norm() <= 1e-5 * (1.0 + Z.norm())) {
    Eigen::VectorXd w = z;
    if (repair_sample(w, layout, rng)) {
      return {w, true};
    }
  }

  // Gaussian randomization around the border vector with covariance
  // Z - z z' (negative eigenvalues clipped).
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (residual + residual.transpose()));
  const Eigen::MatrixXd factor =
      es.eigenvectors() *
      es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  std::normal_distribution<double> gauss(0.0, 1.0);
  bool have_best = false;
  Eigen::VectorXd best;
  double best_obj = kInf;
  for (int s = 0; s < 64; ++s) {
    Eigen::VectorXd xi(nz);
    for (int i = 0; i < nz; ++i) xi[i] = gauss(rng);
    Eigen::VectorXd w = z + factor * xi;
    if (!repair_sample(w, layout, rng)) continue;
    const double obj = (w - layout.c_p).squaredNorm();
    if (obj < best_obj) {
      best_obj = obj;
      best = w;
      have_best = true;
    }
  }
  if (!have_best) {
    throw ExtractionFailed(
        "extract_position: no randomized sample could be repaired");
  }
  return {best, false};
}

} // namespace coopadmm
