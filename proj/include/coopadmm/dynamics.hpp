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

#ifndef COOPADMM_DYNAMICS_HPP
#define COOPADMM_DYNAMICS_HPP

#include <Eigen/Dense>

#include "coopadmm/errors.hpp"

namespace coopadmm {

/// Kinematic bicycle state: position (m), heading (rad, 0 = +X, unwrapped),
/// speed (m/s).
struct VehicleState {
  double p_x{0.0};
  double p_y{0.0};
  double theta{0.0};
  double v{0.0};

  Eigen::Vector4d vec() const { return {p_x, p_y, theta, v}; }
  static VehicleState from_vec(const Eigen::Vector4d &x) {
    return {x[0], x[1], x[2], x[3]};
  }
};

/// Steering angle (rad) and acceleration (m/s^2). Bounds are enforced by the
/// solvers, not by the type.
struct ControlInput {
  double delta{0.0};
  double a{0.0};

  Eigen::Vector2d vec() const { return {delta, a}; }
  static ControlInput from_vec(const Eigen::Vector2d &u) { return {u[0], u[1]}; }
};

struct VehicleParams {
  double wheelbase{2.5};     // m
  double tau_s{0.1};         // s
  double length{2.5};        // m
  double width{1.6};         // m
};

/// Per-step traveled distance f_r(v, delta) of the discrete bicycle model.
/// Throws DomainError when tau_s*v*sin(delta) exceeds the wheelbase.
double rollout_distance(double v, double delta, const VehicleParams &params);

/// One discrete step of the bicycle model.
VehicleState step(const VehicleState &x, const ControlInput &u,
                  const VehicleParams &params);

/// Analytic Jacobians of step() with respect to state and input.
void linearize(const VehicleState &x, const ControlInput &u,
               const VehicleParams &params, Eigen::Matrix4d &f_x,
               Eigen::Matrix<double, 4, 2> &f_u);

/// Discrete-time dynamics interface consumed by the DDP solver.
class DynamicsModel {
public:
  virtual ~DynamicsModel() = default;
  virtual int state_dim() const = 0;
  virtual int input_dim() const = 0;
  virtual Eigen::VectorXd step(const Eigen::VectorXd &x,
                               const Eigen::VectorXd &u) const = 0;
  virtual void linearize(const Eigen::VectorXd &x, const Eigen::VectorXd &u,
                         Eigen::MatrixXd &f_x, Eigen::MatrixXd &f_u) const = 0;
};

/// Bicycle model wrapped as a DynamicsModel (n = 4, m = 2).
class BicycleModel final : public DynamicsModel {
public:
  explicit BicycleModel(const VehicleParams &params) : params_(params) {}

  int state_dim() const override { return 4; }
  int input_dim() const override { return 2; }

  Eigen::VectorXd step(const Eigen::VectorXd &x,
                       const Eigen::VectorXd &u) const override {
    return coopadmm::step(VehicleState::from_vec(x),
                          ControlInput::from_vec(u), params_)
        .vec();
  }

  void linearize(const Eigen::VectorXd &x, const Eigen::VectorXd &u,
                 Eigen::MatrixXd &f_x, Eigen::MatrixXd &f_u) const override {
    Eigen::Matrix4d A;
    Eigen::Matrix<double, 4, 2> B;
    coopadmm::linearize(VehicleState::from_vec(x), ControlInput::from_vec(u),
                        params_, A, B);
    f_x = A;
    f_u = B;
  }

  const VehicleParams &params() const { return params_; }

private:
  VehicleParams params_;
};

/// Affine time-invariant dynamics x' = A x + B u + c. Used by convex
/// benchmark problems (single integrators) and by the LQR oracles.
class LinearModel final : public DynamicsModel {
public:
  LinearModel(Eigen::MatrixXd A, Eigen::MatrixXd B,
              Eigen::VectorXd c = Eigen::VectorXd())
      : A_(std::move(A)), B_(std::move(B)), c_(std::move(c)) {
    if (c_.size() == 0) c_ = Eigen::VectorXd::Zero(A_.rows());
  }

  int state_dim() const override { return static_cast<int>(A_.rows()); }
  int input_dim() const override { return static_cast<int>(B_.cols()); }

  Eigen::VectorXd step(const Eigen::VectorXd &x,
                       const Eigen::VectorXd &u) const override {
    return A_ * x + B_ * u + c_;
  }

  void linearize(const Eigen::VectorXd &, const Eigen::VectorXd &,
                 Eigen::MatrixXd &f_x, Eigen::MatrixXd &f_u) const override {
    f_x = A_;
    f_u = B_;
  }

  const Eigen::MatrixXd &A() const { return A_; }
  const Eigen::MatrixXd &B() const { return B_; }

private:
  Eigen::MatrixXd A_, B_;
  Eigen::VectorXd c_;
};

} // namespace coopadmm

#endif // COOPADMM_DYNAMICS_HPP
