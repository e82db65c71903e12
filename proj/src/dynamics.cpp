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

#include "coopadmm/dynamics.hpp"

#include <cmath>

namespace coopadmm {

double rollout_distance(double v, double delta, const VehicleParams &params) {
  const double b = params.wheelbase;
  const double g = params.tau_s * v * std::sin(delta);
  const double arg = b * b - g * g;
  if (arg < 0.0) {
    throw DomainError("rollout_distance: steering/speed outside kinematic "
                      "validity, b^2 - (tau_s v sin delta)^2 < 0");
  }
  return b + params.tau_s * v * std::cos(delta) - std::sqrt(arg);
}

VehicleState step(const VehicleState &x, const ControlInput &u,
                  const VehicleParams &params) {
  const double b = params.wheelbase;
  const double ts = params.tau_s;
  const double fr = rollout_distance(x.v, u.delta, params);
  const double asin_arg = ts * x.v * std::sin(u.delta) / b;
  if (asin_arg < -1.0 || asin_arg > 1.0) {
    throw DomainError("step: asin argument outside [-1, 1]");
  }
  VehicleState next;
  next.p_x = x.p_x + fr * std::cos(x.theta);
  next.p_y = x.p_y + fr * std::sin(x.theta);
  next.theta = x.theta + std::asin(asin_arg);
  next.v = x.v + ts * u.a;
  return next;
}

void linearize(const VehicleState &x, const ControlInput &u,
               const VehicleParams &params, Eigen::Matrix4d &f_x,
               Eigen::Matrix<double, 4, 2> &f_u) {
  const double b = params.wheelbase;
  const double ts = params.tau_s;
  const double sd = std::sin(u.delta);
  const double cd = std::cos(u.delta);
  const double st = std::sin(x.theta);
  const double ct = std::cos(x.theta);
  const double g = ts * x.v * sd;
  const double arg = b * b - g * g;
  if (arg <= 0.0) {
    throw DomainError("linearize: outside kinematic validity region");
  }
  const double s = std::sqrt(arg);
  const double fr = b + ts * x.v * cd - s;

  // d f_r / dv and d f_r / ddelta
  const double dfr_dv = ts * cd + ts * sd * g / s;
  const double dfr_dd = -ts * x.v * sd + ts * x.v * cd * g / s;
  // theta update h = asin(g / b): dh/dv = ts*sd / s, dh/dd = ts*v*cd / s
  const double dh_dv = ts * sd / s;
  const double dh_dd = ts * x.v * cd / s;

  f_x.setIdentity();
  f_x(0, 2) = -fr * st;
  f_x(0, 3) = dfr_dv * ct;
  f_x(1, 2) = fr * ct;
  f_x(1, 3) = dfr_dv * st;
  f_x(2, 3) = dh_dv;

  f_u.setZero();
  f_u(0, 0) = dfr_dd * ct;
  f_u(1, 0) = dfr_dd * st;
  f_u(2, 0) = dh_dd;
  f_u(3, 1) = ts;
}

} // namespace coopadmm
