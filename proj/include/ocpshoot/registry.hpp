// Copyright 2026 The ocpshoot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ocpshoot/ocp_model.hpp"

namespace ocpshoot {

/// Overrides accepted by registry_get. Unset fields keep the built-in
/// defaults of the requested problem.
struct ProblemOptions {
  std::optional<int> horizon;
  std::optional<int> nx;
  std::optional<int> nu;
  std::optional<VectorXd> x0;
  double cost_scale = 1.0;  // multiplies every stage and terminal cost
};

/// Chen & Allgower style bilinear two-state system with a quadratic
/// objective and a quadratic penalty on |u| > u_max.
struct Chen1998Params {
  double mu = 0.7;
  double h = 0.25;           // integration interval per stage
  int rk4_steps = 10;
  Eigen::Matrix2d Q = Eigen::Vector2d(0.5, 0.5).asDiagonal();
  double R = 0.8;
  Eigen::Matrix2d P = Eigen::Vector2d(10.0, 10.0).asDiagonal();
  double tau = 100.0;        // penalty weight
  double u_max = 1.0;
  int N = 20;
  Eigen::Vector2d x0{0.42, 0.45};
  double cost_scale = 1.0;
  double hess_fd_step = 1e-5;
};

/// Linear time-invariant system with quadratic costs.
struct LtiSpec {
  MatrixXd A, B, Q, R, P;
  VectorXd x0;
  int N = 10;
  double cost_scale = 1.0;
};

ContinuousSystem chen1998_vector_field(double mu);
OcpProblem make_chen1998(const Chen1998Params& params = {});

LtiSpec default_lti_spec(int nx, int nu, int N);
OcpProblem make_lti_problem(const LtiSpec& spec);

/// beta(u) = max(0, u - u_max)^2 + min(0, u + u_max)^2, elementwise sum.
double input_penalty(const VectorXd& u, double u_max);
VectorXd input_penalty_gradient(const VectorXd& u, double u_max);
/// Diagonal 2 on the violated side, 0 for |u| <= u_max (kink included).
MatrixXd input_penalty_hessian(const VectorXd& u, double u_max);

std::vector<std::string> registry_names();
OcpProblem registry_get(const std::string& name, const ProblemOptions& options = {});

}  // namespace ocpshoot
