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

#include <vector>

#include "ocpshoot/ocp_model.hpp"

namespace ocpshoot {

enum class HessianMode { GGN, ExactHessian };

/// QP data of one stage. S is nu x nx; the stage Hessian is
/// [[Q, S^T], [S, R]] over (x_i, u_i).
struct StageQp {
  MatrixXd A, B;
  VectorXd a;
  MatrixXd Q, R, S;
  VectorXd q, r;
  VectorXd f_bar;  // f_i(xbar_i, ubar_i)
};

/// Equality-constrained QP over absolute (x, u):
///   min sum_i [q_i; r_i]^T [x_i; u_i] + 1/2 [x_i; u_i]^T H_i [x_i; u_i]
///       + p_N^T x_N + 1/2 x_N^T P_N x_N
///   s.t. x_0 = x0_bar,  x_{i+1} = a_i + A_i x_i + B_i u_i.
struct QpData {
  std::vector<StageQp> stages;
  MatrixXd P_N;
  VectorXd p_N;
  VectorXd x0_bar;

  int horizon() const { return static_cast<int>(stages.size()); }
};

/// Linearizes stage i at (xbar, ubar). lambda_next is the dual of the stage
/// dynamics (lambda_{i+1}); it is required in exact-Hessian mode and ignored
/// otherwise.
StageQp linearize_stage(const OcpProblem& problem, int i, const VectorXd& xbar,
                        const VectorXd& ubar, HessianMode mode,
                        const VectorXd* lambda_next);

/// P_N = Hessian of l_N, p_N = grad l_N - P_N xbar_N.
void linearize_terminal(const OcpProblem& problem, const VectorXd& xbar_N,
                        MatrixXd& P_N, VectorXd& p_N);

QpData build_qp_data(const OcpProblem& problem, const Iterate& it, HessianMode mode);

/// Value of the QP objective at (x, u).
double qp_objective(const QpData& qp, const Trajectory& x, const Trajectory& u);

struct GradientConsistencyReport {
  double max_deviation = 0.0;
  int worst_stage = -1;  // N denotes the terminal stage
};

/// Checks q_i + Q_i xbar_i + S_i^T ubar_i = grad_x l_i and the analogous
/// identities for r_i and p_N.
GradientConsistencyReport qp_gradient_consistency_check(const OcpProblem& problem,
                                                        const Iterate& it,
                                                        HessianMode mode);

}  // namespace ocpshoot
