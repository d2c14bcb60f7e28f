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

#include "ocpshoot/linearization.hpp"

namespace ocpshoot {

/// u_i = K_i x_i + k_i in absolute coordinates.
struct FeedbackLaw {
  std::vector<MatrixXd> K;  // N gains, nu x nx
  std::vector<VectorXd> k;  // N offsets, nu
};

/// Cost-to-go V_i(x) = 1/2 x^T P_i x + p_i^T x + const.
struct ValueFn {
  std::vector<MatrixXd> P;  // N+1 matrices
  std::vector<VectorXd> p;  // N+1 vectors
};

struct RiccatiSolution {
  FeedbackLaw law;
  ValueFn value;
};

/// Output of one backward step i given P_{i+1}, p_{i+1}.
struct RiccatiStep {
  MatrixXd K;
  VectorXd k;
  MatrixXd P;
  VectorXd p;
};

/// One step of the backward Riccati recursion. `shift` adds shift * I to
/// R_i before factorizing R_i + B_i^T P_{i+1} B_i.
///
/// Throws SingularStageError when the factorization fails.
RiccatiStep riccati_stage(const StageQp& stage, const MatrixXd& P_next,
                          const VectorXd& p_next, int index, double shift = 0.0);

RiccatiSolution backward_sweep(const QpData& qp, double shift = 0.0);

/// Applies the feedback law to the linear dynamics of the QP from x0_bar and
/// attaches the duals lambda_i = p_i + P_i x_i.
Iterate linear_forward_sweep(const QpData& qp, const RiccatiSolution& sol);

/// Reference solver: assembles the full KKT system of the QP in the ordering
/// (x_0, u_0, ..., x_N) and solves it densely. Duals are signed such that
/// grad(cost) + grad(F)^T lambda = 0 with F = (x0_bar - x_0, a_i + A_i x_i +
/// B_i u_i - x_{i+1}).
Iterate dense_kkt_solve(const QpData& qp);

/// lambda_i = p_i + P_i x_i for i = 0..N.
Trajectory qp_duals_from_valuefn(const ValueFn& vf, const Trajectory& x);

}  // namespace ocpshoot
