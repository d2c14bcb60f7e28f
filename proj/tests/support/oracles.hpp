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

#include <functional>

#include "ocpshoot/ocpshoot.hpp"

namespace ocpshoot::testing {

/// Central-difference Jacobian of fn at z.
MatrixXd fd_jacobian(const std::function<VectorXd(const VectorXd&)>& fn, const VectorXd& z,
                     double h);

/// Hessian of w -> lambda^T F(w) at the primal point of `at` by second-order
/// central differences, using only dynamics.eval. lambda is taken from
/// `duals` (lambda[i+1] multiplies f_i). Ordering (x_0, u_0, ..., x_N).
MatrixXd fd_constraint_hessian(const OcpProblem& problem, const Iterate& at,
                               const Trajectory& duals, double h);

/// dF/dw assembled from the A_i, B_i of the QP linearization.
MatrixXd constraint_jacobian_from_qp(const QpData& qp);

/// Unpacks a stacked primal vector into an iterate.
Iterate unstack_primal(const VectorXd& w, const Dims& dims);

/// max_ij |a_ij - b_ij| / max(1, max_ij |b_ij|).
double relative_error(const MatrixXd& a, const MatrixXd& b);

}  // namespace ocpshoot::testing
