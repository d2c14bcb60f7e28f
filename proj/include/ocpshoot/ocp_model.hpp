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
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ocpshoot/errors.hpp"

namespace ocpshoot {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Trajectory = std::vector<VectorXd>;

struct Dims {
  int N = 1;   // horizon (number of stages)
  int nx = 1;  // state dimension
  int nu = 1;  // control dimension

  void validate() const;
  /// Size of the stacked primal vector (x_0, u_0, ..., u_{N-1}, x_N).
  int num_primal() const { return N * (nx + nu) + nx; }
  /// Column offset of x_i in the stacked primal vector.
  int x_offset(int i) const { return i * (nx + nu); }
  /// Column offset of u_i in the stacked primal vector.
  int u_offset(int i) const { return i * (nx + nu) + nx; }
};

/// f_i(x, u) together with its Jacobians.
struct DynamicsLinearization {
  VectorXd f;
  MatrixXd A;  // df/dx
  MatrixXd B;  // df/du
};

/// Stage-indexed discrete dynamics x_{i+1} = f_i(x_i, u_i).
struct Dynamics {
  using EvalFn = std::function<VectorXd(int, const VectorXd&, const VectorXd&)>;
  using LinearizeFn =
      std::function<DynamicsLinearization(int, const VectorXd&, const VectorXd&)>;
  /// (i, x, u, lambda) -> Hessian over (x, u) of lambda^T f_i(x, u).
  using HessContractionFn = std::function<MatrixXd(
      int, const VectorXd&, const VectorXd&, const VectorXd&)>;

  EvalFn eval;
  LinearizeFn linearize;
  HessContractionFn hess_contraction;  // optional, needed for exact Hessians

  MatrixXd jac_x(int i, const VectorXd& x, const VectorXd& u) const {
    return linearize(i, x, u).A;
  }
  MatrixXd jac_u(int i, const VectorXd& x, const VectorXd& u) const {
    return linearize(i, x, u).B;
  }
  bool has_hess_contraction() const { return static_cast<bool>(hess_contraction); }
};

/// Convex cost with user-supplied derivatives. For a stage cost the argument
/// is the concatenation (x_i, u_i); for the terminal cost it is x_N.
struct SmoothConvexCost {
  std::function<double(const VectorXd&)> value;
  std::function<VectorXd(const VectorXd&)> gradient;
  std::function<MatrixXd(const VectorXd&)> hessian;
};

/// l(z) = psi(r(z)) with psi convex and r nonlinear.
struct ConvexOverNonlinearCost {
  std::function<VectorXd(const VectorXd&)> residual;
  std::function<MatrixXd(const VectorXd&)> residual_jacobian;
  std::function<double(const VectorXd&)> outer_value;
  std::function<VectorXd(const VectorXd&)> outer_gradient;
  std::function<MatrixXd(const VectorXd&)> outer_hessian;
  /// Optional: (z, w) -> sum_k w_k * Hessian of r_k at z. Only consulted for
  /// exact-Hessian blocks and the error matrix; without it the residual
  /// curvature is treated as zero.
  std::function<MatrixXd(const VectorXd&, const VectorXd&)> residual_curvature;
};

using CostTerm = std::variant<SmoothConvexCost, ConvexOverNonlinearCost>;
using StageCost = CostTerm;
using TerminalCost = CostTerm;

double cost_value(const CostTerm& cost, const VectorXd& z);
VectorXd cost_gradient(const CostTerm& cost, const VectorXd& z);
/// Hessian for smooth convex costs, J^T psi'' J for convex-over-nonlinear.
MatrixXd cost_ggn_hessian(const CostTerm& cost, const VectorXd& z);
/// Exact cost Hessian minus cost_ggn_hessian (zero for smooth costs).
MatrixXd cost_curvature_correction(const CostTerm& cost, const VectorXd& z);

struct OcpProblem {
  std::string name;
  Dims dims;
  Dynamics dynamics;
  std::vector<StageCost> stage_costs;  // exactly N entries
  TerminalCost terminal_cost;
  VectorXd x0_bar;

  void validate() const;
};

/// Primal (and optionally dual) trajectory. lambda[0] belongs to the initial
/// value constraint, lambda[i+1] to the dynamics of stage i.
struct Iterate {
  Trajectory x;  // N+1 states
  Trajectory u;  // N controls
  std::optional<Trajectory> lambda;

  static Iterate zeros(const Dims& dims, bool with_duals = false);
  void validate(const Dims& dims) const;
};

/// Stacks (x_0, u_0, ..., x_{N-1}, u_{N-1}, x_N).
VectorXd stack_primal(const Iterate& it);
/// ||w_a - w_b||_2 over the primal variables.
double primal_distance(const Iterate& a, const Iterate& b);
/// Stacks (u_0, ..., u_{N-1}).
VectorXd stack_controls(const Trajectory& u);
Trajectory unstack_controls(const VectorXd& flat, int nu);

using VectorField = std::function<VectorXd(const VectorXd&, const VectorXd&)>;

/// Continuous-time system xdot = f(x, u) with Jacobians.
struct ContinuousSystem {
  VectorField f;
  std::function<MatrixXd(const VectorXd&, const VectorXd&)> f_x;
  std::function<MatrixXd(const VectorXd&, const VectorXd&)> f_u;
};

/// Classical RK4 with n_steps equal sub-steps and zero-order-hold control.
VectorXd rk4_step(const VectorField& f, const VectorXd& x, const VectorXd& u,
                  double h_total, int n_steps);

/// Same integration as rk4_step plus exact forward sensitivities of the
/// end state with respect to (x, u), propagated through every RK4 stage.
DynamicsLinearization rk4_step_with_sensitivities(const ContinuousSystem& sys,
                                                  const VectorXd& x,
                                                  const VectorXd& u,
                                                  double h_total, int n_steps);

struct FeasibilityResidual {
  Trajectory rows;  // rows[0] = x0_bar - x_0, rows[i+1] = f_i(x_i,u_i) - x_{i+1}
  double max_abs = 0.0;
};

FeasibilityResidual dynamics_feasibility_residual(const OcpProblem& problem,
                                                  const Iterate& it);

/// Open-loop rollout x_{i+1} = f_i(x_i, u_i) from x0.
Trajectory rollout(const OcpProblem& problem, const VectorXd& x0,
                   const Trajectory& u);

/// Builds a feasible iterate from controls by open-loop rollout from x0_bar.
Iterate feasible_iterate(const OcpProblem& problem, const Trajectory& u);

double eval_objective(const OcpProblem& problem, const Trajectory& x,
                      const Trajectory& u);

/// Concatenates (x, u).
VectorXd stage_point(const VectorXd& x, const VectorXd& u);

}  // namespace ocpshoot
