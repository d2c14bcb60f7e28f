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

#include <string>
#include <variant>
#include <vector>

#include "ocpshoot/linearization.hpp"
#include "ocpshoot/riccati.hpp"

namespace ocpshoot {

enum class Method { MultipleShooting, SingleShooting, DDP };

struct FullStep {};

/// Armijo backtracking on u_i = ubar_i + alpha * dk_i + K_i (x_i - xbar_i).
/// SS/DDP test the objective, MS tests the l1 merit V + sigma * ||F||_1.
struct Backtracking {
  double c = 1e-4;      // sufficient-decrease coefficient
  double beta = 0.5;    // shrink factor
  double sigma = 1e3;   // MS merit penalty weight
  int max_backtracks = 40;
};

using LineSearch = std::variant<FullStep, Backtracking>;

struct SolverConfig {
  Method method = Method::MultipleShooting;
  HessianMode mode = HessianMode::GGN;
  double step_tol = 1e-12;
  double feas_tol = 1e-10;
  int max_iters = 200;
  LineSearch line_search = FullStep{};
  double levenberg_shift = 0.0;   // added to R_i in the Riccati factorization
  double divergence_threshold = 1e6;

  void validate() const;
};

enum class Termination { Converged, MaxIters, Diverged, RiccatiFailure, LineSearchFailure };

struct SolveHistory {
  std::vector<Iterate> iterates;
  std::vector<double> step_norms;         // ||w^{k+1} - w^k||_2, primal only
  std::vector<double> objectives;         // per iterate
  std::vector<double> feasibility_norms;  // max-abs dynamics residual per iterate
  std::vector<double> step_sizes;         // accepted alpha per iteration
  Termination termination = Termination::MaxIters;
  std::string message;

  int iterations() const { return static_cast<int>(step_norms.size()); }
};

struct StepOptions {
  double alpha = 1.0;
  double shift = 0.0;
  double feas_tol = 1e-10;
};

/// Multiple shooting: QP solve via Riccati plus the linear forward sweep.
/// Returns states, controls and duals lambda_i = p_i + P_i x_i.
Iterate ms_step(const OcpProblem& problem, const Iterate& it, HessianMode mode,
                const StepOptions& opts = {});

/// Single shooting: shared backward sweep, controls from the linear sweep on
/// auxiliary states, states from the nonlinear open-loop rollout.
Iterate ss_step(const OcpProblem& problem, const Iterate& it, HessianMode mode,
                const StepOptions& opts = {});

/// DDP: shared backward sweep, closed-loop nonlinear rollout.
Iterate ddp_step(const OcpProblem& problem, const Iterate& it, HessianMode mode,
                 const StepOptions& opts = {});

Iterate take_step(Method method, const OcpProblem& problem, const Iterate& it,
                  HessianMode mode, const StepOptions& opts = {});

SolveHistory solve(const OcpProblem& problem, const Iterate& init, const SolverConfig& cfg);

/// State weight used for the LQR gain of the initial guess. The input weight
/// is always the stage cost Hessian in u at the origin.
enum class LqrStateWeight {
  Terminal,  // Hessian of l_N at the origin
  Stage,     // x-block of the stage cost Hessian at the origin
};

/// Feasible initial guess: rolls out the nonlinear dynamics from x0 under the
/// infinite-horizon discrete LQR feedback of the linearization at the origin.
/// Throws InitializationError if the origin is not a steady state, the
/// Riccati iteration does not converge or the linear closed loop is unstable.
Iterate lqr_feasible_init(const OcpProblem& problem, const VectorXd& x0,
                          LqrStateWeight weight = LqrStateWeight::Terminal);
Iterate lqr_feasible_init(const OcpProblem& problem);

const char* to_string(Method method);
const char* to_string(HessianMode mode);
const char* to_string(Termination termination);

namespace detail {

/// Result of the backward sweep. For SS/DDP in exact-Hessian mode the stage
/// Hessians depend on duals computed during the same sweep, so linearization
/// and recursion are interleaved.
struct BackwardPass {
  QpData qp;
  RiccatiSolution sol;
};

BackwardPass backward_pass(Method method, const OcpProblem& problem, const Iterate& it,
                           HessianMode mode, double shift);

Iterate forward_pass(Method method, const OcpProblem& problem, const Iterate& it,
                     const BackwardPass& bp, double alpha);

}  // namespace detail

}  // namespace ocpshoot
