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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ocpshoot/solvers.hpp"

namespace ocpshoot {

/// Jacobians A_i, B_i of the dynamics along a trajectory.
struct StageJacobians {
  std::vector<MatrixXd> A;
  std::vector<MatrixXd> B;
};

StageJacobians jacobians_along(const OcpProblem& problem, const Iterate& it);

/// Jacobian of F(w) = (x0_bar - x_0, f_i(x_i, u_i) - x_{i+1}) with respect to
/// w = (x_0, u_0, ..., x_{N-1}, u_{N-1}, x_N).
MatrixXd constraint_jacobian(const StageJacobians& jac, const Dims& dims);

/// Basis of the null space of the constraint Jacobian in the same ordering.
/// Column block j is the response of the linearized dynamics to a unit
/// change of u_j: identity at u_j, B_j at x_{j+1}, A_{i-1}...A_{j+1} B_j at
/// later x_i.
MatrixXd nullspace_basis(const std::vector<MatrixXd>& A_star,
                         const std::vector<MatrixXd>& B_star, const Dims& dims);

/// GGN Hessian of the objective at z_star, block diagonal in w ordering.
MatrixXd ggn_hessian_matrix(const OcpProblem& problem, const Iterate& z_star);

/// Difference between the exact Lagrangian Hessian and the GGN Hessian:
/// the Hessian of lambda^T F plus any residual curvature of
/// convex-over-nonlinear costs. The x_N block is zero.
MatrixXd error_matrix(const OcpProblem& problem, const Iterate& z_star);

struct LmiRate {
  double kappa = 0.0;
  VectorXd eigenvalues;  // ascending generalized eigenvalues of (Z^T E Z, Z^T M Z)
  double reduced_hessian_min_eigenvalue = 0.0;
};

/// Smallest kappa with -kappa Z^T M Z <= Z^T E Z <= kappa Z^T M Z.
/// Throws SoscViolation if Z^T M Z is not positive definite.
LmiRate lmi_rate(const MatrixXd& M, const MatrixXd& E, const MatrixXd& Z);

/// Default finite-difference step, scaled by max(1, ||z*||_inf) internally.
inline constexpr double kDefaultFdStep = 1e-6;
/// Maximum step norm of the map at z_star accepted as a fixed point.
inline constexpr double kFixedPointTol = 1e-9;

/// Central-difference Jacobian of u -> u+ where the input iterate is the
/// open-loop rollout of u (duals held at z_star) and u+ are the controls
/// returned by one step of the method.
MatrixXd solution_map_jacobian(const OcpProblem& problem, Method method, HessianMode mode,
                               const Iterate& z_star, double fd_step = kDefaultFdStep);

/// Spectral radius of solution_map_jacobian. Throws StaleReferenceError if
/// z_star is not a fixed point of the map.
double solution_map_spectral_radius(const OcpProblem& problem, Method method,
                                    HessianMode mode, const Iterate& z_star,
                                    double fd_step = kDefaultFdStep);

/// Spectral radius of the multiple shooting map on the full iterate
/// (all primal variables, plus duals in exact-Hessian mode).
double ms_full_spectral_radius(const OcpProblem& problem, HessianMode mode,
                               const Iterate& z_star, double fd_step = kDefaultFdStep);

/// kappa_hat_k = s_k / s_{k-1} over consecutive step norms; stops at the
/// first zero denominator.
std::vector<double> empirical_rates(const std::vector<double>& step_norms);
std::vector<double> empirical_rates(const SolveHistory& history);

/// Step norms below this are dominated by rounding in the iterates.
inline constexpr double kRateNoiseFloor = 1e-9;

/// Last kappa_hat whose two step norms are both >= floor; NaN if there is none.
double settled_rate(const std::vector<double>& step_norms, double floor = kRateNoiseFloor);

/// Least-squares fit of log e_{k+1} = intercept + slope * log e_k over the
/// consecutive pairs whose members both lie in [lower, upper].
struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
  double rate() const;  // exp(intercept)
};

OrderFit fit_convergence_order(const std::vector<double>& errors, double lower,
                               double upper);

/// Distances ||w^k - w_ref||_2 of every iterate in a history.
std::vector<double> distances_to(const SolveHistory& history, const Iterate& reference);

/// Most accurate available KKT point: exact-Hessian multiple shooting from
/// the LQR initial guess, falling back to GGN multiple shooting. Duals are
/// those of the final QP.
struct ReferenceSolution {
  Iterate z_star;
  std::string source;  // "eh-ms" or "ggn-ms"
  double final_step = 0.0;
};

ReferenceSolution reference_solution(const OcpProblem& problem, double step_tol = 1e-13);

/// Unit 2-norm control direction. Seed 0 is a fixed smooth pattern, other
/// seeds draw standard normal entries.
Trajectory perturbation_direction(const Dims& dims, std::uint64_t seed = 0);

/// Feasible iterate near z_star from the closed-loop rollout
/// u_i = u*_i + magnitude d_i + K_i (x_i - x*_i), with K_i the GGN Riccati
/// gains at z_star. The open-loop rollout of u* + magnitude d is useless for
/// unstable dynamics.
Iterate feasible_perturbation(const OcpProblem& problem, const Iterate& z_star,
                              const Trajectory& direction, double magnitude);

/// Offset used for near-solution starts of rate experiments.
inline constexpr double kNearSolutionOffset = 1e-2;

enum class HistoryStart { NearSolution, Lqr };

struct AnalysisOptions {
  double reference_step_tol = 1e-13;
  double fd_step = kDefaultFdStep;
  bool run_histories = true;  // full-step GGN solves for kappa_hat
  HistoryStart history_start = HistoryStart::NearSolution;
  double start_offset = kNearSolutionOffset;
  std::uint64_t seed = 0;
  int max_iters = 500;
};

struct ContractionReport {
  double kappa_lmi = 0.0;
  std::array<double, 3> kappa_spectral{};  // indexed by Method
  double kappa_spectral_ms_full = 0.0;
  std::array<std::vector<double>, 3> kappa_hat_series;
  std::array<double, 3> kappa_hat_settled{};
  std::array<Termination, 3> terminations{};
  VectorXd generalized_eigenvalues;
  Iterate z_star;
  std::string reference_source;
  double reduced_hessian_min_eigenvalue = 0.0;
  long z_rows = 0;
  long z_cols = 0;
  double nullspace_residual = 0.0;  // ||(dF/dw) Z||_inf
};

ContractionReport analyze_contraction(const OcpProblem& problem,
                                      const AnalysisOptions& options = {});

}  // namespace ocpshoot
