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

#include "ocpshoot/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace ocpshoot {

namespace {

double spectral_radius(const MatrixXd& J) {
  if (J.size() == 0) return 0.0;
  return Eigen::EigenSolver<MatrixXd>(J, false).eigenvalues().cwiseAbs().maxCoeff();
}

double scaled_step(const Iterate& z, double fd_step) {
  double scale = 1.0;
  for (const auto& v : z.x) scale = std::max(scale, v.lpNorm<Eigen::Infinity>());
  for (const auto& v : z.u) scale = std::max(scale, v.lpNorm<Eigen::Infinity>());
  return fd_step * scale;
}

Iterate rollout_with_duals(const OcpProblem& problem, const Trajectory& u,
                           const Iterate& z_star) {
  Iterate it = feasible_iterate(problem, u);
  it.lambda = z_star.lambda;
  return it;
}

}  // namespace

StageJacobians jacobians_along(const OcpProblem& problem, const Iterate& it) {
  StageJacobians jac;
  jac.A.reserve(problem.dims.N);
  jac.B.reserve(problem.dims.N);
  for (int i = 0; i < problem.dims.N; ++i) {
    DynamicsLinearization lin = problem.dynamics.linearize(i, it.x[i], it.u[i]);
    jac.A.push_back(std::move(lin.A));
    jac.B.push_back(std::move(lin.B));
  }
  return jac;
}

MatrixXd constraint_jacobian(const StageJacobians& jac, const Dims& d) {
  MatrixXd G = MatrixXd::Zero((d.N + 1) * d.nx, d.num_primal());
  G.block(0, 0, d.nx, d.nx) = -MatrixXd::Identity(d.nx, d.nx);
  for (int i = 0; i < d.N; ++i) {
    const int row = (i + 1) * d.nx;
    G.block(row, d.x_offset(i), d.nx, d.nx) = jac.A[i];
    G.block(row, d.u_offset(i), d.nx, d.nu) = jac.B[i];
    G.block(row, d.x_offset(i + 1), d.nx, d.nx) = -MatrixXd::Identity(d.nx, d.nx);
  }
  return G;
}

MatrixXd nullspace_basis(const std::vector<MatrixXd>& A_star,
                         const std::vector<MatrixXd>& B_star, const Dims& d) {
  d.validate();
  if (static_cast<int>(A_star.size()) != d.N || static_cast<int>(B_star.size()) != d.N) {
    throw ConfigurationError("nullspace_basis needs N Jacobian pairs");
  }
  for (int i = 0; i < d.N; ++i) {
    if (A_star[i].rows() != d.nx || A_star[i].cols() != d.nx || B_star[i].rows() != d.nx ||
        B_star[i].cols() != d.nu) {
      throw ConfigurationError("nullspace_basis: Jacobian " + std::to_string(i) +
                               " has wrong dimensions");
    }
  }
  MatrixXd Z = MatrixXd::Zero(d.num_primal(), d.N * d.nu);
  for (int j = 0; j < d.N; ++j) {
    const int col = j * d.nu;
    Z.block(d.u_offset(j), col, d.nu, d.nu) = MatrixXd::Identity(d.nu, d.nu);
    MatrixXd response = B_star[j];
    for (int i = j + 1; i <= d.N; ++i) {
      Z.block(d.x_offset(i), col, d.nx, d.nu) = response;
      if (i < d.N) response = A_star[i] * response;
    }
  }
  return Z;
}

MatrixXd ggn_hessian_matrix(const OcpProblem& problem, const Iterate& z) {
  const Dims& d = problem.dims;
  const int nz = d.nx + d.nu;
  MatrixXd M = MatrixXd::Zero(d.num_primal(), d.num_primal());
  for (int i = 0; i < d.N; ++i) {
    const MatrixXd H = cost_ggn_hessian(problem.stage_costs[i], stage_point(z.x[i], z.u[i]));
    M.block(d.x_offset(i), d.x_offset(i), nz, nz) = 0.5 * (H + H.transpose());
  }
  const MatrixXd P = cost_ggn_hessian(problem.terminal_cost, z.x[d.N]);
  M.block(d.x_offset(d.N), d.x_offset(d.N), d.nx, d.nx) = 0.5 * (P + P.transpose());
  return M;
}

MatrixXd error_matrix(const OcpProblem& problem, const Iterate& z) {
  const Dims& d = problem.dims;
  z.validate(d);
  if (!z.lambda) throw ConfigurationError("error_matrix requires duals");
  if (!problem.dynamics.has_hess_contraction()) {
    throw ConfigurationError("error_matrix requires dynamics.hess_contraction");
  }
  const int nz = d.nx + d.nu;
  MatrixXd E = MatrixXd::Zero(d.num_primal(), d.num_primal());
  for (int i = 0; i < d.N; ++i) {
    MatrixXd H = problem.dynamics.hess_contraction(i, z.x[i], z.u[i], (*z.lambda)[i + 1]);
    H += cost_curvature_correction(problem.stage_costs[i], stage_point(z.x[i], z.u[i]));
    E.block(d.x_offset(i), d.x_offset(i), nz, nz) = 0.5 * (H + H.transpose());
  }
  const MatrixXd T = cost_curvature_correction(problem.terminal_cost, z.x[d.N]);
  E.block(d.x_offset(d.N), d.x_offset(d.N), d.nx, d.nx) = 0.5 * (T + T.transpose());
  return E;
}

LmiRate lmi_rate(const MatrixXd& M, const MatrixXd& E, const MatrixXd& Z) {
  if (M.rows() != Z.rows() || E.rows() != Z.rows() || M.cols() != M.rows() ||
      E.cols() != E.rows()) {
    throw ConfigurationError("lmi_rate: dimension mismatch");
  }
  MatrixXd Mt = Z.transpose() * M * Z;
  MatrixXd Et = Z.transpose() * E * Z;
  Mt = 0.5 * (Mt + Mt.transpose()).eval();
  Et = 0.5 * (Et + Et.transpose()).eval();

  LmiRate out;
  out.reduced_hessian_min_eigenvalue =
      Mt.size() == 0
          ? 0.0
          : Eigen::SelfAdjointEigenSolver<MatrixXd>(Mt, Eigen::EigenvaluesOnly)
                .eigenvalues()
                .minCoeff();
  const Eigen::LLT<MatrixXd> llt(Mt);
  if (!(out.reduced_hessian_min_eigenvalue > 1e-10) || llt.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "reduced GGN Hessian is not positive definite (min eigenvalue "
        << out.reduced_hessian_min_eigenvalue << ")";
    throw SoscViolation(out.reduced_hessian_min_eigenvalue, msg.str());
  }

  // C = L^{-1} Et L^{-T} has the same spectrum as the pencil (Et, Mt).
  const auto L = llt.matrixL();
  const MatrixXd X = L.solve(Et);
  MatrixXd C = L.solve(X.transpose());
  C = 0.5 * (C + C.transpose()).eval();
  out.eigenvalues = Eigen::SelfAdjointEigenSolver<MatrixXd>(C, Eigen::EigenvaluesOnly).eigenvalues();
  out.kappa = out.eigenvalues.cwiseAbs().maxCoeff();
  return out;
}

MatrixXd solution_map_jacobian(const OcpProblem& problem, Method method, HessianMode mode,
                               const Iterate& z_star, double fd_step) {
  if (!(fd_step > 0.0)) throw ConfigurationError("fd_step must be positive");
  const Dims& d = problem.dims;
  z_star.validate(d);
  const VectorXd u0 = stack_controls(z_star.u);

  const Iterate base = rollout_with_duals(problem, z_star.u, z_star);
  const Iterate base_next = take_step(method, problem, base, mode);
  const double residual = primal_distance(base_next, base);
  if (!(residual <= kFixedPointTol)) {
    std::ostringstream msg;
    msg << "reference is not a fixed point of " << to_string(mode) << "-"
        << to_string(method) << " (step norm " << residual << ")";
    throw StaleReferenceError(residual, msg.str());
  }

  const double h = scaled_step(z_star, fd_step);
  const int n = static_cast<int>(u0.size());
  MatrixXd J(n, n);
  for (int j = 0; j < n; ++j) {
    VectorXd up = u0, um = u0;
    up[j] += h;
    um[j] -= h;
    const Iterate plus =
        take_step(method, problem, rollout_with_duals(problem, unstack_controls(up, d.nu), z_star), mode);
    const Iterate minus =
        take_step(method, problem, rollout_with_duals(problem, unstack_controls(um, d.nu), z_star), mode);
    J.col(j) = (stack_controls(plus.u) - stack_controls(minus.u)) / (2.0 * h);
  }
  return J;
}

double solution_map_spectral_radius(const OcpProblem& problem, Method method,
                                    HessianMode mode, const Iterate& z_star,
                                    double fd_step) {
  return spectral_radius(solution_map_jacobian(problem, method, mode, z_star, fd_step));
}

double ms_full_spectral_radius(const OcpProblem& problem, HessianMode mode,
                               const Iterate& z_star, double fd_step) {
  const Dims& d = problem.dims;
  z_star.validate(d);
  const bool with_duals = mode == HessianMode::ExactHessian;
  if (with_duals && !z_star.lambda) throw ConfigurationError("exact Hessian needs duals");
  const int nw = d.num_primal();
  const int n = nw + (with_duals ? (d.N + 1) * d.nx : 0);

  auto pack = [&](const Iterate& it) {
    VectorXd v(n);
    v.head(nw) = stack_primal(it);
    if (with_duals) {
      for (int i = 0; i <= d.N; ++i) v.segment(nw + i * d.nx, d.nx) = (*it.lambda)[i];
    }
    return v;
  };
  auto unpack = [&](const VectorXd& v) {
    Iterate it;
    it.x.resize(d.N + 1);
    it.u.resize(d.N);
    for (int i = 0; i < d.N; ++i) {
      it.x[i] = v.segment(d.x_offset(i), d.nx);
      it.u[i] = v.segment(d.u_offset(i), d.nu);
    }
    it.x[d.N] = v.segment(d.x_offset(d.N), d.nx);
    if (with_duals) {
      Trajectory lambda(d.N + 1);
      for (int i = 0; i <= d.N; ++i) lambda[i] = v.segment(nw + i * d.nx, d.nx);
      it.lambda = std::move(lambda);
    } else {
      it.lambda = z_star.lambda;
    }
    return it;
  };

  const Iterate next = ms_step(problem, z_star, mode);
  const double residual = primal_distance(next, z_star);
  if (!(residual <= kFixedPointTol)) {
    std::ostringstream msg;
    msg << "reference is not a fixed point of multiple shooting (step norm " << residual << ")";
    throw StaleReferenceError(residual, msg.str());
  }

  const VectorXd z0 = pack(z_star);
  const double h = scaled_step(z_star, fd_step);
  MatrixXd J(n, n);
  for (int j = 0; j < n; ++j) {
    VectorXd zp = z0, zm = z0;
    zp[j] += h;
    zm[j] -= h;
    J.col(j) = (pack(ms_step(problem, unpack(zp), mode)) -
                pack(ms_step(problem, unpack(zm), mode))) / (2.0 * h);
  }
  return spectral_radius(J);
}

std::vector<double> empirical_rates(const std::vector<double>& step_norms) {
  std::vector<double> rates;
  for (std::size_t k = 1; k < step_norms.size(); ++k) {
    if (step_norms[k - 1] == 0.0) break;
    rates.push_back(step_norms[k] / step_norms[k - 1]);
  }
  return rates;
}

std::vector<double> empirical_rates(const SolveHistory& history) {
  return empirical_rates(history.step_norms);
}

double OrderFit::rate() const { return std::exp(intercept); }

OrderFit fit_convergence_order(const std::vector<double>& errors, double lower,
                               double upper) {
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
    const double a = errors[k], b = errors[k + 1];
    if (a >= lower && a <= upper && b >= lower && b <= upper) {
      xs.push_back(std::log(a));
      ys.push_back(std::log(b));
    }
  }
  OrderFit fit;
  fit.points = static_cast<int>(xs.size());
  if (fit.points < 2) {
    fit.slope = std::numeric_limits<double>::quiet_NaN();
    fit.intercept = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

std::vector<double> distances_to(const SolveHistory& history, const Iterate& reference) {
  std::vector<double> out;
  out.reserve(history.iterates.size());
  for (const auto& it : history.iterates) out.push_back(primal_distance(it, reference));
  return out;
}

ReferenceSolution reference_solution(const OcpProblem& problem, double step_tol) {
  const Iterate init = lqr_feasible_init(problem);
  SolverConfig cfg;
  cfg.method = Method::MultipleShooting;
  cfg.step_tol = step_tol;
  cfg.max_iters = 500;

  ReferenceSolution ref;
  if (problem.dynamics.has_hess_contraction()) {
    cfg.mode = HessianMode::ExactHessian;
    const SolveHistory h = solve(problem, init, cfg);
    if (h.termination == Termination::Converged) {
      ref.z_star = h.iterates.back();
      ref.source = "eh-ms";
      ref.final_step = h.step_norms.back();
      return ref;
    }
  }
  cfg.mode = HessianMode::GGN;
  cfg.line_search = Backtracking{};
  const SolveHistory h = solve(problem, init, cfg);
  if (h.termination != Termination::Converged) {
    throw OcpError(std::string("reference solve did not converge: ") +
                   to_string(h.termination));
  }
  ref.z_star = h.iterates.back();
  ref.source = "ggn-ms";
  ref.final_step = h.step_norms.back();
  return ref;
}

double settled_rate(const std::vector<double>& step_norms, double floor) {
  double rate = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 1; k < step_norms.size(); ++k) {
    if (step_norms[k - 1] >= floor && step_norms[k] >= floor) {
      rate = step_norms[k] / step_norms[k - 1];
    }
  }
  return rate;
}

Trajectory perturbation_direction(const Dims& dims, std::uint64_t seed) {
  dims.validate();
  Trajectory d(dims.N, VectorXd::Zero(dims.nu));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double norm2 = 0.0;
  for (int i = 0; i < dims.N; ++i) {
    for (int j = 0; j < dims.nu; ++j) {
      d[i][j] = seed == 0 ? std::cos(1.3 * i + 0.7 * j) : normal(rng);
      norm2 += d[i][j] * d[i][j];
    }
  }
  const double norm = std::sqrt(norm2);
  for (auto& v : d) v /= norm;
  return d;
}

Iterate feasible_perturbation(const OcpProblem& problem, const Iterate& z_star,
                              const Trajectory& direction, double magnitude) {
  const Dims& d = problem.dims;
  z_star.validate(d);
  if (static_cast<int>(direction.size()) != d.N) {
    throw ConfigurationError("perturbation direction needs N control vectors");
  }
  const QpData qp = build_qp_data(problem, z_star, HessianMode::GGN);
  const RiccatiSolution sol = backward_sweep(qp);
  Iterate it;
  it.x.resize(d.N + 1);
  it.u.resize(d.N);
  it.x[0] = problem.x0_bar;
  for (int i = 0; i < d.N; ++i) {
    if (direction[i].size() != d.nu) {
      throw ConfigurationError("perturbation direction has wrong control dimension");
    }
    it.u[i] = z_star.u[i] + magnitude * direction[i] + sol.law.K[i] * (it.x[i] - z_star.x[i]);
    it.x[i + 1] = problem.dynamics.eval(i, it.x[i], it.u[i]);
  }
  return it;
}

ContractionReport analyze_contraction(const OcpProblem& problem,
                                      const AnalysisOptions& options) {
  ContractionReport report;
  const ReferenceSolution ref = reference_solution(problem, options.reference_step_tol);
  report.z_star = ref.z_star;
  report.reference_source = ref.source;

  const StageJacobians jac = jacobians_along(problem, ref.z_star);
  const MatrixXd Z = nullspace_basis(jac.A, jac.B, problem.dims);
  report.z_rows = Z.rows();
  report.z_cols = Z.cols();
  report.nullspace_residual =
      (constraint_jacobian(jac, problem.dims) * Z).lpNorm<Eigen::Infinity>();

  const LmiRate lmi = lmi_rate(ggn_hessian_matrix(problem, ref.z_star),
                               error_matrix(problem, ref.z_star), Z);
  report.kappa_lmi = lmi.kappa;
  report.generalized_eigenvalues = lmi.eigenvalues;
  report.reduced_hessian_min_eigenvalue = lmi.reduced_hessian_min_eigenvalue;

  for (Method m : {Method::MultipleShooting, Method::SingleShooting, Method::DDP}) {
    report.kappa_spectral[static_cast<int>(m)] = solution_map_spectral_radius(
        problem, m, HessianMode::GGN, ref.z_star, options.fd_step);
  }
  report.kappa_spectral_ms_full =
      ms_full_spectral_radius(problem, HessianMode::GGN, ref.z_star, options.fd_step);

  report.terminations.fill(Termination::MaxIters);
  report.kappa_hat_settled.fill(std::numeric_limits<double>::quiet_NaN());
  if (options.run_histories) {
    const Iterate init =
        options.history_start == HistoryStart::Lqr
            ? lqr_feasible_init(problem)
            : feasible_perturbation(problem, ref.z_star,
                                    perturbation_direction(problem.dims, options.seed),
                                    options.start_offset);
    for (Method m : {Method::MultipleShooting, Method::SingleShooting, Method::DDP}) {
      SolverConfig cfg;
      cfg.method = m;
      cfg.mode = HessianMode::GGN;
      cfg.max_iters = options.max_iters;
      const SolveHistory h = solve(problem, init, cfg);
      report.kappa_hat_series[static_cast<int>(m)] = empirical_rates(h);
      report.kappa_hat_settled[static_cast<int>(m)] = settled_rate(h.step_norms);
      report.terminations[static_cast<int>(m)] = h.termination;
    }
  }
  return report;
}

}  // namespace ocpshoot
