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

#include "ocpshoot/solvers.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ocpshoot {

namespace detail {

BackwardPass backward_pass(Method method, const OcpProblem& problem, const Iterate& it,
                           HessianMode mode, double shift) {
  BackwardPass bp;
  if (method == Method::MultipleShooting || mode == HessianMode::GGN) {
    bp.qp = build_qp_data(problem, it, mode);
    bp.sol = backward_sweep(bp.qp, shift);
    return bp;
  }

  // SS/DDP with exact Hessian: lambda_{i+1} = p_{i+1} + P_{i+1} xbar_{i+1} is
  // needed to build stage i.
  const Dims& d = problem.dims;
  it.validate(d);
  bp.qp.x0_bar = problem.x0_bar;
  bp.qp.stages.resize(d.N);
  linearize_terminal(problem, it.x[d.N], bp.qp.P_N, bp.qp.p_N);
  RiccatiSolution& sol = bp.sol;
  sol.law.K.resize(d.N);
  sol.law.k.resize(d.N);
  sol.value.P.resize(d.N + 1);
  sol.value.p.resize(d.N + 1);
  sol.value.P[d.N] = bp.qp.P_N;
  sol.value.p[d.N] = bp.qp.p_N;
  for (int i = d.N - 1; i >= 0; --i) {
    const VectorXd lambda_next = sol.value.p[i + 1] + sol.value.P[i + 1] * it.x[i + 1];
    bp.qp.stages[i] = linearize_stage(problem, i, it.x[i], it.u[i], mode, &lambda_next);
    RiccatiStep step =
        riccati_stage(bp.qp.stages[i], sol.value.P[i + 1], sol.value.p[i + 1], i, shift);
    sol.law.K[i] = std::move(step.K);
    sol.law.k[i] = std::move(step.k);
    sol.value.P[i] = std::move(step.P);
    sol.value.p[i] = std::move(step.p);
  }
  return bp;
}

Iterate forward_pass(Method method, const OcpProblem& problem, const Iterate& it,
                     const BackwardPass& bp, double alpha) {
  const int N = problem.dims.N;
  const FeedbackLaw& law = bp.sol.law;
  // The recursion yields the absolute law u = K x + k; the step form uses the
  // offset relative to the current iterate, dk = k + K xbar - ubar.
  auto control = [&](int i, const VectorXd& x_fb) -> VectorXd {
    const VectorXd dk = law.k[i] + law.K[i] * it.x[i] - it.u[i];
    return it.u[i] + alpha * dk + law.K[i] * (x_fb - it.x[i]);
  };
  auto linear_next = [&](int i, const VectorXd& x, const VectorXd& u) -> VectorXd {
    const StageQp& st = bp.qp.stages[i];
    return st.f_bar + st.A * (x - it.x[i]) + st.B * (u - it.u[i]);
  };

  Iterate out;
  out.x.resize(N + 1);
  out.u.resize(N);
  out.x[0] = problem.x0_bar;
  switch (method) {
    case Method::MultipleShooting:
      for (int i = 0; i < N; ++i) {
        out.u[i] = control(i, out.x[i]);
        out.x[i + 1] = linear_next(i, out.x[i], out.u[i]);
      }
      out.lambda = qp_duals_from_valuefn(bp.sol.value, out.x);
      break;
    case Method::SingleShooting: {
      VectorXd x_hat = problem.x0_bar;
      for (int i = 0; i < N; ++i) {
        out.u[i] = control(i, x_hat);
        x_hat = linear_next(i, x_hat, out.u[i]);
        out.x[i + 1] = problem.dynamics.eval(i, out.x[i], out.u[i]);
      }
      break;
    }
    case Method::DDP:
      for (int i = 0; i < N; ++i) {
        out.u[i] = control(i, out.x[i]);
        out.x[i + 1] = problem.dynamics.eval(i, out.x[i], out.u[i]);
      }
      break;
  }
  return out;
}

}  // namespace detail

namespace {

void require_feasible(const OcpProblem& problem, const Iterate& it, double tol,
                      const char* who) {
  const double res = dynamics_feasibility_residual(problem, it).max_abs;
  if (!(res <= tol)) {
    std::ostringstream msg;
    msg << who << " requires a feasible iterate (residual " << res << " > " << tol << ")";
    throw FeasibilityError(res, msg.str());
  }
}

Iterate with_default_duals(const OcpProblem& problem, const Iterate& it, HessianMode mode) {
  if (mode != HessianMode::ExactHessian || it.lambda) return it;
  Iterate copy = it;
  copy.lambda = Trajectory(problem.dims.N + 1, VectorXd::Zero(problem.dims.nx));
  return copy;
}

double l1_residual(const OcpProblem& problem, const Iterate& it) {
  double total = 0.0;
  for (const auto& row : dynamics_feasibility_residual(problem, it).rows) {
    total += row.lpNorm<1>();
  }
  return total;
}

}  // namespace

Iterate ms_step(const OcpProblem& problem, const Iterate& it, HessianMode mode,
                const StepOptions& opts) {
  const auto bp = detail::backward_pass(Method::MultipleShooting, problem, it, mode, opts.shift);
  return detail::forward_pass(Method::MultipleShooting, problem, it, bp, opts.alpha);
}

Iterate ss_step(const OcpProblem& problem, const Iterate& it, HessianMode mode,
                const StepOptions& opts) {
  require_feasible(problem, it, opts.feas_tol, "single shooting");
  const auto bp = detail::backward_pass(Method::SingleShooting, problem, it, mode, opts.shift);
  return detail::forward_pass(Method::SingleShooting, problem, it, bp, opts.alpha);
}

Iterate ddp_step(const OcpProblem& problem, const Iterate& it, HessianMode mode,
                 const StepOptions& opts) {
  require_feasible(problem, it, opts.feas_tol, "DDP");
  const auto bp = detail::backward_pass(Method::DDP, problem, it, mode, opts.shift);
  return detail::forward_pass(Method::DDP, problem, it, bp, opts.alpha);
}

Iterate take_step(Method method, const OcpProblem& problem, const Iterate& it,
                  HessianMode mode, const StepOptions& opts) {
  switch (method) {
    case Method::MultipleShooting: return ms_step(problem, it, mode, opts);
    case Method::SingleShooting: return ss_step(problem, it, mode, opts);
    case Method::DDP: return ddp_step(problem, it, mode, opts);
  }
  throw ConfigurationError("unknown method");
}

void SolverConfig::validate() const {
  if (!(step_tol > 0.0) || !(feas_tol > 0.0)) {
    throw ConfigurationError("tolerances must be positive");
  }
  if (max_iters < 0) throw ConfigurationError("max_iters must be non-negative");
  if (!(levenberg_shift >= 0.0)) throw ConfigurationError("levenberg_shift must be >= 0");
  if (!(divergence_threshold > 0.0)) {
    throw ConfigurationError("divergence_threshold must be positive");
  }
  if (const auto* bt = std::get_if<Backtracking>(&line_search)) {
    if (!(bt->c > 0.0 && bt->c < 1.0)) throw ConfigurationError("line search c must be in (0,1)");
    if (!(bt->beta > 0.0 && bt->beta < 1.0)) {
      throw ConfigurationError("line search beta must be in (0,1)");
    }
    if (!(bt->sigma > 0.0)) throw ConfigurationError("merit weight sigma must be positive");
    if (bt->max_backtracks < 1) throw ConfigurationError("max_backtracks must be >= 1");
  }
}

SolveHistory solve(const OcpProblem& problem, const Iterate& init, const SolverConfig& cfg) {
  cfg.validate();
  problem.validate();
  init.validate(problem.dims);
  if (cfg.method != Method::MultipleShooting) {
    require_feasible(problem, init, cfg.feas_tol,
                     cfg.method == Method::DDP ? "DDP" : "single shooting");
  }

  SolveHistory hist;
  Iterate current = cfg.method == Method::MultipleShooting
                        ? with_default_duals(problem, init, cfg.mode)
                        : init;
  auto record_point = [&](const Iterate& it) {
    hist.objectives.push_back(eval_objective(problem, it.x, it.u));
    hist.feasibility_norms.push_back(dynamics_feasibility_residual(problem, it).max_abs);
  };
  hist.iterates.push_back(current);
  record_point(current);

  const auto* bt = std::get_if<Backtracking>(&cfg.line_search);
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    detail::BackwardPass bp;
    try {
      bp = detail::backward_pass(cfg.method, problem, current, cfg.mode, cfg.levenberg_shift);
    } catch (const SingularStageError& e) {
      hist.termination = Termination::RiccatiFailure;
      hist.message = e.what();
      return hist;
    }

    Iterate next;
    double alpha = 1.0;
    // Norm of the undamped QP step; a shrunk alpha must not fake convergence.
    double direction = 0.0;
    try {
      if (!bt) {
        next = detail::forward_pass(cfg.method, problem, current, bp, 1.0);
      } else {
        const Iterate full =
            detail::forward_pass(Method::MultipleShooting, problem, current, bp, 1.0);
        direction = primal_distance(full, current);
        const double model_decrease = std::max(
            0.0, qp_objective(bp.qp, current.x, current.u) - qp_objective(bp.qp, full.x, full.u));
        const bool use_merit = cfg.method == Method::MultipleShooting;
        auto merit = [&](const Iterate& it) {
          double v = eval_objective(problem, it.x, it.u);
          if (use_merit) v += bt->sigma * l1_residual(problem, it);
          return v;
        };
        const double phi0 = merit(current);
        const double predicted =
            model_decrease + (use_merit ? bt->sigma * l1_residual(problem, current) : 0.0);
        // Rounding slack so that tiny steps near the solution are not rejected on noise.
        // The gap term rounds relative to the state magnitudes, not to the gaps.
        double scale = std::abs(eval_objective(problem, current.x, current.u));
        if (use_merit) {
          for (const auto& xi : current.x) scale += bt->sigma * xi.lpNorm<1>();
        }
        const double slack = 64.0 * std::numeric_limits<double>::epsilon() * scale;
        bool accepted = false;
        for (int ls = 0; ls < bt->max_backtracks; ++ls) {
          try {
            Iterate trial = detail::forward_pass(cfg.method, problem, current, bp, alpha);
            const double phi = merit(trial);
            if (std::isfinite(phi) && phi <= phi0 - bt->c * alpha * predicted + slack) {
              next = std::move(trial);
              accepted = true;
              break;
            }
          } catch (const IntegrationError&) {
            // rollout left the domain; treat as a rejected trial
          }
          alpha *= bt->beta;
        }
        if (!accepted) {
          hist.termination = Termination::LineSearchFailure;
          hist.message = "no sufficient decrease after " +
                         std::to_string(bt->max_backtracks) + " backtracks";
          return hist;
        }
      }
    } catch (const IntegrationError& e) {
      hist.termination = Termination::Diverged;
      hist.message = e.what();
      return hist;
    }

    const double step = primal_distance(next, current);
    hist.iterates.push_back(next);
    hist.step_norms.push_back(step);
    hist.step_sizes.push_back(alpha);
    record_point(next);
    current = std::move(next);

    if (!std::isfinite(step) || step > cfg.divergence_threshold) {
      hist.termination = Termination::Diverged;
      hist.message = "step norm exceeded divergence threshold";
      return hist;
    }
    if (step <= cfg.step_tol && (!bt || direction <= cfg.step_tol)) {
      hist.termination = Termination::Converged;
      return hist;
    }
  }
  hist.termination = Termination::MaxIters;
  return hist;
}

Iterate lqr_feasible_init(const OcpProblem& problem, const VectorXd& x0,
                          LqrStateWeight weight) {
  problem.validate();
  const Dims& d = problem.dims;
  if (x0.size() != d.nx) throw ConfigurationError("x0 has wrong dimension");
  const VectorXd xs = VectorXd::Zero(d.nx), us = VectorXd::Zero(d.nu);

  const DynamicsLinearization lin = problem.dynamics.linearize(0, xs, us);
  if (lin.f.lpNorm<Eigen::Infinity>() > 1e-12) {
    throw InitializationError("origin is not a steady state of the dynamics");
  }
  const MatrixXd H = cost_ggn_hessian(problem.stage_costs[0], stage_point(xs, us));
  MatrixXd Q, S;
  if (weight == LqrStateWeight::Terminal) {
    Q = cost_ggn_hessian(problem.terminal_cost, xs);
    S = MatrixXd::Zero(d.nu, d.nx);
  } else {
    Q = H.topLeftCorner(d.nx, d.nx);
    S = H.bottomLeftCorner(d.nu, d.nx);
  }
  const MatrixXd R = H.bottomRightCorner(d.nu, d.nu);
  const MatrixXd& A = lin.A;
  const MatrixXd& B = lin.B;

  // Fixed-point iteration of the discrete algebraic Riccati equation.
  MatrixXd P = Q;
  MatrixXd K = MatrixXd::Zero(d.nu, d.nx);
  bool converged = false;
  for (int iter = 0; iter < 100000; ++iter) {
    const Eigen::LLT<MatrixXd> llt(R + B.transpose() * P * B);
    if (llt.info() != Eigen::Success) {
      throw InitializationError("LQR iteration hit a singular R + B^T P B");
    }
    K = -llt.solve(S + B.transpose() * P * A);
    MatrixXd P_next = Q + A.transpose() * P * A + (S.transpose() + A.transpose() * P * B) * K;
    P_next = 0.5 * (P_next + P_next.transpose()).eval();
    if (!P_next.allFinite()) break;
    const double change = (P_next - P).norm();
    P = std::move(P_next);
    if (change <= 1e-13 * std::max(1.0, P.norm())) {
      converged = true;
      break;
    }
  }
  if (!converged) throw InitializationError("LQR Riccati iteration did not converge");
  if (!std::isfinite(x0.norm())) throw InitializationError("x0 is not finite");
  K = -(R + B.transpose() * P * B).llt().solve(S + B.transpose() * P * A);

  const MatrixXd closed_loop = A + B * K;
  const double radius = closed_loop.eigenvalues().cwiseAbs().maxCoeff();
  if (!(radius < 1.0)) {
    std::ostringstream msg;
    msg << "LQR closed loop is not stable (spectral radius " << radius << ")";
    throw InitializationError(msg.str());
  }

  Iterate it;
  it.x.resize(d.N + 1);
  it.u.resize(d.N);
  it.x[0] = x0;
  try {
    for (int i = 0; i < d.N; ++i) {
      it.u[i] = K * it.x[i];
      it.x[i + 1] = problem.dynamics.eval(i, it.x[i], it.u[i]);
    }
  } catch (const IntegrationError& e) {
    throw InitializationError(std::string("LQR rollout diverged: ") + e.what());
  }
  return it;
}

Iterate lqr_feasible_init(const OcpProblem& problem) {
  return lqr_feasible_init(problem, problem.x0_bar);
}

const char* to_string(Method method) {
  switch (method) {
    case Method::MultipleShooting: return "ms";
    case Method::SingleShooting: return "ss";
    case Method::DDP: return "ddp";
  }
  return "?";
}

const char* to_string(HessianMode mode) {
  return mode == HessianMode::GGN ? "ggn" : "eh";
}

const char* to_string(Termination termination) {
  switch (termination) {
    case Termination::Converged: return "converged";
    case Termination::MaxIters: return "max_iters";
    case Termination::Diverged: return "diverged";
    case Termination::RiccatiFailure: return "riccati_failure";
    case Termination::LineSearchFailure: return "line_search_failure";
  }
  return "?";
}

}  // namespace ocpshoot
