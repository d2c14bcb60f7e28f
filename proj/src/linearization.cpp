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

#include "ocpshoot/linearization.hpp"

#include <algorithm>
#include <string>

namespace ocpshoot {

namespace {

MatrixXd symmetrized(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

StageQp linearize_stage(const OcpProblem& problem, int i, const VectorXd& xbar,
                        const VectorXd& ubar, HessianMode mode,
                        const VectorXd* lambda_next) {
  const int nx = problem.dims.nx;
  const int nu = problem.dims.nu;

  StageQp st;
  DynamicsLinearization lin = problem.dynamics.linearize(i, xbar, ubar);
  st.A = std::move(lin.A);
  st.B = std::move(lin.B);
  st.f_bar = std::move(lin.f);
  st.a = st.f_bar - st.A * xbar - st.B * ubar;

  const VectorXd z = stage_point(xbar, ubar);
  const CostTerm& cost = problem.stage_costs[i];
  MatrixXd H = cost_ggn_hessian(cost, z);
  if (mode == HessianMode::ExactHessian) {
    if (lambda_next == nullptr) {
      throw ConfigurationError("exact Hessian requires duals (stage " +
                               std::to_string(i) + ")");
    }
    if (!problem.dynamics.has_hess_contraction()) {
      throw ConfigurationError("exact Hessian requires dynamics.hess_contraction");
    }
    H += cost_curvature_correction(cost, z);
    H += problem.dynamics.hess_contraction(i, xbar, ubar, *lambda_next);
  }
  H = symmetrized(H);
  st.Q = H.topLeftCorner(nx, nx);
  st.S = H.bottomLeftCorner(nu, nx);
  st.R = H.bottomRightCorner(nu, nu);

  const VectorXd g = cost_gradient(cost, z);
  st.q = g.head(nx) - st.Q * xbar - st.S.transpose() * ubar;
  st.r = g.tail(nu) - st.S * xbar - st.R * ubar;
  return st;
}

void linearize_terminal(const OcpProblem& problem, const VectorXd& xbar_N,
                        MatrixXd& P_N, VectorXd& p_N) {
  P_N = symmetrized(cost_ggn_hessian(problem.terminal_cost, xbar_N));
  p_N = cost_gradient(problem.terminal_cost, xbar_N) - P_N * xbar_N;
}

QpData build_qp_data(const OcpProblem& problem, const Iterate& it, HessianMode mode) {
  const Dims& d = problem.dims;
  it.validate(d);
  if (mode == HessianMode::ExactHessian && !it.lambda) {
    throw ConfigurationError("exact Hessian requires an iterate with duals");
  }
  QpData qp;
  qp.x0_bar = problem.x0_bar;
  qp.stages.reserve(d.N);
  for (int i = 0; i < d.N; ++i) {
    const VectorXd* lambda_next =
        mode == HessianMode::ExactHessian ? &(*it.lambda)[i + 1] : nullptr;
    qp.stages.push_back(linearize_stage(problem, i, it.x[i], it.u[i], mode, lambda_next));
  }
  linearize_terminal(problem, it.x[d.N], qp.P_N, qp.p_N);
  return qp;
}

double qp_objective(const QpData& qp, const Trajectory& x, const Trajectory& u) {
  double total = 0.0;
  for (int i = 0; i < qp.horizon(); ++i) {
    const StageQp& st = qp.stages[i];
    total += st.q.dot(x[i]) + st.r.dot(u[i]) + 0.5 * x[i].dot(st.Q * x[i]) +
             u[i].dot(st.S * x[i]) + 0.5 * u[i].dot(st.R * u[i]);
  }
  const VectorXd& xN = x[qp.horizon()];
  return total + qp.p_N.dot(xN) + 0.5 * xN.dot(qp.P_N * xN);
}

GradientConsistencyReport qp_gradient_consistency_check(const OcpProblem& problem,
                                                        const Iterate& it,
                                                        HessianMode mode) {
  const QpData qp = build_qp_data(problem, it, mode);
  const Dims& d = problem.dims;
  GradientConsistencyReport report;
  auto record = [&](double dev, int stage) {
    if (dev > report.max_deviation || report.worst_stage < 0) {
      report.max_deviation = std::max(report.max_deviation, dev);
      report.worst_stage = stage;
    }
  };
  for (int i = 0; i < d.N; ++i) {
    const StageQp& st = qp.stages[i];
    const VectorXd g = cost_gradient(problem.stage_costs[i], stage_point(it.x[i], it.u[i]));
    const VectorXd gx = st.q + st.Q * it.x[i] + st.S.transpose() * it.u[i];
    const VectorXd gu = st.r + st.S * it.x[i] + st.R * it.u[i];
    record(std::max((gx - g.head(d.nx)).lpNorm<Eigen::Infinity>(),
                    (gu - g.tail(d.nu)).lpNorm<Eigen::Infinity>()),
           i);
  }
  const VectorXd gN = cost_gradient(problem.terminal_cost, it.x[d.N]);
  record((qp.p_N + qp.P_N * it.x[d.N] - gN).lpNorm<Eigen::Infinity>(), d.N);
  return report;
}

}  // namespace ocpshoot
