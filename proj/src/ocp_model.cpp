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

#include "ocpshoot/ocp_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ocpshoot {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

MatrixXd symmetrized(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

void check_size(const VectorXd& v, int n, const char* what, int index) {
  if (v.size() != n) {
    std::ostringstream msg;
    msg << what << "[" << index << "] has size " << v.size() << ", expected " << n;
    throw ConfigurationError(msg.str());
  }
  if (!v.allFinite()) {
    throw ConfigurationError(std::string(what) + "[" + std::to_string(index) + "] is not finite");
  }
}

}  // namespace

void Dims::validate() const {
  if (N < 1 || nx < 1 || nu < 1) {
    std::ostringstream msg;
    msg << "invalid dimensions N=" << N << " nx=" << nx << " nu=" << nu
        << " (all must be >= 1)";
    throw ConfigurationError(msg.str());
  }
}

double cost_value(const CostTerm& cost, const VectorXd& z) {
  return std::visit(
      overloaded{
          [&](const SmoothConvexCost& c) { return c.value(z); },
          [&](const ConvexOverNonlinearCost& c) {
            return c.outer_value(c.residual(z));
          },
      },
      cost);
}

VectorXd cost_gradient(const CostTerm& cost, const VectorXd& z) {
  return std::visit(
      overloaded{
          [&](const SmoothConvexCost& c) -> VectorXd { return c.gradient(z); },
          [&](const ConvexOverNonlinearCost& c) -> VectorXd {
            const VectorXd r = c.residual(z);
            return c.residual_jacobian(z).transpose() * c.outer_gradient(r);
          },
      },
      cost);
}

MatrixXd cost_ggn_hessian(const CostTerm& cost, const VectorXd& z) {
  return std::visit(
      overloaded{
          [&](const SmoothConvexCost& c) -> MatrixXd { return c.hessian(z); },
          [&](const ConvexOverNonlinearCost& c) -> MatrixXd {
            const VectorXd r = c.residual(z);
            const MatrixXd J = c.residual_jacobian(z);
            return J.transpose() * c.outer_hessian(r) * J;
          },
      },
      cost);
}

MatrixXd cost_curvature_correction(const CostTerm& cost, const VectorXd& z) {
  return std::visit(
      overloaded{
          [&](const SmoothConvexCost&) -> MatrixXd {
            return MatrixXd::Zero(z.size(), z.size());
          },
          [&](const ConvexOverNonlinearCost& c) -> MatrixXd {
            if (!c.residual_curvature) return MatrixXd::Zero(z.size(), z.size());
            const VectorXd weights = c.outer_gradient(c.residual(z));
            return symmetrized(c.residual_curvature(z, weights));
          },
      },
      cost);
}

void OcpProblem::validate() const {
  dims.validate();
  if (static_cast<int>(stage_costs.size()) != dims.N) {
    std::ostringstream msg;
    msg << "problem '" << name << "' has " << stage_costs.size()
        << " stage costs, expected N=" << dims.N;
    throw ConfigurationError(msg.str());
  }
  if (x0_bar.size() != dims.nx) {
    throw ConfigurationError("x0_bar has wrong dimension");
  }
  if (!x0_bar.allFinite()) {
    throw ConfigurationError("x0_bar is not finite");
  }
  if (!dynamics.eval || !dynamics.linearize) {
    throw ConfigurationError("dynamics must provide eval and linearize");
  }
}

Iterate Iterate::zeros(const Dims& dims, bool with_duals) {
  Iterate it;
  it.x.assign(dims.N + 1, VectorXd::Zero(dims.nx));
  it.u.assign(dims.N, VectorXd::Zero(dims.nu));
  if (with_duals) it.lambda = Trajectory(dims.N + 1, VectorXd::Zero(dims.nx));
  return it;
}

void Iterate::validate(const Dims& dims) const {
  if (static_cast<int>(x.size()) != dims.N + 1 ||
      static_cast<int>(u.size()) != dims.N) {
    std::ostringstream msg;
    msg << "iterate has " << x.size() << " states and " << u.size()
        << " controls, expected " << dims.N + 1 << " and " << dims.N;
    throw ConfigurationError(msg.str());
  }
  for (int i = 0; i <= dims.N; ++i) check_size(x[i], dims.nx, "x", i);
  for (int i = 0; i < dims.N; ++i) check_size(u[i], dims.nu, "u", i);
  if (lambda) {
    if (static_cast<int>(lambda->size()) != dims.N + 1) {
      throw ConfigurationError("iterate duals must have N+1 entries");
    }
    for (int i = 0; i <= dims.N; ++i) check_size((*lambda)[i], dims.nx, "lambda", i);
  }
}

VectorXd stack_primal(const Iterate& it) {
  const int N = static_cast<int>(it.u.size());
  const int nx = static_cast<int>(it.x.front().size());
  const int nu = N > 0 ? static_cast<int>(it.u.front().size()) : 0;
  VectorXd w(N * (nx + nu) + nx);
  for (int i = 0; i < N; ++i) {
    w.segment(i * (nx + nu), nx) = it.x[i];
    w.segment(i * (nx + nu) + nx, nu) = it.u[i];
  }
  w.tail(nx) = it.x[N];
  return w;
}

double primal_distance(const Iterate& a, const Iterate& b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.x.size(); ++i) sq += (a.x[i] - b.x[i]).squaredNorm();
  for (std::size_t i = 0; i < a.u.size(); ++i) sq += (a.u[i] - b.u[i]).squaredNorm();
  return std::sqrt(sq);
}

VectorXd stack_controls(const Trajectory& u) {
  const int nu = u.empty() ? 0 : static_cast<int>(u.front().size());
  VectorXd flat(static_cast<int>(u.size()) * nu);
  for (std::size_t i = 0; i < u.size(); ++i) flat.segment(i * nu, nu) = u[i];
  return flat;
}

Trajectory unstack_controls(const VectorXd& flat, int nu) {
  Trajectory u(flat.size() / nu);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = flat.segment(i * nu, nu);
  return u;
}

VectorXd rk4_step(const VectorField& f, const VectorXd& x, const VectorXd& u,
                  double h_total, int n_steps) {
  if (n_steps < 1 || !(h_total > 0.0)) {
    throw ConfigurationError("rk4_step requires n_steps >= 1 and h_total > 0");
  }
  const double h = h_total / n_steps;
  VectorXd s = x;
  for (int k = 0; k < n_steps; ++k) {
    const VectorXd k1 = f(s, u);
    const VectorXd k2 = f(s + 0.5 * h * k1, u);
    const VectorXd k3 = f(s + 0.5 * h * k2, u);
    const VectorXd k4 = f(s + h * k3, u);
    s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!s.allFinite()) {
      throw IntegrationError(k, "RK4 integration blew up at sub-step " +
                                    std::to_string(k));
    }
  }
  return s;
}

DynamicsLinearization rk4_step_with_sensitivities(const ContinuousSystem& sys,
                                                  const VectorXd& x,
                                                  const VectorXd& u,
                                                  double h_total, int n_steps) {
  if (n_steps < 1 || !(h_total > 0.0)) {
    throw ConfigurationError("rk4_step requires n_steps >= 1 and h_total > 0");
  }
  const int nx = static_cast<int>(x.size());
  const int nu = static_cast<int>(u.size());
  const double h = h_total / n_steps;

  // S = d(state)/d(x, u), nx x (nx + nu); the control block of the seed is
  // constant because u is held over the whole interval.
  MatrixXd S(nx, nx + nu);
  S << MatrixXd::Identity(nx, nx), MatrixXd::Zero(nx, nu);
  MatrixXd seed_u(nu, nx + nu);
  seed_u << MatrixXd::Zero(nu, nx), MatrixXd::Identity(nu, nu);

  auto stage = [&](const VectorXd& s, const MatrixXd& dS, VectorXd& k, MatrixXd& dk) {
    k = sys.f(s, u);
    dk = sys.f_x(s, u) * dS + sys.f_u(s, u) * seed_u;
  };

  VectorXd s = x;
  VectorXd k1, k2, k3, k4;
  MatrixXd d1, d2, d3, d4;
  for (int step = 0; step < n_steps; ++step) {
    stage(s, S, k1, d1);
    stage(s + 0.5 * h * k1, S + 0.5 * h * d1, k2, d2);
    stage(s + 0.5 * h * k2, S + 0.5 * h * d2, k3, d3);
    stage(s + h * k3, S + h * d3, k4, d4);
    s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    S += (h / 6.0) * (d1 + 2.0 * d2 + 2.0 * d3 + d4);
    if (!s.allFinite() || !S.allFinite()) {
      throw IntegrationError(step, "RK4 integration blew up at sub-step " +
                                       std::to_string(step));
    }
  }
  return {s, S.leftCols(nx), S.rightCols(nu)};
}

FeasibilityResidual dynamics_feasibility_residual(const OcpProblem& problem,
                                                  const Iterate& it) {
  const Dims& d = problem.dims;
  it.validate(d);
  FeasibilityResidual res;
  res.rows.reserve(d.N + 1);
  res.rows.push_back(problem.x0_bar - it.x[0]);
  for (int i = 0; i < d.N; ++i) {
    res.rows.push_back(problem.dynamics.eval(i, it.x[i], it.u[i]) - it.x[i + 1]);
  }
  for (const auto& row : res.rows) {
    res.max_abs = std::max(res.max_abs, row.lpNorm<Eigen::Infinity>());
    if (!row.allFinite()) res.max_abs = std::numeric_limits<double>::infinity();
  }
  return res;
}

Trajectory rollout(const OcpProblem& problem, const VectorXd& x0,
                   const Trajectory& u) {
  Trajectory x;
  x.reserve(u.size() + 1);
  x.push_back(x0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    x.push_back(problem.dynamics.eval(static_cast<int>(i), x[i], u[i]));
  }
  return x;
}

Iterate feasible_iterate(const OcpProblem& problem, const Trajectory& u) {
  Iterate it;
  it.u = u;
  it.x = rollout(problem, problem.x0_bar, u);
  return it;
}

double eval_objective(const OcpProblem& problem, const Trajectory& x,
                      const Trajectory& u) {
  const int N = problem.dims.N;
  double total = 0.0;
  for (int i = 0; i < N; ++i) {
    total += cost_value(problem.stage_costs[i], stage_point(x[i], u[i]));
  }
  return total + cost_value(problem.terminal_cost, x[N]);
}

VectorXd stage_point(const VectorXd& x, const VectorXd& u) {
  VectorXd z(x.size() + u.size());
  z << x, u;
  return z;
}

}  // namespace ocpshoot
