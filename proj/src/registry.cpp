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

#include "ocpshoot/registry.hpp"

#include <sstream>

namespace ocpshoot {

namespace {

SmoothConvexCost quadratic_cost(MatrixXd H) {
  SmoothConvexCost c;
  c.value = [H](const VectorXd& z) { return 0.5 * z.dot(H * z); };
  c.gradient = [H](const VectorXd& z) -> VectorXd { return H * z; };
  c.hessian = [H](const VectorXd&) -> MatrixXd { return H; };
  return c;
}

}  // namespace

double input_penalty(const VectorXd& u, double u_max) {
  double total = 0.0;
  for (int j = 0; j < u.size(); ++j) {
    const double hi = std::max(0.0, u[j] - u_max);
    const double lo = std::min(0.0, u[j] + u_max);
    total += hi * hi + lo * lo;
  }
  return total;
}

VectorXd input_penalty_gradient(const VectorXd& u, double u_max) {
  VectorXd g(u.size());
  for (int j = 0; j < u.size(); ++j) {
    g[j] = 2.0 * std::max(0.0, u[j] - u_max) + 2.0 * std::min(0.0, u[j] + u_max);
  }
  return g;
}

MatrixXd input_penalty_hessian(const VectorXd& u, double u_max) {
  MatrixXd H = MatrixXd::Zero(u.size(), u.size());
  for (int j = 0; j < u.size(); ++j) {
    if (u[j] > u_max || u[j] < -u_max) H(j, j) = 2.0;
  }
  return H;
}

ContinuousSystem chen1998_vector_field(double mu) {
  ContinuousSystem sys;
  sys.f = [mu](const VectorXd& x, const VectorXd& u) -> VectorXd {
    VectorXd dx(2);
    dx[0] = x[1] + u[0] * (mu + (1.0 - mu) * x[0]);
    dx[1] = x[0] + u[0] * (mu - 4.0 * (1.0 - mu) * x[1]);
    return dx;
  };
  sys.f_x = [mu](const VectorXd&, const VectorXd& u) -> MatrixXd {
    MatrixXd J(2, 2);
    J << u[0] * (1.0 - mu), 1.0,
         1.0, -4.0 * u[0] * (1.0 - mu);
    return J;
  };
  sys.f_u = [mu](const VectorXd& x, const VectorXd&) -> MatrixXd {
    MatrixXd J(2, 1);
    J << mu + (1.0 - mu) * x[0],
         mu - 4.0 * (1.0 - mu) * x[1];
    return J;
  };
  return sys;
}

OcpProblem make_chen1998(const Chen1998Params& prm) {
  OcpProblem problem;
  problem.name = "chen1998";
  problem.dims = {prm.N, 2, 1};
  problem.x0_bar = prm.x0;

  const ContinuousSystem sys = chen1998_vector_field(prm.mu);
  const double h = prm.h;
  const int steps = prm.rk4_steps;
  problem.dynamics.eval = [sys, h, steps](int, const VectorXd& x, const VectorXd& u) {
    return rk4_step(sys.f, x, u, h, steps);
  };
  problem.dynamics.linearize = [sys, h, steps](int, const VectorXd& x,
                                               const VectorXd& u) {
    return rk4_step_with_sensitivities(sys, x, u, h, steps);
  };
  // Second-order sensitivities by central differences of the exact first-order
  // ones: column j of the Hessian is d/dz_j of [A B]^T lambda.
  const double fd = prm.hess_fd_step;
  problem.dynamics.hess_contraction = [sys, h, steps, fd](
                                          int, const VectorXd& x, const VectorXd& u,
                                          const VectorXd& lambda) -> MatrixXd {
    const int nx = static_cast<int>(x.size());
    const int nz = nx + static_cast<int>(u.size());
    auto grad = [&](const VectorXd& z) -> VectorXd {
      const auto lin = rk4_step_with_sensitivities(sys, z.head(nx), z.tail(nz - nx), h, steps);
      VectorXd g(nz);
      g << lin.A.transpose() * lambda, lin.B.transpose() * lambda;
      return g;
    };
    const VectorXd z = stage_point(x, u);
    MatrixXd H(nz, nz);
    for (int j = 0; j < nz; ++j) {
      VectorXd zp = z, zm = z;
      zp[j] += fd;
      zm[j] -= fd;
      H.col(j) = (grad(zp) - grad(zm)) / (2.0 * fd);
    }
    return 0.5 * (H + H.transpose());
  };

  const double s = prm.cost_scale;
  const Eigen::Matrix2d Q = prm.Q;
  const double R = prm.R, tau = prm.tau, u_max = prm.u_max;
  SmoothConvexCost stage;
  stage.value = [=](const VectorXd& z) {
    const VectorXd x = z.head(2), u = z.tail(1);
    return s * (0.5 * x.dot(Q * x) + 0.5 * R * u.squaredNorm() +
                tau * input_penalty(u, u_max));
  };
  stage.gradient = [=](const VectorXd& z) -> VectorXd {
    const VectorXd x = z.head(2), u = z.tail(1);
    VectorXd g(3);
    g << Q * x, R * u + tau * input_penalty_gradient(u, u_max);
    return s * g;
  };
  stage.hessian = [=](const VectorXd& z) -> MatrixXd {
    MatrixXd H = MatrixXd::Zero(3, 3);
    H.topLeftCorner(2, 2) = Q;
    H.bottomRightCorner(1, 1) =
        R * MatrixXd::Identity(1, 1) + tau * input_penalty_hessian(z.tail(1), u_max);
    return s * H;
  };
  problem.stage_costs.assign(prm.N, stage);
  problem.terminal_cost = quadratic_cost(s * MatrixXd(prm.P));
  return problem;
}

LtiSpec default_lti_spec(int nx, int nu, int N) {
  LtiSpec spec;
  spec.A = MatrixXd::Identity(nx, nx);
  for (int j = 0; j + 1 < nx; ++j) spec.A(j, j + 1) = 0.1;
  // Actuate the end of the integrator chain first.
  spec.B = MatrixXd::Zero(nx, nu);
  for (int k = 0; k < nu; ++k) spec.B(nx - 1 - (k % nx), k) = 0.5;
  spec.Q = MatrixXd::Identity(nx, nx);
  spec.R = MatrixXd::Identity(nu, nu);
  spec.P = 10.0 * MatrixXd::Identity(nx, nx);
  spec.x0 = VectorXd::Ones(nx);
  spec.N = N;
  return spec;
}

OcpProblem make_lti_problem(const LtiSpec& spec) {
  const int nx = static_cast<int>(spec.A.rows());
  const int nu = static_cast<int>(spec.B.cols());
  OcpProblem problem;
  problem.name = "lti-toy";
  problem.dims = {spec.N, nx, nu};
  problem.dims.validate();
  if (spec.A.cols() != nx || spec.B.rows() != nx || spec.Q.rows() != nx ||
      spec.Q.cols() != nx || spec.R.rows() != nu || spec.R.cols() != nu ||
      spec.P.rows() != nx || spec.P.cols() != nx || spec.x0.size() != nx) {
    throw ConfigurationError("inconsistent matrix sizes in linear problem spec");
  }
  problem.x0_bar = spec.x0;

  const MatrixXd A = spec.A, B = spec.B;
  problem.dynamics.eval = [A, B](int, const VectorXd& x, const VectorXd& u) -> VectorXd {
    return A * x + B * u;
  };
  problem.dynamics.linearize = [A, B](int, const VectorXd& x, const VectorXd& u) {
    return DynamicsLinearization{A * x + B * u, A, B};
  };
  problem.dynamics.hess_contraction = [nx, nu](int, const VectorXd&, const VectorXd&,
                                               const VectorXd&) -> MatrixXd {
    return MatrixXd::Zero(nx + nu, nx + nu);
  };

  MatrixXd H = MatrixXd::Zero(nx + nu, nx + nu);
  H.topLeftCorner(nx, nx) = spec.Q;
  H.bottomRightCorner(nu, nu) = spec.R;
  problem.stage_costs.assign(spec.N, quadratic_cost(spec.cost_scale * H));
  problem.terminal_cost = quadratic_cost(spec.cost_scale * spec.P);
  return problem;
}

std::vector<std::string> registry_names() { return {"chen1998", "lti-toy"}; }

OcpProblem registry_get(const std::string& name, const ProblemOptions& options) {
  if (!(options.cost_scale > 0.0)) {
    throw ConfigurationError("cost_scale must be positive");
  }
  if (name == "chen1998") {
    if ((options.nx && *options.nx != 2) || (options.nu && *options.nu != 1)) {
      throw ConfigurationError("chen1998 has fixed dimensions nx=2, nu=1");
    }
    Chen1998Params prm;
    if (options.horizon) prm.N = *options.horizon;
    if (options.x0) {
      if (options.x0->size() != 2) throw ConfigurationError("chen1998 needs a 2-vector x0");
      prm.x0 = *options.x0;
    }
    prm.cost_scale = options.cost_scale;
    if (prm.N < 1) throw ConfigurationError("horizon must be >= 1");
    return make_chen1998(prm);
  }
  if (name == "lti-toy") {
    const Dims dims{options.horizon.value_or(10), options.nx.value_or(2),
                    options.nu.value_or(1)};
    dims.validate();
    LtiSpec spec = default_lti_spec(dims.nx, dims.nu, dims.N);
    if (options.x0) spec.x0 = *options.x0;
    spec.cost_scale = options.cost_scale;
    return make_lti_problem(spec);
  }
  std::ostringstream msg;
  msg << "unknown problem '" << name << "'; registered problems:";
  for (const auto& n : registry_names()) msg << " " << n;
  throw LookupError(msg.str());
}

}  // namespace ocpshoot
