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

#include <random>

#include <gtest/gtest.h>

#include "ocpshoot/ocpshoot.hpp"
#include "support/oracles.hpp"

namespace ocpshoot {
namespace {

TEST(Registry, ChenDefaults) {
  const OcpProblem p = registry_get("chen1998");
  EXPECT_EQ(p.dims.N, 20);
  EXPECT_EQ(p.dims.nx, 2);
  EXPECT_EQ(p.dims.nu, 1);
  EXPECT_EQ(p.x0_bar, Eigen::Vector2d(0.42, 0.45));
  EXPECT_EQ(p.name, "chen1998");
  EXPECT_EQ(p.stage_costs.size(), 20u);
}

TEST(Registry, ChenWeights) {
  const OcpProblem p = registry_get("chen1998");
  const MatrixXd H = cost_ggn_hessian(p.stage_costs[0], VectorXd::Zero(3));
  MatrixXd expected = MatrixXd::Zero(3, 3);
  expected.diagonal() << 0.5, 0.5, 0.8;
  EXPECT_EQ(H, expected);
  EXPECT_EQ(cost_ggn_hessian(p.terminal_cost, VectorXd::Zero(2)),
            MatrixXd(Eigen::Vector2d(10.0, 10.0).asDiagonal()));
  // tau * 2 on the active side
  VectorXd z = VectorXd::Zero(3);
  z[2] = -2.0;
  EXPECT_DOUBLE_EQ(cost_ggn_hessian(p.stage_costs[0], z)(2, 2), 0.8 + 200.0);
}

TEST(Registry, Overrides) {
  ProblemOptions opts;
  opts.horizon = 7;
  opts.x0 = Eigen::Vector2d(0.1, -0.2);
  opts.cost_scale = 3.0;
  const OcpProblem p = registry_get("chen1998", opts);
  EXPECT_EQ(p.dims.N, 7);
  EXPECT_EQ(p.x0_bar, Eigen::Vector2d(0.1, -0.2));
  const VectorXd z = Eigen::Vector3d(0.3, 0.1, 1.4);
  EXPECT_DOUBLE_EQ(cost_value(p.stage_costs[0], z),
                   3.0 * cost_value(registry_get("chen1998").stage_costs[0], z));
  opts.horizon = 0;
  EXPECT_THROW(registry_get("chen1998", opts), ConfigurationError);
}

TEST(Registry, LtiToyIsLinearSoCurvatureVanishes) {
  ProblemOptions opts;
  opts.nx = 1;
  opts.nu = 1;
  const OcpProblem p = registry_get("lti-toy", opts);
  EXPECT_EQ(p.dims.nx, 1);
  EXPECT_EQ(p.dims.nu, 1);
  const MatrixXd H =
      p.dynamics.hess_contraction(0, VectorXd::Ones(1), VectorXd::Ones(1), VectorXd::Ones(1));
  EXPECT_EQ(H, MatrixXd::Zero(2, 2));
}

TEST(Registry, UnknownNameListsRegistered) {
  try {
    registry_get("no-such");
    FAIL() << "expected LookupError";
  } catch (const LookupError& e) {
    const std::string msg = e.what();
    for (const auto& name : registry_names()) EXPECT_NE(msg.find(name), std::string::npos);
  }
}

// Jacobians of every registered problem against central differences of eval.
TEST(Registry, JacobiansMatchFiniteDifferences) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (const auto& name : registry_names()) {
    const OcpProblem p = registry_get(name);
    const int nx = p.dims.nx, nu = p.dims.nu;
    for (int trial = 0; trial < 100; ++trial) {
      VectorXd x(nx), u(nu);
      for (int j = 0; j < nx; ++j) x[j] = uni(rng);
      for (int j = 0; j < nu; ++j) u[j] = 2.0 * uni(rng);
      const int i = trial % p.dims.N;
      const MatrixXd fdA = testing::fd_jacobian(
          [&](const VectorXd& xx) { return p.dynamics.eval(i, xx, u); }, x, 1e-6);
      const MatrixXd fdB = testing::fd_jacobian(
          [&](const VectorXd& uu) { return p.dynamics.eval(i, x, uu); }, u, 1e-6);
      EXPECT_LE(testing::relative_error(p.dynamics.jac_x(i, x, u), fdA), 1e-6) << name;
      EXPECT_LE(testing::relative_error(p.dynamics.jac_u(i, x, u), fdB), 1e-6) << name;
    }
  }
}

TEST(Registry, ChenCurvatureMatchesSecondDifferences) {
  const OcpProblem p = registry_get("chen1998");
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const VectorXd z = Eigen::Vector3d(0.6 * uni(rng), 0.6 * uni(rng), 1.5 * uni(rng));
    const VectorXd lambda = Eigen::Vector2d(uni(rng), uni(rng));
    const MatrixXd H = p.dynamics.hess_contraction(0, z.head(2), z.tail(1), lambda);
    EXPECT_LE((H - H.transpose()).cwiseAbs().maxCoeff(), 1e-14);
    // second differences of the scalar lambda^T f(z), eval only
    auto g = [&](const VectorXd& zz) { return lambda.dot(p.dynamics.eval(0, zz.head(2), zz.tail(1))); };
    const double h = 1e-4;
    MatrixXd fd(3, 3);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        VectorXd pp = z, pm = z, mp = z, mm = z;
        pp[a] += h; pp[b] += h;
        pm[a] += h; pm[b] -= h;
        mp[a] -= h; mp[b] += h;
        mm[a] -= h; mm[b] -= h;
        fd(a, b) = (g(pp) - g(pm) - g(mp) + g(mm)) / (4 * h * h);
      }
    }
    EXPECT_LE((H - fd).cwiseAbs().maxCoeff(), 1e-5);
  }
}

}  // namespace
}  // namespace ocpshoot
