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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ocpshoot/ocpshoot.hpp"
#include "support/oracles.hpp"
#include "support/random_problems.hpp"

namespace ocpshoot {
namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

const VectorField kExpGrowth = [](const VectorXd& x, const VectorXd&) -> VectorXd { return x; };

TEST(Rk4, ZeroFieldKeepsState) {
  const VectorField zero = [](const VectorXd& x, const VectorXd&) -> VectorXd {
    return VectorXd::Zero(x.size());
  };
  const VectorXd x = vec({0.3, -0.1});
  EXPECT_EQ(rk4_step(zero, x, vec({7.0}), 0.25, 10), x);
}

TEST(Rk4, ExponentialMatchesClosedForm) {
  const double got = rk4_step(kExpGrowth, vec({1.0}), vec({0.0}), 0.25, 10)[0];
  // one classical RK4 step on x' = x multiplies by the degree-4 Taylor polynomial
  const double h = 0.025;
  const double per_step = 1.0 + h + h * h / 2.0 + h * h * h / 6.0 + h * h * h * h / 24.0;
  EXPECT_NEAR(got, std::pow(per_step, 10), 1e-14);
  EXPECT_NEAR(got, std::exp(0.25), 2e-9);
}

TEST(Rk4, ChenEquilibrium) {
  const ContinuousSystem sys = chen1998_vector_field(0.7);
  const VectorXd next = rk4_step(sys.f, vec({0.0, 0.0}), vec({0.0}), 0.25, 10);
  EXPECT_EQ(next, vec({0.0, 0.0}));
}

TEST(Rk4, FourthOrderConvergence) {
  auto err = [](int n) {
    return std::abs(rk4_step(kExpGrowth, vec({1.0}), vec({0.0}), 0.25, n)[0] - std::exp(0.25));
  };
  const double e5 = err(5), e10 = err(10), e20 = err(20);
  // halving the sub-step divides the error by 2^4 = 16, within a factor 2
  EXPECT_GE(e5 / e10, 8.0);
  EXPECT_LE(e5 / e10, 32.0);
  EXPECT_GE(e10 / e20, 8.0);
  EXPECT_LE(e10 / e20, 32.0);
}

TEST(Rk4, BlowupNamesSubstep) {
  const VectorField quadratic = [](const VectorXd& x, const VectorXd&) -> VectorXd {
    return x.cwiseProduct(x);
  };
  try {
    rk4_step(quadratic, vec({1e200}), vec({0.0}), 1.0, 4);
    FAIL() << "expected IntegrationError";
  } catch (const IntegrationError& e) {
    EXPECT_EQ(e.substep(), 0);
  }
}

TEST(Rk4, RejectsBadArguments) {
  EXPECT_THROW(rk4_step(kExpGrowth, vec({1.0}), vec({0.0}), 0.25, 0), ConfigurationError);
  EXPECT_THROW(rk4_step(kExpGrowth, vec({1.0}), vec({0.0}), -1.0, 2), ConfigurationError);
}

TEST(Rk4, SensitivitiesMatchFiniteDifferences) {
  const ContinuousSystem sys = chen1998_vector_field(0.7);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const VectorXd x = vec({uni(rng), uni(rng)});
    const VectorXd u = vec({2.0 * uni(rng)});
    const DynamicsLinearization lin = rk4_step_with_sensitivities(sys, x, u, 0.25, 10);
    EXPECT_EQ(lin.f, rk4_step(sys.f, x, u, 0.25, 10));
    const MatrixXd fdA = testing::fd_jacobian(
        [&](const VectorXd& xx) { return rk4_step(sys.f, xx, u, 0.25, 10); }, x, 1e-6);
    const MatrixXd fdB = testing::fd_jacobian(
        [&](const VectorXd& uu) { return rk4_step(sys.f, x, uu, 0.25, 10); }, u, 1e-6);
    EXPECT_LE(testing::relative_error(lin.A, fdA), 1e-6);
    EXPECT_LE(testing::relative_error(lin.B, fdB), 1e-6);
  }
}

TEST(Feasibility, RolloutIsExactlyFeasible) {
  const OcpProblem p = registry_get("chen1998");
  Trajectory u(p.dims.N, vec({-0.3}));
  for (int i = 0; i < p.dims.N; ++i) u[i][0] += 0.01 * i;
  const Iterate it = feasible_iterate(p, u);
  const auto res = dynamics_feasibility_residual(p, it);
  EXPECT_EQ(res.max_abs, 0.0);
  ASSERT_EQ(res.rows.size(), static_cast<std::size_t>(p.dims.N + 1));
}

TEST(Feasibility, InitialStateOffsetShowsInRowZeroOnly) {
  const OcpProblem p = registry_get("lti-toy");
  Iterate it = feasible_iterate(p, Trajectory(p.dims.N, vec({0.2})));
  // shift x_0 and keep the remaining states consistent with the shifted start
  it.x[0] += vec({1.0, 0.0});
  for (int i = 0; i < p.dims.N; ++i) it.x[i + 1] = p.dynamics.eval(i, it.x[i], it.u[i]);
  const auto res = dynamics_feasibility_residual(p, it);
  EXPECT_DOUBLE_EQ(res.max_abs, 1.0);
  EXPECT_EQ(res.rows[0], vec({-1.0, 0.0}));
  for (std::size_t i = 1; i < res.rows.size(); ++i) EXPECT_EQ(res.rows[i].norm(), 0.0);
}

TEST(Objective, ZeroTrajectoryCostsNothing) {
  const OcpProblem p = registry_get("chen1998");
  const Iterate z = Iterate::zeros(p.dims);
  EXPECT_EQ(eval_objective(p, z.x, z.u), 0.0);
}

TEST(Objective, PenaltyInactiveInsideBounds) {
  const OcpProblem p = registry_get("chen1998");
  const Iterate it = feasible_iterate(p, Trajectory(p.dims.N, vec({0.5})));
  double quadratic = 0.5 * it.x[p.dims.N].dot(10.0 * it.x[p.dims.N]);
  for (int i = 0; i < p.dims.N; ++i) {
    quadratic += 0.5 * 0.5 * it.x[i].squaredNorm() + 0.5 * 0.8 * 0.25;
  }
  EXPECT_NEAR(eval_objective(p, it.x, it.u), quadratic, 1e-12 * quadratic);
  EXPECT_EQ(input_penalty(vec({0.5}), 1.0), 0.0);
}

TEST(Objective, SingleStageWithActivePenalty) {
  const OcpProblem p = registry_get("chen1998");
  const double expected = 0.5 * 0.8 * 1.5 * 1.5 + 100.0 * (1.5 - 1.0) * (1.5 - 1.0);
  EXPECT_NEAR(cost_value(p.stage_costs[0], vec({0.0, 0.0, 1.5})), expected, 1e-12);
  EXPECT_NEAR(expected, 25.9, 1e-12);
}

TEST(Objective, PenaltyKinkCountsAsInactive) {
  EXPECT_EQ(input_penalty_hessian(vec({1.0}), 1.0)(0, 0), 0.0);
  EXPECT_EQ(input_penalty_hessian(vec({-1.0}), 1.0)(0, 0), 0.0);
  EXPECT_EQ(input_penalty_hessian(vec({1.0 + 1e-12}), 1.0)(0, 0), 2.0);
  EXPECT_EQ(input_penalty_hessian(vec({-1.5}), 1.0)(0, 0), 2.0);
  EXPECT_EQ(input_penalty_gradient(vec({-1.5}), 1.0)[0], -1.0);
}

TEST(Objective, ChenStageHessiansArePsd) {
  const OcpProblem p = registry_get("chen1998");
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const VectorXd z = vec({uni(rng), uni(rng), uni(rng)});
    const MatrixXd H = cost_ggn_hessian(p.stage_costs[trial % p.dims.N], z);
    EXPECT_LE((H - H.transpose()).norm(), 0.0);
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<MatrixXd>(H).eigenvalues().minCoeff(), -1e-12);
  }
}

TEST(CostTerms, LeastSquaresGgnAndCorrection) {
  std::mt19937_64 rng(3);
  const OcpProblem p = testing::random_least_squares_problem(rng, 3, 2, 1);
  const VectorXd z = vec({0.4, -0.7, 1.1});
  const auto& cost = p.stage_costs[0];
  const MatrixXd fd_grad = testing::fd_jacobian(
      [&](const VectorXd& zz) { return vec({cost_value(cost, zz)}); }, z, 1e-6);
  EXPECT_LE((cost_gradient(cost, z).transpose() - fd_grad).cwiseAbs().maxCoeff(), 1e-8);
  const MatrixXd exact = testing::fd_jacobian(
      [&](const VectorXd& zz) { return cost_gradient(cost, zz); }, z, 1e-6);
  const MatrixXd ggn = cost_ggn_hessian(cost, z);
  const MatrixXd J = (1.0 + 0.2 * z.array().cos()).matrix().asDiagonal();
  EXPECT_LE((ggn - J.transpose() * J).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((ggn + cost_curvature_correction(cost, z) - exact).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Validation, DimsMustBePositive) {
  EXPECT_THROW((Dims{0, 1, 1}.validate()), ConfigurationError);
  EXPECT_THROW((Dims{1, 0, 1}.validate()), ConfigurationError);
  EXPECT_THROW((Dims{1, 1, 0}.validate()), ConfigurationError);
  EXPECT_NO_THROW((Dims{1, 1, 1}.validate()));
}

TEST(Validation, ProblemNeedsOneCostPerStage) {
  OcpProblem p = registry_get("lti-toy");
  p.stage_costs.pop_back();
  EXPECT_THROW(p.validate(), ConfigurationError);
}

TEST(Validation, IterateShapeAndFiniteness) {
  const Dims d{3, 2, 1};
  Iterate it = Iterate::zeros(d);
  EXPECT_NO_THROW(it.validate(d));
  it.u.pop_back();
  EXPECT_THROW(it.validate(d), ConfigurationError);
  it = Iterate::zeros(d);
  it.x[1][0] = std::nan("");
  EXPECT_THROW(it.validate(d), ConfigurationError);
}

TEST(Stacking, PrimalOrderingRoundTrip) {
  const Dims d{2, 2, 1};
  Iterate it = Iterate::zeros(d);
  it.x = {vec({1, 2}), vec({4, 5}), vec({7, 8})};
  it.u = {vec({3}), vec({6})};
  EXPECT_EQ(stack_primal(it), vec({1, 2, 3, 4, 5, 6, 7, 8}));
  EXPECT_EQ(testing::unstack_primal(stack_primal(it), d).u[1], vec({6}));
  EXPECT_EQ(unstack_controls(stack_controls(it.u), 1)[1], vec({6}));
}

}  // namespace
}  // namespace ocpshoot
