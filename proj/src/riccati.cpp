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

#include "ocpshoot/riccati.hpp"

#include <sstream>

namespace ocpshoot {

RiccatiStep riccati_stage(const StageQp& st, const MatrixXd& P_next,
                          const VectorXd& p_next, int index, double shift) {
  const MatrixXd PB = P_next * st.B;
  MatrixXd H_uu = st.R + st.B.transpose() * PB;
  if (shift != 0.0) H_uu.diagonal().array() += shift;
  H_uu = 0.5 * (H_uu + H_uu.transpose()).eval();

  const Eigen::LLT<MatrixXd> llt(H_uu);
  if (llt.info() != Eigen::Success) {
    const double min_eig =
        Eigen::SelfAdjointEigenSolver<MatrixXd>(H_uu, Eigen::EigenvaluesOnly)
            .eigenvalues()
            .minCoeff();
    std::ostringstream msg;
    msg << "R + B^T P B is not positive definite at stage " << index
        << " (min eigenvalue " << min_eig << ")";
    throw SingularStageError(index, min_eig, msg.str());
  }

  const MatrixXd H_ux = st.S + PB.transpose() * st.A;      // S + B^T P A
  const VectorXd v = P_next * st.a + p_next;               // P a + p
  const VectorXd h_u = st.r + st.B.transpose() * v;        // r + B^T (P a + p)

  RiccatiStep out;
  out.K = -llt.solve(H_ux);
  out.k = -llt.solve(h_u);
  out.P = st.Q + st.A.transpose() * P_next * st.A + H_ux.transpose() * out.K;
  out.P = 0.5 * (out.P + out.P.transpose()).eval();
  out.p = st.q + st.A.transpose() * v + out.K.transpose() * h_u;
  return out;
}

RiccatiSolution backward_sweep(const QpData& qp, double shift) {
  const int N = qp.horizon();
  RiccatiSolution sol;
  sol.law.K.resize(N);
  sol.law.k.resize(N);
  sol.value.P.resize(N + 1);
  sol.value.p.resize(N + 1);
  sol.value.P[N] = qp.P_N;
  sol.value.p[N] = qp.p_N;
  for (int i = N - 1; i >= 0; --i) {
    RiccatiStep step =
        riccati_stage(qp.stages[i], sol.value.P[i + 1], sol.value.p[i + 1], i, shift);
    sol.law.K[i] = std::move(step.K);
    sol.law.k[i] = std::move(step.k);
    sol.value.P[i] = std::move(step.P);
    sol.value.p[i] = std::move(step.p);
  }
  return sol;
}

Iterate linear_forward_sweep(const QpData& qp, const RiccatiSolution& sol) {
  const int N = qp.horizon();
  Iterate it;
  it.x.resize(N + 1);
  it.u.resize(N);
  it.x[0] = qp.x0_bar;
  for (int i = 0; i < N; ++i) {
    const StageQp& st = qp.stages[i];
    it.u[i] = sol.law.K[i] * it.x[i] + sol.law.k[i];
    it.x[i + 1] = st.a + st.A * it.x[i] + st.B * it.u[i];
  }
  it.lambda = qp_duals_from_valuefn(sol.value, it.x);
  return it;
}

Iterate dense_kkt_solve(const QpData& qp) {
  const int N = qp.horizon();
  if (N < 1) throw ConfigurationError("QP has no stages");
  const int nx = static_cast<int>(qp.x0_bar.size());
  const int nu = static_cast<int>(qp.stages.front().R.rows());
  const Dims d{N, nx, nu};
  const int nw = d.num_primal();
  const int nc = (N + 1) * nx;

  // [H  J^T] [w     ]   [-g ]
  // [J  0  ] [lambda] = [-c0]   with F(w) = J w + c0
  MatrixXd K = MatrixXd::Zero(nw + nc, nw + nc);
  VectorXd rhs = VectorXd::Zero(nw + nc);
  for (int i = 0; i < N; ++i) {
    const StageQp& st = qp.stages[i];
    const int xo = d.x_offset(i), uo = d.u_offset(i);
    K.block(xo, xo, nx, nx) = st.Q;
    K.block(uo, xo, nu, nx) = st.S;
    K.block(xo, uo, nx, nu) = st.S.transpose();
    K.block(uo, uo, nu, nu) = st.R;
    rhs.segment(xo, nx) = -st.q;
    rhs.segment(uo, nu) = -st.r;
  }
  const int xN = d.x_offset(N);
  K.block(xN, xN, nx, nx) = qp.P_N;
  rhs.segment(xN, nx) = -qp.p_N;

  MatrixXd J = MatrixXd::Zero(nc, nw);
  VectorXd c0(nc);
  J.block(0, 0, nx, nx) = -MatrixXd::Identity(nx, nx);
  c0.head(nx) = qp.x0_bar;
  for (int i = 0; i < N; ++i) {
    const StageQp& st = qp.stages[i];
    const int row = (i + 1) * nx;
    J.block(row, d.x_offset(i), nx, nx) = st.A;
    J.block(row, d.u_offset(i), nx, nu) = st.B;
    J.block(row, d.x_offset(i + 1), nx, nx) = -MatrixXd::Identity(nx, nx);
    c0.segment(row, nx) = st.a;
  }
  K.block(nw, 0, nc, nw) = J;
  K.block(0, nw, nw, nc) = J.transpose();
  rhs.tail(nc) = -c0;

  const Eigen::FullPivLU<MatrixXd> lu(K);
  if (!lu.isInvertible()) {
    std::ostringstream msg;
    msg << "KKT matrix is singular (rank " << lu.rank() << " of " << K.rows() << ")";
    throw RankError(lu.rank(), K.rows(), msg.str());
  }
  const VectorXd sol = lu.solve(rhs);

  Iterate it;
  it.x.resize(N + 1);
  it.u.resize(N);
  Trajectory lambda(N + 1);
  for (int i = 0; i < N; ++i) {
    it.x[i] = sol.segment(d.x_offset(i), nx);
    it.u[i] = sol.segment(d.u_offset(i), nu);
  }
  it.x[N] = sol.segment(xN, nx);
  for (int i = 0; i <= N; ++i) lambda[i] = sol.segment(nw + i * nx, nx);
  it.lambda = std::move(lambda);
  return it;
}

Trajectory qp_duals_from_valuefn(const ValueFn& vf, const Trajectory& x) {
  Trajectory lambda(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) lambda[i] = vf.p[i] + vf.P[i] * x[i];
  return lambda;
}

}  // namespace ocpshoot
