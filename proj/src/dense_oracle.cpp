// Copyright 2026 The hlaser Authors
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

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>

#include "hlaser/error.hpp"
#include "hlaser/superop.hpp"

namespace hlaser {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// vec(c X c^T - (c^T c X + X c^T c)/2), column-major vec.
MatrixXd dense_dissipator(const MatrixXd& c) {
  const int D = static_cast<int>(c.rows());
  MatrixXd I = MatrixXd::Identity(D, D);
  MatrixXd ctc = c.transpose() * c;
  return Eigen::kroneckerProduct(c, c).eval() -
         0.5 * (Eigen::kroneckerProduct(I, ctc).eval() +
                Eigen::kroneckerProduct(ctc.transpose(), I).eval());
}

void check_dim(int D) {
  if (D > kDenseOracleMaxDim)
    raise(ErrorKind::DimensionTooLarge,
          "dense oracle limited to D <= " + std::to_string(kDenseOracleMaxDim));
}

MatrixXd gain_dense(const CavityOperators& ops) {
  const int D = ops.dim();
  MatrixXd G = MatrixXd::Zero(D, D);
  for (int n = 1; n < D; ++n) G(n, n - 1) = ops.G(n);
  return G;
}

MatrixXd loss_dense(const CavityOperators& ops) {
  const int D = ops.dim();
  MatrixXd L = MatrixXd::Zero(D, D);
  for (int n = 1; n < D; ++n) L(n - 1, n) = ops.L(n);
  return L;
}

MatrixXd liouvillian_dense(const CavityOperators& ops, const ModelParams& params) {
  MatrixXd dg = dense_dissipator(gain_dense(ops));
  MatrixXd out = dg + dense_dissipator(loss_dense(ops));
  if (params.family == Family::PQ) out += 0.5 * params.q * dg * dg;
  return out;
}

VectorXd trace_row(int D) {
  VectorXd t = VectorXd::Zero(D * D);
  for (int i = 0; i < D; ++i) t(i + D * i) = 1.0;
  return t;
}

}  // namespace

MatrixXd dense_oracle(const CavityOperators& ops, const ModelParams& params) {
  check_dim(params.dim);
  if (ops.dim() != params.dim) raise(ErrorKind::InconsistentInputs, "dimension mismatch");
  return liouvillian_dense(ops, params);
}

DenseModel::DenseModel(const CavityOperators& ops, const ModelParams& params)
    : D_(params.dim), params_(params), ops_(ops) {
  check_dim(D_);
  G_ = gain_dense(ops);
  Lo_ = loss_dense(ops);
  L_ = liouvillian_dense(ops, params);
  // Replace the (0,0) balance row with the trace functional.
  MatrixXd M = L_;
  VectorXd tr = trace_row(D_);
  M.row(0) = tr.transpose();
  VectorXd e = VectorXd::Zero(D_ * D_);
  e(0) = 1.0;
  rho_vec_ = M.fullPivLu().solve(e);
  VectorXd d = steady_state();
  flux_ = 0.0;
  for (int n = 1; n < D_; ++n) flux_ += ops.L(n) * ops.L(n) * d(n);
}

VectorXd DenseModel::steady_state() const {
  VectorXd d(D_);
  for (int i = 0; i < D_; ++i) d(i) = rho_vec_(i + D_ * i);
  return d;
}

double DenseModel::flux() const { return flux_; }

MatrixXd DenseModel::reduced_inverse() const {
  const int N = D_ * D_;
  MatrixXd P = rho_vec_ * trace_row(D_).transpose();
  MatrixXd Q = MatrixXd::Identity(N, N) - P;
  return Q * (L_ - P).partialPivLu().inverse() * Q;
}

double DenseModel::coherence() const {
  const int D = D_;
  MatrixXd I = MatrixXd::Identity(D, D);
  // -2 (1| (B3* x I) inv(QLQ) (I x B3) |1)
  MatrixXd right = Eigen::kroneckerProduct(Lo_, I);  // vec(X L^T)
  MatrixXd left = Eigen::kroneckerProduct(I, Lo_);   // vec(L X)
  VectorXd v = reduced_inverse() * (left * rho_vec_);
  return -2.0 * trace_row(D).dot(right * v);
}

double DenseModel::mandel_q() const {
  MatrixXd J = Eigen::kroneckerProduct(Lo_, Lo_);  // vec(L X L^T)
  VectorXd v = reduced_inverse() * (J * rho_vec_);
  return -2.0 / flux_ * trace_row(D_).dot(J * v);
}

double DenseModel::g1(double s) const {
  const int D = D_;
  MatrixXd I = MatrixXd::Identity(D, D);
  MatrixXd E = (L_ * std::abs(s)).exp();
  VectorXd v = E * (Eigen::kroneckerProduct(I, Lo_).eval() * rho_vec_);
  return trace_row(D).dot(Eigen::kroneckerProduct(Lo_, I).eval() * v) / flux_;
}

double DenseModel::g2(double s, double s2, double t2, double t) const {
  const int D = D_;
  MatrixXd I = MatrixXd::Identity(D, D);
  MatrixXd left = Eigen::kroneckerProduct(I, Lo_);
  MatrixXd right = Eigen::kroneckerProduct(Lo_, I);
  // (time, is_annihilation)
  std::array<std::pair<double, bool>, 4> ev{{{s, false}, {s2, false}, {t2, true}, {t, true}}};
  std::stable_sort(ev.begin(), ev.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  VectorXd x = rho_vec_;
  double prev = ev[0].first;
  for (const auto& [time, ann] : ev) {
    if (time > prev) x = (L_ * (time - prev)).exp() * x;
    x = ann ? (left * x).eval() : (right * x).eval();
    prev = time;
  }
  return trace_row(D).dot(x) / (flux_ * flux_);
}

double DenseModel::mandel_q_discrete(double gamma) const {
  const int D = D_;
  const int N = D * D;
  TransferSet ts = build_transfer(ops_, gamma);
  MatrixXd A0 = MatrixXd::Zero(D, D), A1 = MatrixXd::Zero(D, D), A3 = MatrixXd::Zero(D, D);
  for (int n = 1; n < D; ++n) {
    A0(n, n - 1) = ts.a0[n - 1];
    A3(n - 1, n) = ts.a3[n - 1];
  }
  for (int n = 0; n < D; ++n) A1(n, n) = ts.a1[n];
  MatrixXd T = Eigen::kroneckerProduct(A0, A0).eval() + Eigen::kroneckerProduct(A1, A1).eval() +
               Eigen::kroneckerProduct(A3, A3).eval();
  MatrixXd P = rho_vec_ * trace_row(D).transpose();
  MatrixXd Q = MatrixXd::Identity(N, N) - P;
  MatrixXd M = MatrixXd::Identity(N, N) - Q * T * Q;
  MatrixXd J = Eigen::kroneckerProduct(Lo_, Lo_);
  VectorXd v = M.partialPivLu().solve(J * rho_vec_);
  return 2.0 * gamma * trace_row(D).dot(J * v) / flux_;
}

MatrixXd DenseModel::band_restriction(int k) const {
  const int a = std::abs(k);
  const int n = D_ - a;
  std::vector<int> idx(n);
  for (int m = 0; m < n; ++m) idx[m] = k >= 0 ? m + D_ * (m + a) : (m + a) + D_ * m;
  MatrixXd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = L_(idx[i], idx[j]);
  return out;
}

}  // namespace hlaser
