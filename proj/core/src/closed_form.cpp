// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The platoon-games authors

#include "platoon/closed_form.hpp"

#include <cmath>

namespace platoon {

using matfun::scalar_alpha;
using matfun::scalar_alpha_dot;

PfSolution::PfSolution(Vec omega, Vec d, Vec y0, double t_f)
    : omega_(std::move(omega)), d_(std::move(d)), y0_(std::move(y0)),
      t_f_(t_f) {
  e0_ = y0_ + d_;
}

double PfSolution::e(int i, double t) const {
  return e0_[i] * scalar_alpha(omega_[i], t, t_f_);
}

double PfSolution::y(int i, double t) const {
  return t == 0.0 ? y0_[i] : e(i, t) - d_[i];
}

double PfSolution::u(int i, double t) const {
  return e0_[i] * scalar_alpha_dot(omega_[i], t, t_f_);
}

Vec PfSolution::y_at(double t) const {
  Vec out(size());
  for (int i = 0; i < size(); ++i) out[i] = y(i, t);
  return out;
}

Vec PfSolution::e_at(double t) const {
  Vec out(size());
  for (int i = 0; i < size(); ++i) out[i] = e(i, t);
  return out;
}

Vec PfSolution::u_at(double t) const {
  Vec out(size());
  for (int i = 0; i < size(); ++i) out[i] = u(i, t);
  return out;
}

PfSolution solve_pf(const Scenario& scenario) {
  if (scenario.topology.kind() != TopologyKind::PF)
    throw ModelError("solve_pf needs a PF topology");
  const int n = scenario.n;
  Vec omega(n);
  for (int i = 1; i <= n; ++i) {
    const auto& links = scenario.topology.neighbors(i);
    omega[i - 1] = links.front().weight;
    if (!(omega[i - 1] > 0.0)) throw ModelError("pf weight must be positive");
  }
  return PfSolution(std::move(omega), scenario.d,
                    relative_initial(scenario).y, scenario.t_f);
}

namespace {

// TPF information matrix: diag(w) plus the V2V weight of vehicle i at
// (i, i-1) and added to the diagonal.
Mat tpf_info_matrix(const Scenario& scenario, Vec& omega, Vec& v2v) {
  const int n = scenario.n;
  omega = Vec::Zero(n);
  v2v = Vec::Zero(n);
  for (int i = 1; i <= n; ++i) {
    for (const Edge& e : scenario.topology.neighbors(i)) {
      if (e.informed == i - 1) omega[i - 1] = e.weight;
      else if (e.informed == i - 2) v2v[i - 1] = e.weight;
      else throw ModelError("tpf edges must point to i-1 or i-2");
    }
  }
  Mat A = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    A(i, i) = omega[i] + v2v[i];
    if (i >= 1 && v2v[i] != 0.0) A(i, i - 1) = v2v[i];
  }
  return A;
}

matfun::EigenFactorization factorize_possibly_diagonal(const Mat& A) {
  const int n = static_cast<int>(A.rows());
  bool diagonal = true;
  for (int i = 0; i < n && diagonal; ++i)
    for (int j = 0; j < i; ++j)
      if (A(i, j) != 0.0) { diagonal = false; break; }
  if (diagonal) {
    // A diagonal matrix is diagonalizable regardless of repeated entries;
    // the gap criterion only matters for the back-substitution recurrence.
    return matfun::EigenFactorization{A.diagonal(), Mat::Identity(n, n),
                                      Mat::Identity(n, n)};
  }
  return matfun::eig_lower_triangular(A);
}

}  // namespace

TpfSolution::TpfSolution(matfun::EigenFactorization ef, Vec d, Vec y0,
                         double t_f)
    : ef_(std::move(ef)), d_(std::move(d)), y0_(std::move(y0)), t_f_(t_f) {
  e0_ = y0_ + d_;
}

double TpfSolution::alpha_coeff(int i, int k, double t) const {
  double acc = 0.0;
  for (int m = k; m <= i; ++m)
    acc += ef_.V(i - 1, m - 1) * scalar_alpha(ef_.delta[m - 1], t, t_f_) *
           ef_.Vinv(m - 1, k - 1);
  return acc;
}

Vec TpfSolution::e_at(double t) const {
  const int n = size();
  Vec out(n);
  for (int i = 1; i <= n; ++i) {
    if (i <= 2) {
      out[i - 1] = alpha_coeff(i, i, t) * e0_[i - 1];
    } else {
      double acc = 0.0;
      for (int k = 2; k <= i; ++k) acc += alpha_coeff(i, k, t) * e0_[k - 1];
      out[i - 1] = acc;
    }
  }
  return out;
}

Vec TpfSolution::y_at(double t) const {
  if (t == 0.0) return y0_;
  return e_at(t) - d_;
}

Vec TpfSolution::u_at(double t) const {
  const int n = size();
  Vec c(n);
  for (int k = 0; k < n; ++k)
    c[k] = matfun::scalar_alpha_dot(ef_.delta[k], t, t_f_);
  return ef_.V * (c.asDiagonal() * (ef_.Vinv * e0_));
}

TpfSolution solve_tpf(const Scenario& scenario) {
  if (scenario.topology.kind() != TopologyKind::TPF)
    throw ModelError("solve_tpf needs a TPF topology");
  Vec omega, v2v;
  const Mat A = tpf_info_matrix(scenario, omega, v2v);
  return TpfSolution(factorize_possibly_diagonal(A), scenario.d,
                     relative_initial(scenario).y, scenario.t_f);
}

Mat assemble_P(const TpfSolution& sol, double t) {
  const auto& ef = sol.factorization();
  const int n = ef.size();
  Vec a(n);
  for (int k = 0; k < n; ++k)
    a[k] = scalar_alpha(ef.delta[k], t, sol.t_f());
  return ef.V * a.asDiagonal() * ef.Vinv;
}

}  // namespace platoon
