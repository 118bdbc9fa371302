// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The platoon-games authors

#include "platoon/general_game.hpp"

#include <cmath>

namespace platoon {

InfoMatrix build_info_matrix(const TopologyGraph& topology, const Vec& d) {
  const int n = topology.size();
  Mat A = Mat::Zero(n, n);
  for (int i = 1; i <= n; ++i) {
    for (const Edge& e : topology.neighbors(i)) {
      // A link to vehicle j couples row i to every y_m with j < m <= i.
      for (int m = e.informed + 1; m <= i; ++m)
        A(i - 1, m - 1) += e.weight;
    }
  }
  Vec omega = A * d;
  return InfoMatrix{std::move(A), std::move(omega)};
}

InfoMatrix build_info_matrix(const Scenario& scenario) {
  return build_info_matrix(scenario.topology, scenario.d);
}

namespace {

matfun::EigenFactorization factorize(const Mat& A) {
  const int n = static_cast<int>(A.rows());
  bool diagonal = true;
  for (int i = 0; i < n && diagonal; ++i)
    for (int j = 0; j < i; ++j)
      if (A(i, j) != 0.0) { diagonal = false; break; }
  if (diagonal)
    return matfun::EigenFactorization{A.diagonal(), Mat::Identity(n, n),
                                      Mat::Identity(n, n)};
  return matfun::eig_lower_triangular(A);
}

Vec forward_substitute(const Mat& L, const Vec& b) {
  const int n = static_cast<int>(L.rows());
  Vec x(n);
  for (int i = 0; i < n; ++i) {
    double acc = b[i];
    for (int k = 0; k < i; ++k) acc -= L(i, k) * x[k];
    x[i] = acc / L(i, i);
  }
  return x;
}

}  // namespace

GeneralSolution::GeneralSolution(matfun::EigenFactorization ef, Vec lambda0,
                                 Vec d, Vec y0, double t_f)
    : ef_(std::move(ef)), lambda0_(std::move(lambda0)), d_(std::move(d)),
      y0_(std::move(y0)), t_f_(t_f) {
  e0_ = y0_ + d_;
}

Vec GeneralSolution::e_at(double t) const {
  const int n = size();
  Vec a(n);
  for (int k = 0; k < n; ++k)
    a[k] = matfun::scalar_alpha(ef_.delta[k], t, t_f_);
  return ef_.V * (a.asDiagonal() * (ef_.Vinv * e0_));
}

Vec GeneralSolution::y_at(double t) const {
  if (t == 0.0) return y0_;
  return e_at(t) - d_;
}

Vec GeneralSolution::u_at(double t) const {
  const int n = size();
  Vec c(n);
  for (int k = 0; k < n; ++k)
    c[k] = matfun::scalar_alpha_dot(ef_.delta[k], t, t_f_);
  return ef_.V * (c.asDiagonal() * (ef_.Vinv * e0_));
}

Vec GeneralSolution::lambda_at(double t) const { return -u_at(t); }

GeneralSolution solve_general(const InfoMatrix& info, const Vec& d,
                              const Vec& y0, double t_f) {
  matfun::EigenFactorization ef = factorize(info.A);
  const int n = ef.size();

  double mu_max = 0.0;
  for (int i = 0; i < n; ++i)
    mu_max = std::max(mu_max, std::sqrt(ef.delta[i]));

  Vec lambda0;
  if (mu_max * t_f <= 350.0) {
    // lambda(0) = Phi22(t_f)^{-1} [-Phi21(t_f) y(0) - Psi2(t_f) omega],
    // with Phi22 lower-triangular so a forward substitution suffices.
    auto [C, S] = matfun::hyp_pair(ef, t_f);
    const Mat phi21 = -info.A * S;  // -A^{1/2} sinh(A^{1/2} t) = -A S
    const Mat psi2 = -S;
    const Vec rhs = -phi21 * y0 - psi2 * info.omega;
    lambda0 = forward_substitute(C, rhs);
  } else {
    // Equivalent tanh form; immune to cosh overflow at extreme horizons.
    Vec g(n);
    for (int i = 0; i < n; ++i) {
      const double mu = std::sqrt(ef.delta[i]);
      g[i] = mu * std::tanh(mu * t_f);
    }
    lambda0 = ef.V * (g.asDiagonal() * (ef.Vinv * (y0 + d)));
  }
  return GeneralSolution(std::move(ef), std::move(lambda0), d, y0, t_f);
}

GeneralSolution solve_general(const Scenario& scenario) {
  return solve_general(build_info_matrix(scenario), scenario.d,
                       relative_initial(scenario).y, scenario.t_f);
}

std::pair<Vec, Vec> eval_trajectory(const GeneralSolution& sol, double t) {
  return {sol.y_at(t), sol.u_at(t)};
}

}  // namespace platoon
