// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The platoon-games authors

#pragma once

#include "platoon/matfun.hpp"
#include "platoon/model.hpp"

namespace platoon {

/// Closed-form Nash trajectories for the PF topology. Each vehicle is an
/// independent scalar problem:
///   e_i(t) = e_i(0) alpha_i(t),   u_i(t) = e_i(0) alpha_i'(t),
/// with alpha_i(t) = cosh(sqrt(w_i)(t_f - t)) / cosh(sqrt(w_i) t_f) and
/// e_i = y_i + d_i.
class PfSolution {
 public:
  PfSolution(Vec omega, Vec d, Vec y0, double t_f);

  int size() const { return static_cast<int>(omega_.size()); }
  double t_f() const { return t_f_; }
  const Vec& d() const { return d_; }

  double y(int i, double t) const;
  double e(int i, double t) const;
  double u(int i, double t) const;

  Vec y_at(double t) const;
  Vec e_at(double t) const;
  Vec u_at(double t) const;

 private:
  Vec omega_, d_, y0_, e0_;
  double t_f_;
};

PfSolution solve_pf(const Scenario& scenario);

/// Closed-form Nash trajectories for the TPF topology, evaluated through
/// the factorization of the tridiagonal-like information matrix. The
/// coefficient matrix P(t) = V diag(alpha_k(t)) Vinv is lower-triangular
/// with zeros below row 1 in column 1, so vehicle 1's initial condition
/// never enters followers' trajectories.
class TpfSolution {
 public:
  TpfSolution(matfun::EigenFactorization ef, Vec d, Vec y0, double t_f);

  int size() const { return ef_.size(); }
  double t_f() const { return t_f_; }
  const Vec& d() const { return d_; }
  const matfun::EigenFactorization& factorization() const { return ef_; }

  /// Coefficient alpha_k^i(t): the (i, k) entry of P(t), expanded as the
  /// eigenvector sum. 1-based vehicle indices.
  double alpha_coeff(int i, int k, double t) const;

  Vec y_at(double t) const;
  Vec e_at(double t) const;
  Vec u_at(double t) const;

 private:
  matfun::EigenFactorization ef_;
  Vec d_, y0_, e0_;
  double t_f_;
};

TpfSolution solve_tpf(const Scenario& scenario);

/// P(t) = V diag(alpha_k(t)) Vinv; P(0) = I and y(t) = P y(0) + (P - I) d.
Mat assemble_P(const TpfSolution& sol, double t);

}  // namespace platoon
