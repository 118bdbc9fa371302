// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The platoon-games authors

#pragma once

#include <utility>

#include "platoon/matfun.hpp"
#include "platoon/model.hpp"

namespace platoon {

/// Lower-triangular information matrix of the costate dynamics plus the
/// constant forcing vector omega = A d. Entry (i, m) accumulates the
/// weights of vehicle i's links that reach strictly behind vehicle m, so
/// the diagonal carries the full row sums delta_i.
struct InfoMatrix {
  Mat A;
  Vec omega;

  int size() const { return static_cast<int>(A.rows()); }
};

InfoMatrix build_info_matrix(const TopologyGraph& topology, const Vec& d);
InfoMatrix build_info_matrix(const Scenario& scenario);

/// Semi-analytic Nash solution for an arbitrary rearward topology. The
/// costate initial value comes from the terminal condition
/// lambda(t_f) = 0 through the Phi/Psi blocks; trajectories evaluate
/// pointwise through the eigenfactorization, which keeps lambda(t_f)
/// exactly zero instead of cancelling huge cosh terms.
class GeneralSolution {
 public:
  GeneralSolution(matfun::EigenFactorization ef, Vec lambda0, Vec d, Vec y0,
                  double t_f);

  int size() const { return ef_.size(); }
  double t_f() const { return t_f_; }
  const Vec& d() const { return d_; }
  const Vec& lambda0() const { return lambda0_; }
  const matfun::EigenFactorization& factorization() const { return ef_; }

  Vec y_at(double t) const;
  Vec e_at(double t) const;
  Vec u_at(double t) const;
  Vec lambda_at(double t) const;

 private:
  matfun::EigenFactorization ef_;
  Vec lambda0_, d_, y0_, e0_;
  double t_f_;
};

GeneralSolution solve_general(const Scenario& scenario);
GeneralSolution solve_general(const InfoMatrix& info, const Vec& d,
                              const Vec& y0, double t_f);

/// (y, u) at time t per the Phi/Psi trajectory formula.
std::pair<Vec, Vec> eval_trajectory(const GeneralSolution& sol, double t);

}  // namespace platoon
