// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The platoon-games authors

#pragma once

#include <stdexcept>
#include <vector>

#include "platoon/general_game.hpp"
#include "platoon/model.hpp"

namespace platoon::oracle {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Default step count; keeps h <= t_f / 2000.
inline constexpr int kDefaultSteps = 2000;

/// Dense fixed-step integration record of the coupled state-costate
/// system. States are accumulated in extended precision internally; the
/// stored grids are double.
struct OdeRun {
  Vec t;
  Mat y;       // (steps+1) x n
  Mat lambda;  // (steps+1) x n
  int steps = 0;
  double h = 0.0;

  Vec lambda_final() const { return lambda.row(lambda.rows() - 1); }
};

/// Classical RK4 on  y' = -lambda,  lambda' = -A y - omega  (the costate
/// feels the spacing error: -A y - omega = -A (y + d)). Non-finite states
/// trigger one halved-step retry before failing.
OdeRun integrate_forward(const InfoMatrix& info, const Vec& y0,
                         const Vec& lambda0, double t_f,
                         int steps = kDefaultSteps);

/// lambda(0) such that the integrated lambda(t_f) vanishes. Linearity of
/// the discrete flow makes this exact: one forcing-only run plus n unit
/// costate runs assemble an n x n sensitivity system solved directly.
Vec shoot_lambda0(const InfoMatrix& info, const Vec& y0, double t_f,
                  int steps = kDefaultSteps);

/// Shooting + forward integration for a whole scenario.
OdeRun solve_bvp(const Scenario& scenario, int steps = kDefaultSteps);

/// Repackage an integration run as a trajectory table (e = y + d,
/// u = -lambda).
TrajectoryTable to_table(const OdeRun& run, const Vec& d);

/// Unilateral-deviation record for one player.
struct DeviationReport {
  int player = 0;            // 1-based
  double baseline_cost = 0.0;
  std::vector<double> deltas;
  double min_delta = 0.0;
  bool certified = false;    // min_delta >= -1e-6 (1 + |J|)
};

/// Perturbs player i's control by +-eps tent functions while all other
/// controls stay fixed, and reports the worst cost change. At a Nash
/// point no bump may lower the player's cost beyond quadrature noise.
DeviationReport certify_nash(const Scenario& scenario,
                             const TrajectoryTable& table, int player,
                             int n_bumps = 20, double eps = 1e-3);

}  // namespace platoon::oracle
