// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The platoon-games authors

#pragma once

#include <stdexcept>
#include <vector>

#include "platoon/model.hpp"

namespace platoon::mpc {

class MpcError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MpcConfig {
  int horizon = 5;          // N
  double sample_time = 0.1; // T_s, seconds
};

/// Per-player quadratic state cost over the extended state
/// (x_0, ..., x_n, 1). Assembled from the player's masked weight matrix
/// so that x^T Q x equals sum_{j in N_i} w_ij (x_i - x_j - g_ij)^2 with
/// g_ij the desired inter-vehicle gap accumulated over the chain; the
/// identity is spot-checked on construction.
struct QMatrix {
  int player = 0;
  Mat Q;
};

QMatrix build_q(const Scenario& scenario, int player);
QMatrix build_q(const std::vector<Edge>& edges, int n, const Vec& d,
                int player);

/// Stacked N-step prediction: X = A_pred x(k) + sum_i B_i U_i with
/// b_hat_i = T_s b_i and b_i carrying ones exactly in the extended-state
/// slots of vehicles i..n.
struct PredictionStack {
  int n = 0;
  int horizon = 0;
  double sample_time = 0.0;
  Mat A_pred;
  std::vector<Vec> b_hat;  // per player
  std::vector<Mat> B;      // per player, (N (n+2)) x N
};

PredictionStack build_prediction(int n, const MpcConfig& config);

/// Per-player control sequences
///   U_i = -(I + B_i^T Phi_i B_i)^{-1} B_i^T Phi_i A_pred x(k),
/// each player solving independently with the others' stacked inputs
/// absent. The first element of each sequence is the applied input.
std::vector<Vec> mpc_step(const PredictionStack& stack,
                          const std::vector<QMatrix>& q, const Vec& x_ext);

/// Closed-loop rollout on the T_s grid: repeated mpc_step plus the state
/// update x(k+1) = x(k) + sum_i b_hat_i u_i(k). The leader slot stays
/// constant and the trailing extended slot stays exactly 1. Aborts if a
/// spacing error grows past 10x its initial magnitude (floored at 0.1 so
/// vehicles that start in formation may still move).
TrajectoryTable mpc_rollout(const Scenario& scenario, const MpcConfig& config);

}  // namespace platoon::mpc
