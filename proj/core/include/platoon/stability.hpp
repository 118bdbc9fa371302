// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The platoon-games authors

#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "platoon/model.hpp"

namespace platoon::stability {

class StabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Weighted incidence/Laplacian pair over the physical nodes, plus the
/// algebraic connectivity sigma2 (second-smallest Laplacian eigenvalue).
/// Orientation: head = follower (+1), tail = informed-of (-1); L is
/// orientation-independent.
struct LaplacianBundle {
  bool includes_leader = true;
  Mat incidence;  // nodes x edges
  Vec weights;    // one per edge
  Mat laplacian;
  double sigma2 = 0.0;
};

/// Build L = D W D^T. With include_virtual_leader the node set is
/// 0..n; otherwise node 0 and its edges are dropped. Throws when the
/// resulting graph is disconnected, naming the isolated component.
LaplacianBundle build_laplacian(const TopologyGraph& topology,
                                bool include_virtual_leader);

struct VehicleConvergence {
  bool converged = false;
  double time = 0.0;          // valid when converged
  double terminal_error = 0.0;
};

struct StabilityReport {
  double threshold = 0.01;
  std::vector<VehicleConvergence> vehicles;
  bool all_converged = false;
  double mean_time = 0.0;     // valid when all_converged
  double horizon = 0.0;       // t_f of the measured trajectory
  bool extended_horizon = false;
};

/// Convergence time of each vehicle: the first grid time after which
/// |e_i| stays below the threshold through the end of the table
/// (sustained, not first crossing, since coupled errors need not be
/// monotone).
StabilityReport internal_stability(const TrajectoryTable& table,
                                   double threshold = 0.01);

struct StringStabilityPair {
  int follower = 0;   // i >= 2; ratio against vehicle i-1
  double ratio = 0.0;
  bool pass = false;
  bool degenerate = false;   // predecessor error is zero
  bool homogeneous = false;  // w_i == w_{i-1}
};

struct StringStabilityReport {
  std::vector<StringStabilityPair> pairs;
  bool all_pass = false;  // over non-degenerate pairs
};

/// PF transfer-ratio condition |e_i(0)| <= |e_{i-1}(0)| for adjacent
/// vehicles. The ratio is constant in time for a homogeneous platoon, so
/// the check reduces to the initial spacing errors.
StringStabilityReport string_stability_pf(const Scenario& scenario);

/// Raw variant over initial spacing errors and per-vehicle weights; pairs
/// whose predecessor error is exactly zero are flagged degenerate and
/// excluded from the pass verdict.
StringStabilityReport string_stability_pf(const Vec& e0,
                                          const std::vector<double>& weights);

}  // namespace platoon::stability
