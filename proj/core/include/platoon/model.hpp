// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The platoon-games authors

#pragma once

#include <Eigen/Core>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace platoon {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Thrown when scenario or topology data violates a model invariant.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class TopologyKind { PF, TPF, APF, LF, Custom };

std::string to_string(TopologyKind kind);

/// A directed rearward information link: vehicle `follower` observes
/// vehicle `informed` (informed < follower) with weight `weight`.
struct Edge {
  int follower = 0;
  int informed = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Rearward information topology over vehicles 1..n plus the virtual
/// leader (node 0). Immutable after construction; every vehicle must
/// carry at least one link and each link must point strictly rearward.
class TopologyGraph {
 public:
  TopologyGraph(TopologyKind kind, int n, std::vector<Edge> edges);

  // PF: edges (i, i-1, w[i]) for i = 1..n, all w > 0.
  static TopologyGraph pf(const std::vector<double>& weights);
  // TPF: sensor edges (i, i-1, w[i]) plus V2V edges (i, i-2, wt[i]) for
  // i >= 3. w[i] = 0 is allowed when the matching wt[i] > 0. For n < 3
  // there are no V2V rows and the topology degenerates to PF form.
  static TopologyGraph tpf(const std::vector<double>& weights,
                           const std::vector<double>& v2v_weights);
  static TopologyGraph custom(int n, std::vector<Edge> edges,
                              TopologyKind kind = TopologyKind::Custom);

  TopologyKind kind() const { return kind_; }
  int size() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  /// Links of vehicle i (1-based), i.e. the set N_i with weights.
  const std::vector<Edge>& neighbors(int i) const;
  /// Sum of link weights of vehicle i; strictly positive by invariant.
  double row_sum(int i) const;

 private:
  TopologyKind kind_;
  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Edge>> neighbor_sets_;  // index 0 unused
};

/// A full problem instance. Positions are absolute at t = 0; the virtual
/// leader occupies x0[0] and is held at constant speed `reference_speed`
/// (fixed to 0; the relative-coordinate game is invariant to it, so a
/// nonzero value only shifts reconstructed absolute positions).
struct Scenario {
  int n = 0;
  double t_f = 0.0;
  Vec x0;  // n+1 entries, strictly decreasing
  Vec d;   // n entries, all negative
  TopologyGraph topology;
  double reference_speed = 0.0;

  static Scenario make(double t_f, const Vec& x0, const Vec& d,
                       TopologyGraph topology);
};

/// Relative displacements y_i = x_i - x_{i-1} at t = 0.
struct RelativeState {
  Vec y;
};

RelativeState relative_initial(const Scenario& scenario);

/// Sampled trajectories on a uniform grid. e = y + d row-wise; u holds
/// the velocity commands.
struct TrajectoryTable {
  Vec t;
  Mat y;
  Mat e;
  Mat u;

  int samples() const { return static_cast<int>(t.size()); }
  int vehicles() const { return static_cast<int>(y.cols()); }
};

}  // namespace platoon
