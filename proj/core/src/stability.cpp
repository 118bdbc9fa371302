// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The platoon-games authors

#include "platoon/stability.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>
#include <sstream>

namespace platoon::stability {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

LaplacianBundle build_laplacian(const TopologyGraph& topology,
                                bool include_virtual_leader) {
  const int n = topology.size();
  const int node0 = include_virtual_leader ? 0 : 1;
  const int nodes = n + 1 - node0;

  std::vector<Edge> kept;
  for (const Edge& e : topology.edges())
    if (include_virtual_leader || e.informed >= 1) kept.push_back(e);

  UnionFind uf(nodes);
  for (const Edge& e : kept) uf.unite(e.follower - node0, e.informed - node0);
  const int root = uf.find(0);
  for (int v = 1; v < nodes; ++v) {
    if (uf.find(v) != root) {
      std::ostringstream msg;
      msg << "disconnected graph: component containing node";
      for (int u = 0; u < nodes; ++u)
        if (uf.find(u) == uf.find(v)) msg << ' ' << (u + node0);
      msg << " is isolated";
      throw StabilityError(msg.str());
    }
  }

  const int m = static_cast<int>(kept.size());
  LaplacianBundle bundle;
  bundle.includes_leader = include_virtual_leader;
  bundle.incidence = Mat::Zero(nodes, m);
  bundle.weights = Vec::Zero(m);
  for (int k = 0; k < m; ++k) {
    bundle.incidence(kept[k].follower - node0, k) = 1.0;
    bundle.incidence(kept[k].informed - node0, k) = -1.0;
    bundle.weights[k] = kept[k].weight;
  }
  bundle.laplacian = bundle.incidence * bundle.weights.asDiagonal() *
                     bundle.incidence.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> solver(bundle.laplacian);
  bundle.sigma2 = nodes >= 2 ? solver.eigenvalues()[1] : 0.0;
  return bundle;
}

StabilityReport internal_stability(const TrajectoryTable& table,
                                   double threshold) {
  const int m = table.samples();
  const int n = table.vehicles();
  if (m < 2) throw StabilityError("trajectory table too short");

  StabilityReport report;
  report.threshold = threshold;
  report.horizon = table.t[m - 1];
  report.vehicles.resize(n);
  bool all = true;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    VehicleConvergence& v = report.vehicles[i];
    v.terminal_error = std::abs(table.e(m - 1, i));
    int last_above = -1;
    for (int k = m - 1; k >= 0; --k) {
      if (std::abs(table.e(k, i)) >= threshold) {
        last_above = k;
        break;
      }
    }
    if (last_above == m - 1) {
      v.converged = false;
      all = false;
    } else {
      v.converged = true;
      v.time = last_above < 0 ? 0.0 : table.t[last_above + 1];
      sum += v.time;
    }
  }
  report.all_converged = all;
  report.mean_time = all ? sum / n : 0.0;
  return report;
}

StringStabilityReport string_stability_pf(const Vec& e0,
                                          const std::vector<double>& weights) {
  const int n = static_cast<int>(e0.size());
  if (static_cast<int>(weights.size()) != n)
    throw StabilityError("one weight per vehicle expected");
  StringStabilityReport report;
  report.all_pass = true;
  for (int i = 2; i <= n; ++i) {
    StringStabilityPair pair;
    pair.follower = i;
    pair.homogeneous = weights[i - 1] == weights[i - 2];
    if (e0[i - 2] == 0.0) {
      pair.degenerate = true;
    } else {
      pair.ratio = e0[i - 1] / e0[i - 2];
      pair.pass = std::abs(pair.ratio) <= 1.0 + 1e-12;
      if (!pair.pass) report.all_pass = false;
    }
    report.pairs.push_back(pair);
  }
  return report;
}

StringStabilityReport string_stability_pf(const Scenario& scenario) {
  if (scenario.topology.kind() != TopologyKind::PF)
    throw StabilityError("string stability check applies to PF topologies");
  const Vec e0 = relative_initial(scenario).y + scenario.d;
  std::vector<double> weights;
  for (int i = 1; i <= scenario.n; ++i)
    weights.push_back(scenario.topology.neighbors(i).front().weight);
  return string_stability_pf(e0, weights);
}

}  // namespace platoon::stability
