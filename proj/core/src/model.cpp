// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The platoon-games authors

#include "platoon/model.hpp"

#include <algorithm>
#include <sstream>

namespace platoon {

std::string to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::PF: return "pf";
    case TopologyKind::TPF: return "tpf";
    case TopologyKind::APF: return "apf";
    case TopologyKind::LF: return "lf";
    case TopologyKind::Custom: return "custom";
  }
  return "custom";
}

TopologyGraph::TopologyGraph(TopologyKind kind, int n, std::vector<Edge> edges)
    : kind_(kind), n_(n), edges_(std::move(edges)) {
  if (n_ < 1) throw ModelError("topology needs at least one vehicle");
  neighbor_sets_.resize(n_ + 1);
  for (const Edge& e : edges_) {
    if (e.follower < 1 || e.follower > n_)
      throw ModelError("edge follower index out of range");
    if (e.informed < 0 || e.informed >= e.follower) {
      std::ostringstream msg;
      msg << "rearward links only (j < i): edge " << e.follower << " -> "
          << e.informed;
      throw ModelError(msg.str());
    }
    if (e.weight < 0.0) throw ModelError("negative link weight");
    neighbor_sets_[e.follower].push_back(e);
  }
  for (int i = 1; i <= n_; ++i) {
    if (neighbor_sets_[i].empty()) {
      std::ostringstream msg;
      msg << "vehicle " << i << " has no information link";
      throw ModelError(msg.str());
    }
    if (row_sum(i) <= 0.0) {
      std::ostringstream msg;
      msg << "vehicle " << i << " has zero total link weight";
      throw ModelError(msg.str());
    }
  }
}

TopologyGraph TopologyGraph::pf(const std::vector<double>& weights) {
  const int n = static_cast<int>(weights.size());
  std::vector<Edge> edges;
  edges.reserve(weights.size());
  for (int i = 1; i <= n; ++i) {
    if (weights[i - 1] <= 0.0)
      throw ModelError("pf weights must be strictly positive");
    edges.push_back({i, i - 1, weights[i - 1]});
  }
  return TopologyGraph(TopologyKind::PF, n, std::move(edges));
}

TopologyGraph TopologyGraph::tpf(const std::vector<double>& weights,
                                 const std::vector<double>& v2v_weights) {
  const int n = static_cast<int>(weights.size());
  const int expected_v2v = std::max(0, n - 2);
  if (static_cast<int>(v2v_weights.size()) != expected_v2v)
    throw ModelError("tpf expects one v2v weight per vehicle 3..n");
  std::vector<Edge> edges;
  for (int i = 1; i <= n; ++i) {
    const double w = weights[i - 1];
    const double wt = (i >= 3) ? v2v_weights[i - 3] : 0.0;
    if (w < 0.0 || wt < 0.0) throw ModelError("negative link weight");
    if (w + wt <= 0.0)
      throw ModelError("tpf vehicle needs positive total weight");
    if (i < 3 && w <= 0.0)
      throw ModelError("tpf vehicles 1..2 need a positive sensor weight");
    edges.push_back({i, i - 1, w});
    if (i >= 3) edges.push_back({i, i - 2, wt});
  }
  return TopologyGraph(TopologyKind::TPF, n, std::move(edges));
}

TopologyGraph TopologyGraph::custom(int n, std::vector<Edge> edges,
                                    TopologyKind kind) {
  return TopologyGraph(kind, n, std::move(edges));
}

const std::vector<Edge>& TopologyGraph::neighbors(int i) const {
  if (i < 1 || i > n_) throw ModelError("vehicle index out of range");
  return neighbor_sets_[i];
}

double TopologyGraph::row_sum(int i) const {
  double s = 0.0;
  for (const Edge& e : neighbor_sets_[i]) s += e.weight;
  return s;
}

Scenario Scenario::make(double t_f, const Vec& x0, const Vec& d,
                        TopologyGraph topology) {
  const int n = topology.size();
  if (n < 1) throw ModelError("need n >= 1 vehicles");
  if (t_f <= 0.0) throw ModelError("terminal time must be positive");
  if (x0.size() != n + 1)
    throw ModelError("x0 must list the leader plus all n vehicles");
  if (d.size() != n) throw ModelError("d must list one policy per vehicle");
  for (int i = 0; i < n; ++i) {
    if (!(x0[i] > x0[i + 1])) throw ModelError("initial ordering violated");
    if (!(d[i] < 0.0))
      throw ModelError("distancing policy must be negative");
  }
  return Scenario{n, t_f, x0, d, std::move(topology), 0.0};
}

RelativeState relative_initial(const Scenario& scenario) {
  Vec y(scenario.n);
  for (int i = 0; i < scenario.n; ++i)
    y[i] = scenario.x0[i + 1] - scenario.x0[i];
  return RelativeState{std::move(y)};
}

}  // namespace platoon
