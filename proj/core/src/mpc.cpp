// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The platoon-games authors

#include "platoon/mpc.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <random>

namespace platoon::mpc {

namespace {

double direct_cost(const std::vector<Edge>& edges, const Vec& d, int player,
                   const Vec& x_ext) {
  double acc = 0.0;
  for (const Edge& e : edges) {
    if (e.follower != player) continue;
    double gap_target = 0.0;
    for (int k = e.informed + 1; k <= e.follower; ++k)
      gap_target -= d[k - 1];
    const double gap = x_ext[e.follower] - x_ext[e.informed] - gap_target;
    acc += e.weight * gap * gap;
  }
  return acc;
}

}  // namespace

QMatrix build_q(const std::vector<Edge>& edges, int n, const Vec& d,
                int player) {
  if (player < 1 || player > n) throw MpcError("player index out of range");
  const int m = static_cast<int>(edges.size());
  Mat D = Mat::Zero(n + 1, m);
  Vec w_i = Vec::Zero(m);
  Vec target = Vec::Zero(m);
  for (int k = 0; k < m; ++k) {
    const Edge& e = edges[k];
    D(e.follower, k) = 1.0;
    D(e.informed, k) = -1.0;
    if (e.follower == player) w_i[k] = e.weight;
    for (int v = e.informed + 1; v <= e.follower; ++v)
      target[k] -= d[v - 1];
  }
  const Mat L = D * w_i.asDiagonal() * D.transpose();
  const Vec border = D * w_i.asDiagonal() * target;

  QMatrix q;
  q.player = player;
  q.Q = Mat::Zero(n + 2, n + 2);
  q.Q.topLeftCorner(n + 1, n + 1) = L;
  q.Q.topRightCorner(n + 1, 1) = -border;
  q.Q.bottomLeftCorner(1, n + 1) = -border.transpose();
  q.Q(n + 1, n + 1) = target.dot(w_i.asDiagonal() * target);

  // Spot check the quadratic identity on a handful of random states.
  std::mt19937 rng(12345u + static_cast<unsigned>(player));
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  for (int trial = 0; trial < 10; ++trial) {
    Vec x(n + 2);
    for (int i = 0; i <= n; ++i) x[i] = pos(rng);
    x[n + 1] = 1.0;
    const double lhs = x.dot(q.Q * x);
    const double rhs = direct_cost(edges, d, player, x);
    if (std::abs(lhs - rhs) > 1e-9 * (1.0 + std::abs(rhs)))
      throw MpcError("quadratic cost identity violated");
  }
  return q;
}

QMatrix build_q(const Scenario& scenario, int player) {
  return build_q(scenario.topology.edges(), scenario.n, scenario.d, player);
}

PredictionStack build_prediction(int n, const MpcConfig& config) {
  if (config.horizon < 1) throw MpcError("horizon must be at least 1");
  if (config.sample_time <= 0.0) throw MpcError("sample time must be positive");
  const int N = config.horizon;
  const int dim = n + 2;

  PredictionStack stack;
  stack.n = n;
  stack.horizon = N;
  stack.sample_time = config.sample_time;
  stack.A_pred = Mat::Zero(N * dim, dim);
  for (int r = 0; r < N; ++r)
    stack.A_pred.block(r * dim, 0, dim, dim) = Mat::Identity(dim, dim);

  for (int i = 1; i <= n; ++i) {
    Vec b = Vec::Zero(dim);
    for (int slot = i; slot <= n; ++slot) b[slot] = 1.0;
    stack.b_hat.push_back(config.sample_time * b);
    Mat B = Mat::Zero(N * dim, N);
    for (int r = 0; r < N; ++r)
      for (int c = 0; c <= r; ++c)
        B.block(r * dim, c, dim, 1) = stack.b_hat.back();
    stack.B.push_back(std::move(B));
  }
  return stack;
}

std::vector<Vec> mpc_step(const PredictionStack& stack,
                          const std::vector<QMatrix>& q, const Vec& x_ext) {
  const int n = stack.n;
  const int N = stack.horizon;
  const int dim = n + 2;
  if (static_cast<int>(q.size()) != n)
    throw MpcError("need one Q matrix per player");
  if (x_ext.size() != dim || x_ext[dim - 1] != 1.0)
    throw MpcError("extended state must end with exactly 1");

  std::vector<Vec> controls;
  controls.reserve(n);
  const Vec ax = stack.A_pred * x_ext;
  for (int i = 0; i < n; ++i) {
    Mat phiB(N * dim, N);
    for (int r = 0; r < N; ++r)
      phiB.middleRows(r * dim, dim) =
          q[i].Q * stack.B[i].middleRows(r * dim, dim);
    const Mat M = Mat::Identity(N, N) + stack.B[i].transpose() * phiB;
    Vec rhs(N);
    for (int c = 0; c < N; ++c) {
      double acc = 0.0;
      for (int r = 0; r < N; ++r)
        acc += phiB.col(c).segment(r * dim, dim).dot(ax.segment(r * dim, dim));
      rhs[c] = acc;
    }
    controls.push_back(-M.ldlt().solve(rhs));
  }
  return controls;
}

TrajectoryTable mpc_rollout(const Scenario& scenario,
                            const MpcConfig& config) {
  const int n = scenario.n;
  const int dim = n + 2;
  const int steps =
      static_cast<int>(std::floor(scenario.t_f / config.sample_time + 1e-9));
  if (steps < 1) throw MpcError("rollout horizon shorter than one sample");

  std::vector<QMatrix> q;
  for (int i = 1; i <= n; ++i) q.push_back(build_q(scenario, i));
  const PredictionStack stack = build_prediction(n, config);

  Vec x(dim);
  x.head(n + 1) = scenario.x0;
  x[dim - 1] = 1.0;

  const Vec e0 = relative_initial(scenario).y + scenario.d;
  Vec guard(n);
  for (int i = 0; i < n; ++i)
    guard[i] = 10.0 * std::max(std::abs(e0[i]), 0.1);

  TrajectoryTable table;
  table.t = Vec::LinSpaced(steps + 1, 0.0, steps * config.sample_time);
  table.y.resize(steps + 1, n);
  table.e.resize(steps + 1, n);
  table.u = Mat::Zero(steps + 1, n);

  auto record = [&](int row) {
    for (int i = 0; i < n; ++i) {
      table.y(row, i) = x[i + 1] - x[i];
      table.e(row, i) = table.y(row, i) + scenario.d[i];
      if (std::abs(table.e(row, i)) > guard[i])
        throw MpcError("rollout diverged: spacing error grew past guard");
    }
  };
  record(0);
  for (int k = 0; k < steps; ++k) {
    const std::vector<Vec> seq = mpc_step(stack, q, x);
    for (int i = 0; i < n; ++i) {
      table.u(k, i) = seq[i][0];
      x += stack.b_hat[i] * seq[i][0];
    }
    record(k + 1);
  }
  return table;
}

}  // namespace platoon::mpc
