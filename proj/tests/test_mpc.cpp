// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The platoon-games authors

#include <doctest.h>

#include <cmath>
#include <random>

#include "platoon/mpc.hpp"
#include "test_helpers.hpp"

using namespace platoon;
using namespace platoon::mpc;

TEST_SUITE("mpc") {

TEST_CASE("single-vehicle Q matrix, entry by entry") {
  const Scenario sc = Scenario::make(10.0, testutil::vec({1.0, 0.5}),
                                     testutil::vec({-0.25}),
                                     TopologyGraph::pf({1.0}));
  const QMatrix q = build_q(sc, 1);
  Mat expected(3, 3);
  expected << 1.0, -1.0, 0.25, -1.0, 1.0, -0.25, 0.25, -0.25, 0.0625;
  CHECK((q.Q - expected).cwiseAbs().maxCoeff() < 1e-14);
  // The quadratic form must expand the gap penalty exactly.
  const Vec x = testutil::vec({0.3, -0.6, 1.0});
  const double gap = x[1] - x[0] - 0.25;
  CHECK(x.dot(q.Q * x) == doctest::Approx(gap * gap).epsilon(1e-13));
}

TEST_CASE("all-zero weights give a zero Q") {
  const QMatrix q =
      build_q({{1, 0, 0.0}}, 1, testutil::vec({-0.25}), 1);
  CHECK(q.Q.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("quadratic identity on the tpf platoon") {
  const Scenario sc = testutil::tpf_s3();
  std::uniform_real_distribution<double> pos(-4.0, 6.0);
  for (int player = 1; player <= sc.n; ++player) {
    const QMatrix q = build_q(sc, player);
    for (int trial = 0; trial < 50; ++trial) {
      Vec x(sc.n + 2);
      for (int i = 0; i <= sc.n; ++i) x[i] = pos(testutil::rng());
      x[sc.n + 1] = 1.0;
      double direct = 0.0;
      for (const Edge& e : sc.topology.neighbors(player)) {
        double target = 0.0;
        for (int k = e.informed + 1; k <= player; ++k)
          target -= sc.d[k - 1];
        const double gap = x[player] - x[e.informed] - target;
        direct += e.weight * gap * gap;
      }
      CHECK(std::abs(x.dot(q.Q * x) - direct) <=
            1e-10 * (1.0 + std::abs(direct)));
    }
  }
}

TEST_CASE("Q is positive semidefinite on random extended states") {
  const Scenario sc = testutil::apf();
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  for (int player = 1; player <= sc.n; ++player) {
    const QMatrix q = build_q(sc, player);
    for (int trial = 0; trial < 50; ++trial) {
      Vec x(sc.n + 2);
      for (int i = 0; i < sc.n + 2; ++i) x[i] = pos(testutil::rng());
      CHECK(x.dot(q.Q * x) >= -1e-10);
    }
  }
}

TEST_CASE("prediction stack shapes and input vectors") {
  const MpcConfig config{5, 0.1};
  const PredictionStack stack = build_prediction(3, config);
  REQUIRE(stack.b_hat.size() == 3);
  // Vehicle 2's input moves vehicles 2..3 and never the trailing slot.
  const Vec& b2 = stack.b_hat[1];
  CHECK(b2[0] == 0.0);
  CHECK(b2[1] == 0.0);
  CHECK(b2[2] == doctest::Approx(0.1));
  CHECK(b2[3] == doctest::Approx(0.1));
  CHECK(b2[4] == 0.0);
  CHECK(stack.A_pred.rows() == 5 * 5);
  CHECK(stack.B[0].rows() == 25);
  CHECK(stack.B[0].cols() == 5);
  // Block column c repeats b_hat from block row c downward.
  CHECK(stack.B[1].block(2 * 5, 1, 5, 1).isApprox(b2));
  CHECK(stack.B[1].block(0, 1, 5, 1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hand-evaluated single-step law") {
  const Scenario sc = Scenario::make(10.0, testutil::vec({1.0, 0.5}),
                                     testutil::vec({-0.25}),
                                     TopologyGraph::pf({1.0}));
  const QMatrix q = build_q(sc, 1);
  const PredictionStack stack = build_prediction(1, MpcConfig{1, 1.0});
  const Vec x = testutil::vec({0.0, -0.5, 1.0});
  const std::vector<Vec> seq = mpc_step(stack, {q}, x);
  REQUIRE(seq.size() == 1);
  REQUIRE(seq[0].size() == 1);
  CHECK(seq[0][0] == doctest::Approx(0.375).epsilon(1e-12));

  // Independent check: scan the one-step cost for its minimizer.
  const auto cost = [&](double u) {
    Vec xn = x;
    xn[1] += u;
    return xn.dot(q.Q * xn) + u * u;
  };
  double best_u = 0.0, best = cost(0.0);
  for (double u = -1.0; u <= 1.0; u += 1e-4) {
    if (cost(u) < best) {
      best = cost(u);
      best_u = u;
    }
  }
  CHECK(best_u == doctest::Approx(0.375).epsilon(1e-3));
}

TEST_CASE("exact formation produces zero controls") {
  const Scenario sc = testutil::compare_pf();
  std::vector<QMatrix> q;
  for (int i = 1; i <= sc.n; ++i) q.push_back(build_q(sc, i));
  const PredictionStack stack = build_prediction(sc.n, MpcConfig{5, 0.1});
  // Formation state: every gap at its target x_i - x_{i-1} = 0.25.
  Vec x(sc.n + 2);
  x[0] = 0.0;
  for (int i = 1; i <= sc.n; ++i) x[i] = x[i - 1] + 0.25;
  x[sc.n + 1] = 1.0;
  for (int step = 0; step < 10; ++step) {
    const std::vector<Vec> seq = mpc_step(stack, q, x);
    for (int i = 0; i < sc.n; ++i) {
      CHECK(seq[i].cwiseAbs().maxCoeff() < 1e-12);
      x += stack.b_hat[i] * seq[i][0];
    }
    CHECK(x[sc.n + 1] == 1.0);
  }
}

TEST_CASE("per-player optimality of the printed law") {
  const Scenario sc = testutil::compare_tpf();
  std::vector<QMatrix> q;
  for (int i = 1; i <= sc.n; ++i) q.push_back(build_q(sc, i));
  const PredictionStack stack = build_prediction(sc.n, MpcConfig{5, 0.1});
  Vec x(sc.n + 2);
  x.head(sc.n + 1) = sc.x0;
  x[sc.n + 1] = 1.0;
  const std::vector<Vec> seq = mpc_step(stack, q, x);

  const auto stage_cost = [&](int i, const Vec& U) {
    const Vec X = stack.A_pred * x + stack.B[i] * U;
    double acc = x.dot(q[i].Q * x) + U.squaredNorm();
    for (int r = 0; r < stack.horizon; ++r) {
      const Vec xr = X.segment(r * (sc.n + 2), sc.n + 2);
      acc += xr.dot(q[i].Q * xr);
    }
    return acc;
  };
  std::uniform_real_distribution<double> amp(-0.5, 0.5);
  for (int i = 0; i < sc.n; ++i) {
    const double at_opt = stage_cost(i, seq[i]);
    CHECK(at_opt <= stage_cost(i, Vec::Zero(stack.horizon)) + 1e-12);
    for (int trial = 0; trial < 20; ++trial) {
      Vec U(stack.horizon);
      for (int k = 0; k < stack.horizon; ++k)
        U[k] = seq[i][k] + amp(testutil::rng());
      CHECK(at_opt <= stage_cost(i, U) + 1e-12);
    }
  }
}

TEST_CASE("three-vehicle rollout settles within tolerance") {
  const Scenario sc = testutil::compare_pf();
  const TrajectoryTable table = mpc_rollout(sc, MpcConfig{5, 0.1});
  CHECK(table.samples() == 151);
  CHECK(table.e.row(150).cwiseAbs().maxCoeff() < 0.05);
  // Controls head to zero as the formation locks in.
  CHECK(table.u.row(149).cwiseAbs().maxCoeff() <
        0.05 * table.u.row(0).cwiseAbs().maxCoeff());
}

TEST_CASE("sampling-time refinement with a fixed prediction window") {
  for (const Scenario& sc : {testutil::compare_pf(), testutil::compare_tpf()}) {
    const TrajectoryTable coarse = mpc_rollout(sc, MpcConfig{5, 0.1});
    const TrajectoryTable fine = mpc_rollout(sc, MpcConfig{10, 0.05});
    const double e_coarse =
        coarse.e.row(coarse.samples() - 1).cwiseAbs().maxCoeff();
    const double e_fine = fine.e.row(fine.samples() - 1).cwiseAbs().maxCoeff();
    CHECK(std::abs(e_fine - e_coarse) < 0.10 * e_coarse);
  }
}

TEST_CASE("divergence guard trips when an unobserved gap blows up") {
  // Vehicle 2 only watches the leader, so closing that long chain drags
  // its own (initially settled) gap far past the guard band.
  const TopologyGraph skipping =
      TopologyGraph::custom(2, {{1, 0, 1.0}, {2, 0, 1.0}});
  const Scenario sc =
      Scenario::make(15.0, testutil::vec({0.0, -15.0, -15.105}),
                     testutil::vec({-0.1, -0.1}), skipping);
  CHECK_THROWS_AS(mpc_rollout(sc, MpcConfig{5, 0.1}), MpcError);
}

TEST_CASE("rollout horizon truncates to whole samples") {
  Scenario sc = testutil::compare_pf();
  sc.t_f = 1.04;
  const TrajectoryTable table = mpc_rollout(sc, MpcConfig{5, 0.1});
  CHECK(table.samples() == 11);
  CHECK(table.t[10] == doctest::Approx(1.0));
}

}  // TEST_SUITE
