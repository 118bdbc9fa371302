// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The platoon-games authors
//
// End-to-end acceptance suite: one pass/fail line per criterion, exit 0
// only when every criterion holds.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "platoon/closed_form.hpp"
#include "platoon/general_game.hpp"
#include "platoon/matfun.hpp"
#include "platoon/mpc.hpp"
#include "platoon/oracle.hpp"
#include "platoon/scenario_io.hpp"
#include "platoon/stability.hpp"
#include "test_helpers.hpp"

#ifndef PLATOON_SCENARIO_DIR
#define PLATOON_SCENARIO_DIR "scenarios"
#endif

using namespace platoon;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str());
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

struct Bundle {
  std::string name;
  Scenario scenario;
  TrajectoryTable table;  // analytic route, 1001 samples
  oracle::OdeRun run;     // shooting oracle, 2000 steps
  double solve_seconds = 0.0;
};

std::vector<Bundle> load_bundles() {
  const std::vector<std::string> names = {"pf_s1", "pf_s2", "tpf_s3",
                                          "tpf_s4", "apf", "lf"};
  std::vector<Bundle> out;
  for (const std::string& name : names) {
    Scenario scenario =
        io::parse_scenario(std::string(PLATOON_SCENARIO_DIR) + "/" + name +
                           ".cfg")
            .scenario;
    const auto start = std::chrono::steady_clock::now();
    io::SimulateResult sim = io::simulate(scenario, 1001);
    oracle::OdeRun run = oracle::solve_bvp(scenario, 2000);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (sim.oracle_fallback)
      throw std::runtime_error("unexpected fallback on " + name);
    out.push_back(Bundle{name, std::move(scenario), std::move(sim.table),
                         std::move(run), seconds});
  }
  return out;
}

double aligned_discrepancy(const Bundle& b) {
  double worst = 0.0;
  for (int k = 0; k < b.table.samples(); ++k)
    worst = std::max(
        worst, (b.table.y.row(k) - b.run.y.row(2 * k)).cwiseAbs().maxCoeff());
  return worst;
}

void criterion_1_2_3(const std::vector<Bundle>& bundles) {
  double worst_traj = 0.0, worst_time = 0.0;
  std::string worst_name;
  for (const Bundle& b : bundles) {
    const double d = aligned_discrepancy(b);
    if (d > worst_traj) {
      worst_traj = d;
      worst_name = b.name;
    }
    worst_time = std::max(worst_time, b.solve_seconds);
  }
  report(1, worst_traj < 1e-7 && worst_time < 1.0,
         "closed form vs oracle: worst max-abs " + fmt(worst_traj) + " (" +
             worst_name + "), worst runtime " + fmt(worst_time) + " s");

  double worst_lam = 0.0;
  for (const Bundle& b : bundles) {
    const double analytic =
        b.table.u.row(b.table.samples() - 1).cwiseAbs().maxCoeff();
    const double integrated = b.run.lambda_final().cwiseAbs().maxCoeff();
    worst_lam = std::max({worst_lam, analytic, integrated});
  }
  report(2, worst_lam < 1e-8,
         "terminal costate max-norm " + fmt(worst_lam) + " (tol 1e-8)");

  bool certified = true;
  double worst_margin = 0.0;
  for (const Bundle& b : bundles) {
    for (int i = 1; i <= b.scenario.n; ++i) {
      const oracle::DeviationReport r =
          oracle::certify_nash(b.scenario, b.table, i);
      certified = certified && r.certified;
      worst_margin = std::min(worst_margin, r.min_delta);
    }
  }
  const Bundle& s1 = bundles.front();
  const InfoMatrix info = build_info_matrix(s1.scenario);
  const Vec y0 = relative_initial(s1.scenario).y;
  const Vec lam0 = oracle::shoot_lambda0(info, y0, s1.scenario.t_f);
  const oracle::OdeRun corrupted_run = oracle::integrate_forward(
      info, y0, 1.1 * lam0, s1.scenario.t_f, 2000);
  const TrajectoryTable corrupted =
      oracle::to_table(corrupted_run, s1.scenario.d);
  double corrupted_min = 0.0;
  for (int i = 1; i <= s1.scenario.n; ++i)
    corrupted_min = std::min(
        corrupted_min,
        oracle::certify_nash(s1.scenario, corrupted, i).min_delta);
  report(3, certified && corrupted_min < -1e-4,
         "equilibria certified (worst dJ " + fmt(worst_margin) +
             "); corrupted solution rejected (min dJ " + fmt(corrupted_min) +
             ")");
}

void criterion_4(const std::vector<Bundle>& bundles) {
  const std::map<std::string, double> targets = {{"pf_s1", 0.1732},
                                                 {"tpf_s3", 0.5762},
                                                 {"apf", 0.6528},
                                                 {"lf", 0.0199}};
  std::map<std::string, double> with_leader;
  bool all_rows = true;
  std::string detail;
  for (const Bundle& b : bundles) {
    if (!targets.count(b.name)) continue;
    const double s2l =
        stability::build_laplacian(b.scenario.topology, true).sigma2;
    const double s2v =
        stability::build_laplacian(b.scenario.topology, false).sigma2;
    with_leader[b.name] = s2l;
    const double target = targets.at(b.name);
    const bool match =
        std::abs(s2l - target) < 5e-3 || std::abs(s2v - target) < 5e-3;
    if (!match) {
      all_rows = false;
      detail += b.name + " computed " + fmt(s2l) + "/" + fmt(s2v) +
                " vs " + fmt(target) + " (documented deviation); ";
    }
  }
  if (all_rows) {
    report(4, true, "all four Fiedler rows match within 5e-3");
    return;
  }
  const bool ordering = with_leader["apf"] > with_leader["tpf_s3"] &&
                        with_leader["tpf_s3"] > with_leader["pf_s1"] &&
                        with_leader["pf_s1"] > with_leader["lf"];
  report(4, ordering,
         detail + "ordering apf > tpf > pf > lf " +
             (ordering ? "holds" : "BROKEN"));
}

void criterion_5_6(const std::vector<Bundle>& bundles) {
  const auto mean_of = [](const io::ConvergenceMeasurement& m) {
    return m.extended ? m.extended->mean_time
                      : m.at_scenario_horizon.mean_time;
  };
  struct Row {
    const char* name;
    double target;
    double tol;
  };
  const Row rows[] = {{"pf_s1", 6.8, 0.5},
                      {"tpf_s3", 3.9, 0.5},
                      {"apf", 4.1, 0.5},
                      {"tpf_s4", 8.9, 0.7}};
  bool pass = true;
  std::string detail;
  std::map<std::string, const Bundle*> by_name;
  for (const Bundle& b : bundles) by_name[b.name] = &b;
  for (const Row& row : rows) {
    const io::ConvergenceMeasurement m =
        io::measure_convergence(by_name.at(row.name)->scenario);
    const double mean = mean_of(m);
    const bool ok = (m.extended ? m.extended->all_converged
                                : m.at_scenario_horizon.all_converged) &&
                    std::abs(mean - row.target) <= row.tol;
    pass = pass && ok;
    detail += std::string(row.name) + " " + fmt(mean) + "; ";
  }
  const io::ConvergenceMeasurement lf_m =
      io::measure_convergence(by_name.at("lf")->scenario);
  const bool lf_unconverged = !lf_m.at_scenario_horizon.all_converged;
  const double lf_mean = lf_m.extended ? lf_m.extended->mean_time : -1.0;
  const bool lf_ok = lf_unconverged && lf_m.extended &&
                     lf_m.extended->all_converged &&
                     std::abs(lf_mean - 20.4) <= 1.5;
  pass = pass && lf_ok;
  report(5, pass,
         "mean settle times: " + detail + "lf unconverged at t_f then " +
             fmt(lf_mean) + " extended");

  const io::ConvergenceMeasurement s2 =
      io::measure_convergence(by_name.at("pf_s2")->scenario);
  const stability::StabilityReport& r =
      s2.extended ? *s2.extended : s2.at_scenario_horizon;
  const bool ok6 = r.vehicles[2].converged && r.vehicles[3].converged &&
                   r.vehicles[2].time < r.vehicles[3].time;
  report(6, ok6,
         "scenario 2: vehicle 3 settles at " + fmt(r.vehicles[2].time) +
             " s < vehicle 4 at " + fmt(r.vehicles[3].time) + " s");
}

void criterion_7(const std::vector<Bundle>& bundles) {
  double worst = 0.0;
  for (const Bundle& b : bundles) {
    if (b.scenario.topology.kind() != TopologyKind::PF) continue;
    const PfSolution pf = solve_pf(b.scenario);
    const GeneralSolution gen = solve_general(b.scenario);
    // TPF machinery with zero V2V weights reduces to the same platoon.
    std::vector<double> w;
    for (int i = 1; i <= b.scenario.n; ++i)
      w.push_back(b.scenario.topology.neighbors(i).front().weight);
    const Scenario tpf_sc = Scenario::make(
        b.scenario.t_f, b.scenario.x0, b.scenario.d,
        TopologyGraph::tpf(w, std::vector<double>(b.scenario.n - 2, 0.0)));
    const TpfSolution tpf = solve_tpf(tpf_sc);
    for (int k = 0; k <= 1000; ++k) {
      const double t = b.scenario.t_f * k / 1000.0;
      const Vec y = pf.y_at(t);
      worst = std::max(worst, (gen.y_at(t) - y).cwiseAbs().maxCoeff());
      worst = std::max(worst, (tpf.y_at(t) - y).cwiseAbs().maxCoeff());
    }
  }
  report(7, worst < 1e-8,
         "pf reduction identity: worst max-abs " + fmt(worst));
}

void criterion_8(const std::vector<Bundle>& bundles) {
  const Scenario& sc = bundles.front().scenario;
  const PfSolution pf = solve_pf(sc);
  const auto defect = [&](int steps) {
    const oracle::OdeRun run = oracle::solve_bvp(sc, steps);
    double worst = 0.0;
    for (int k = 0; k <= steps; ++k)
      worst = std::max(worst, (run.y.row(k).transpose() - pf.y_at(run.t[k]))
                                  .cwiseAbs()
                                  .maxCoeff());
    return worst;
  };
  const double coarse = defect(1000);
  const double fine = defect(2000);
  const double ratio = coarse / fine;
  report(8, ratio >= 8.0,
         "rk4 order: defect " + fmt(coarse) + " -> " + fmt(fine) +
             ", ratio " + fmt(ratio));
}

void criterion_9() {
  bool converged = true;
  bool ordering = true;
  std::string detail;
  for (const char* name : {"compare_pf", "compare_tpf"}) {
    const io::ParsedScenario parsed = io::parse_scenario(
        std::string(PLATOON_SCENARIO_DIR) + "/" + name + ".cfg");
    const io::SimulateResult game =
        io::simulate(parsed.scenario, 1501, io::Solver::Auto);
    const TrajectoryTable mpc_table = mpc::mpc_rollout(
        parsed.scenario, parsed.mpc.value_or(mpc::MpcConfig{}));
    const double game_effort = io::control_effort(game.table);
    const double mpc_effort = io::control_effort(mpc_table);
    const double game_e =
        game.table.e.row(game.table.samples() - 1).cwiseAbs().maxCoeff();
    const double mpc_e =
        mpc_table.e.row(mpc_table.samples() - 1).cwiseAbs().maxCoeff();
    converged = converged && game_e < 0.05 && mpc_e < 0.05;
    ordering = ordering && game_effort < mpc_effort;
    detail += std::string(name) + ": game " + fmt(game_effort) + " vs mpc " +
              fmt(mpc_effort) + ", terminal |e| " + fmt(game_e) + "/" +
              fmt(mpc_e) + "; ";
  }
  report(9, converged && ordering,
         detail + (ordering ? "game effort lower"
                            : "game effort NOT lower than mpc"));
}

void criterion_10() {
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  std::uniform_real_distribution<double> time(0.0, 4.0);
  bool sos = true, hyp = true, tri = true, reassembly = true;
  for (int trial = 0; trial < 120; ++trial) {
    const Mat A = testutil::random_lower_triangular(5);
    const matfun::EigenFactorization ef = matfun::eig_lower_triangular(A);
    const auto [C, S] = matfun::hyp_pair(ef, time(testutil::rng()));
    hyp = hyp && (C * C - A * S * S - Mat::Identity(5, 5))
                         .cwiseAbs()
                         .maxCoeff() < 1e-9;
    reassembly = reassembly &&
                 (ef.V * ef.delta.asDiagonal() * ef.Vinv - A).norm() <
                     1e-9 * A.norm();
    const Mat X = matfun::tri_inverse(A);
    tri = tri && (A * X - Mat::Identity(5, 5)).cwiseAbs().maxCoeff() <
                     1e-12 * 5;

    // Weighted SOS identity on a random rearward topology.
    std::vector<Edge> edges;
    std::uniform_real_distribution<double> weight(0.1, 2.0);
    for (int i = 1; i <= 5; ++i) {
      std::uniform_int_distribution<int> informed(0, i - 1);
      edges.push_back({i, informed(testutil::rng()), weight(testutil::rng())});
    }
    const TopologyGraph g = TopologyGraph::custom(5, edges);
    const stability::LaplacianBundle bundle =
        stability::build_laplacian(g, true);
    Vec x(6);
    for (int i = 0; i < 6; ++i) x[i] = pos(testutil::rng());
    double direct = 0.0;
    for (const Edge& e : g.edges()) {
      const double diff = x[e.follower] - x[e.informed];
      direct += e.weight * diff * diff;
    }
    sos = sos && std::abs(direct - x.dot(bundle.laplacian * x)) <=
                     1e-10 * (1.0 + std::abs(direct));
  }
  report(10, sos && hyp && tri && reassembly,
         std::string("randomized suites over 120 instances: sos ") +
             (sos ? "ok" : "FAIL") + ", hyperbolic identity " +
             (hyp ? "ok" : "FAIL") + ", triangular inverse " +
             (tri ? "ok" : "FAIL") + ", eigen reassembly " +
             (reassembly ? "ok" : "FAIL"));
}

}  // namespace

int main() {
  try {
    const std::vector<Bundle> bundles = load_bundles();
    criterion_1_2_3(bundles);
    criterion_4(bundles);
    criterion_5_6(bundles);
    criterion_7(bundles);
    criterion_8(bundles);
    criterion_9();
    criterion_10();
  } catch (const std::exception& err) {
    std::cerr << "acceptance suite aborted: " << err.what() << "\n";
    return 2;
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failing\n", failures);
    return 1;
  }
  std::printf("all criteria pass\n");
  return 0;
}
