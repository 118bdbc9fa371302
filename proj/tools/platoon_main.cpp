// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The platoon-games authors

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "platoon/general_game.hpp"
#include "platoon/oracle.hpp"
#include "platoon/scenario_io.hpp"
#include "platoon/stability.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitUsage = 64;
constexpr int kExitFile = 66;

platoon::io::ParsedScenario load(const std::string& path) {
  return platoon::io::parse_scenario(path);
}

std::string plot_path_for(const std::string& csv_path) {
  const auto dot = csv_path.rfind('.');
  const std::string stem =
      (dot == std::string::npos || csv_path.find('/', dot) != std::string::npos)
          ? csv_path
          : csv_path.substr(0, dot);
  return stem + ".plot";
}

int run_simulate(const platoon::io::ParsedScenario& parsed,
                 const std::string& scenario_path,
                 const std::string& solver_name, int samples_override,
                 std::string out_path) {
  using namespace platoon;
  const auto solver = io::solver_from_name(solver_name);
  if (!solver) {
    std::cerr << "unknown solver '" << solver_name << "'\n";
    return kExitUsage;
  }
  const int samples =
      samples_override > 0 ? samples_override : parsed.samples;
  const io::SimulateResult result =
      io::simulate(parsed.scenario, samples, *solver, parsed.mpc);

  if (out_path.empty()) {
    const auto slash = scenario_path.rfind('/');
    const std::string base =
        slash == std::string::npos ? scenario_path : scenario_path.substr(slash + 1);
    const auto dot = base.rfind('.');
    out_path = (dot == std::string::npos ? base : base.substr(0, dot)) + ".csv";
  }
  std::ofstream csv(out_path, std::ios::binary);
  if (!csv) {
    std::cerr << "cannot write " << out_path << "\n";
    return kExitFile;
  }
  io::write_csv(csv, result.table);
  const std::string plot_path = plot_path_for(out_path);
  std::ofstream plot(plot_path, std::ios::binary);
  if (!plot) {
    std::cerr << "cannot write " << plot_path << "\n";
    return kExitFile;
  }
  io::write_plot_blocks(plot, result.table);

  std::cout << "solver: " << io::to_string(result.used);
  if (result.oracle_fallback)
    std::cout << " (near-degenerate spectrum, fell back to shooting oracle)";
  std::cout << "\nwrote " << out_path << " and " << plot_path << "\n";
  return kExitOk;
}

int run_validate(const platoon::io::ParsedScenario& parsed) {
  using namespace platoon;
  const Scenario& sc = parsed.scenario;

  const io::SimulateResult sim = io::simulate(sc, 1001, io::Solver::Auto);
  const oracle::OdeRun run = oracle::solve_bvp(sc, 2000);

  double traj = 0.0;
  for (int k = 0; k < sim.table.samples(); ++k)
    traj = std::max(traj,
                    (sim.table.y.row(k) - run.y.row(2 * k)).cwiseAbs().maxCoeff());
  const double lam_solver_tf =
      sim.table.u.row(sim.table.samples() - 1).cwiseAbs().maxCoeff();
  const double lam_oracle_tf = run.lambda_final().cwiseAbs().maxCoeff();
  const double lam0_gap =
      (-sim.table.u.row(0).transpose() - run.lambda.row(0).transpose())
          .cwiseAbs()
          .maxCoeff();

  bool ok = true;
  const auto row = [&](const std::string& name, double value, double tol,
                       bool pass) {
    ok = ok && pass;
    std::cout << std::left << std::setw(46) << name << std::scientific
              << std::setprecision(3) << std::setw(12) << value << "  tol "
              << std::setw(10) << tol << (pass ? "  ok" : "  FAIL") << "\n";
  };
  if (sim.oracle_fallback)
    std::cout << "note: analytic route unavailable (near-degenerate "
                 "spectrum); comparing two oracle runs\n";
  row("solver |lambda(t_f)|", lam_solver_tf, 1e-8, lam_solver_tf < 1e-8);
  row("oracle |lambda(t_f)| after shooting", lam_oracle_tf, 1e-8,
      lam_oracle_tf < 1e-8);
  row("trajectory max |solver - oracle|", traj, 1e-7, traj < 1e-7);
  std::cout << std::left << std::setw(46) << "lambda(0) solver vs shooting"
            << std::scientific << std::setprecision(3) << lam0_gap << "\n";

  for (int i = 1; i <= sc.n; ++i) {
    const oracle::DeviationReport report =
        oracle::certify_nash(sc, sim.table, i);
    const double tol = -1e-6 * (1.0 + std::abs(report.baseline_cost));
    row("nash deviation player " + std::to_string(i) + " (min dJ)",
        report.min_delta, tol, report.certified);
  }
  std::cout << (ok ? "validation passed" : "validation FAILED") << "\n";
  return ok ? kExitOk : kExitValidation;
}

int run_stability(const platoon::io::ParsedScenario& parsed) {
  using namespace platoon;
  const Scenario& sc = parsed.scenario;

  for (const bool with_leader : {true, false}) {
    std::cout << "fiedler value sigma2 ("
              << (with_leader ? "with virtual leader" : "vehicles only")
              << "): ";
    try {
      const auto bundle =
          stability::build_laplacian(sc.topology, with_leader);
      std::cout << std::fixed << std::setprecision(4) << bundle.sigma2
                << "\n";
    } catch (const stability::StabilityError& err) {
      std::cout << "n/a (" << err.what() << ")\n";
    }
  }

  const io::ConvergenceMeasurement measured = io::measure_convergence(sc);
  const auto print_report = [&](const stability::StabilityReport& report) {
    std::cout << "  horizon t_f = " << std::defaultfloat << report.horizon
              << (report.extended_horizon ? " (extended re-solve)" : "")
              << "\n";
    for (int i = 0; i < static_cast<int>(report.vehicles.size()); ++i) {
      const auto& v = report.vehicles[i];
      std::cout << "  vehicle " << (i + 1) << ": ";
      if (v.converged)
        std::cout << std::fixed << std::setprecision(2) << v.time << " s\n";
      else
        std::cout << "not converged (terminal |e| = " << std::scientific
                  << std::setprecision(2) << v.terminal_error << ")\n";
      std::cout << std::defaultfloat << std::setprecision(6);
    }
    if (report.all_converged)
      std::cout << "  mean convergence time: " << std::fixed
                << std::setprecision(2) << report.mean_time << " s\n";
    std::cout << std::defaultfloat << std::setprecision(6);
  };
  std::cout << "convergence (threshold " << std::defaultfloat
            << measured.at_scenario_horizon.threshold << "):\n";
  print_report(measured.at_scenario_horizon);
  if (measured.extended) {
    std::cout << "not all vehicles settled at t_f = " << sc.t_f
              << "; re-solved with an extended horizon:\n";
    print_report(*measured.extended);
  }

  if (sc.topology.kind() == TopologyKind::PF) {
    const auto report = stability::string_stability_pf(sc);
    std::cout << "pf string-stability ratios |e_i(0)/e_{i-1}(0)|:\n";
    for (const auto& pair : report.pairs) {
      std::cout << "  pair (" << pair.follower - 1 << "," << pair.follower
                << "): ";
      if (pair.degenerate) {
        std::cout << "degenerate (zero predecessor error)\n";
        continue;
      }
      std::cout << std::fixed << std::setprecision(4)
                << std::abs(pair.ratio) << (pair.pass ? "  pass" : "  fail")
                << (pair.homogeneous ? "" : "  (inhomogeneous weights)")
                << "\n";
    }
  }
  return kExitOk;
}

int run_compare(const platoon::io::ParsedScenario& parsed) {
  using namespace platoon;
  const Scenario& sc = parsed.scenario;
  const mpc::MpcConfig config = parsed.mpc.value_or(mpc::MpcConfig{});

  const io::SimulateResult game = io::simulate(sc, 1501, io::Solver::Auto);
  const TrajectoryTable mpc_table = mpc::mpc_rollout(sc, config);

  const double game_effort = io::control_effort(game.table);
  const double mpc_effort = io::control_effort(mpc_table);
  const double game_terminal =
      game.table.e.row(game.table.samples() - 1).cwiseAbs().maxCoeff();
  const double mpc_terminal =
      mpc_table.e.row(mpc_table.samples() - 1).cwiseAbs().maxCoeff();

  std::cout << "game solver: " << io::to_string(game.used)
            << (game.oracle_fallback ? " (oracle fallback)" : "") << "\n";
  std::cout << "mpc: N = " << config.horizon << ", T_s = " << config.sample_time
            << "\n";
  std::cout << std::scientific << std::setprecision(4);
  std::cout << "control effort integral int sum u^2 dt:\n";
  std::cout << "  game " << game_effort << "\n  mpc  " << mpc_effort << "\n";
  std::cout << "terminal max |e_i|:\n";
  std::cout << "  game " << game_terminal << "\n  mpc  " << mpc_terminal
            << "\n";
  std::cout << "lower effort: " << (game_effort < mpc_effort ? "game" : "mpc")
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open-loop Nash platoon trajectories, stability analysis and "
               "an MPC baseline"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string solver_name = "auto";
  std::string out_path;
  int samples_override = 0;

  auto* sim = app.add_subcommand("simulate", "Solve and export trajectories");
  sim->add_option("scenario", scenario_path, "scenario file")->required();
  sim->add_option("--solver", solver_name, "pf|tpf|general|oracle|mpc|auto");
  sim->add_option("--samples", samples_override, "sample count override");
  sim->add_option("--out", out_path, "output CSV path");

  auto* val = app.add_subcommand("validate",
                                 "Cross-check solver against the oracle");
  val->add_option("scenario", scenario_path, "scenario file")->required();

  auto* stab = app.add_subcommand("stability", "Connectivity and convergence");
  stab->add_option("scenario", scenario_path, "scenario file")->required();

  auto* cmp = app.add_subcommand("compare", "Game controller vs MPC rollout");
  cmp->add_option("scenario", scenario_path, "scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  platoon::io::ParsedScenario parsed = [&]() -> platoon::io::ParsedScenario {
    try {
      return load(scenario_path);
    } catch (const std::exception& err) {
      std::cerr << err.what() << "\n";
      std::exit(kExitFile);
    }
  }();

  try {
    if (sim->parsed())
      return run_simulate(parsed, scenario_path, solver_name,
                          samples_override, out_path);
    if (val->parsed()) return run_validate(parsed);
    if (stab->parsed()) return run_stability(parsed);
    return run_compare(parsed);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
