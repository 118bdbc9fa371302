// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The platoon-games authors

#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "platoon/closed_form.hpp"
#include "platoon/general_game.hpp"
#include "platoon/model.hpp"
#include "platoon/mpc.hpp"
#include "platoon/stability.hpp"

namespace platoon::io {

/// Syntax error in a scenario file; carries the offending line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& origin, int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

struct ParsedScenario {
  Scenario scenario;
  std::optional<mpc::MpcConfig> mpc;
  int samples = 1000;
};

/// Parse the sectioned plain-text scenario format ([platoon], [vehicles],
/// [topology], optional [mpc]); see docs/scenario_format.md for the
/// grammar. Unknown sections or keys are rejected.
ParsedScenario parse_scenario(const std::string& path);
ParsedScenario parse_scenario_text(std::string_view text,
                                   const std::string& origin);

/// Uniform sampling of an analytic solution on M points including both
/// endpoints. Evaluation is exact pointwise, never interpolated.
template <class Solution>
TrajectoryTable sample(const Solution& sol, int M) {
  if (M < 2) throw std::invalid_argument("need at least two samples");
  const int n = sol.size();
  TrajectoryTable table;
  table.t = Vec::LinSpaced(M, 0.0, sol.t_f());
  table.y.resize(M, n);
  table.e.resize(M, n);
  table.u.resize(M, n);
  for (int k = 0; k < M; ++k) {
    const double t = table.t[k];
    table.y.row(k) = sol.y_at(t).transpose();
    table.e.row(k) = sol.e_at(t).transpose();
    table.u.row(k) = sol.u_at(t).transpose();
  }
  return table;
}

enum class Solver { Auto, Pf, Tpf, General, Oracle, Mpc };

std::optional<Solver> solver_from_name(std::string_view name);
std::string to_string(Solver solver);

struct SimulateResult {
  TrajectoryTable table;
  Solver used = Solver::Auto;
  /// True when a near-degenerate spectrum forced the brute-force path.
  bool oracle_fallback = false;
};

/// Solve and sample a scenario. Auto picks the closed form matching the
/// topology kind and falls back to shooting when the spectrum is
/// near-degenerate. The MPC path runs on its own T_s grid and ignores
/// `samples`.
SimulateResult simulate(const Scenario& scenario, int samples,
                        Solver choice = Solver::Auto,
                        std::optional<mpc::MpcConfig> config = std::nullopt);

struct ConvergenceMeasurement {
  stability::StabilityReport at_scenario_horizon;
  /// Present when some vehicle had not settled at the scenario horizon;
  /// measured on a re-solve with the horizon extended (3x, doubling)
  /// until every vehicle converges.
  std::optional<stability::StabilityReport> extended;
};

ConvergenceMeasurement measure_convergence(const Scenario& scenario,
                                           double threshold = 0.01,
                                           int samples_per_second = 300);

/// Composite-trapezoid integral of sum_i u_i(t)^2 over the table grid.
double control_effort(const TrajectoryTable& table);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

/// CSV with header t,y1..yn,e1..en,u1..un, LF line endings.
void write_csv(std::ostream& out, const TrajectoryTable& table);

/// Gnuplot-style companion: one whitespace-separated block per vehicle
/// (t, y, e, u), blocks separated by blank lines.
void write_plot_blocks(std::ostream& out, const TrajectoryTable& table);

}  // namespace platoon::io
