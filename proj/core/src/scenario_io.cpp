// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The platoon-games authors

#include "platoon/scenario_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "platoon/oracle.hpp"

namespace platoon::io {

ParseError::ParseError(const std::string& origin, int line,
                       const std::string& what)
    : std::runtime_error(origin + ":" + std::to_string(line) + ": " + what),
      line_(line) {}

namespace {

std::string trim(std::string_view s) {
  const auto* ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

struct LineCtx {
  const std::string& origin;
  int line;
};

double parse_number(const std::string& tok, const LineCtx& ctx) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || tok.empty())
    throw ParseError(ctx.origin, ctx.line, "expected a number, got '" + tok + "'");
  return v;
}

int parse_int(const std::string& tok, const LineCtx& ctx) {
  int v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw ParseError(ctx.origin, ctx.line, "expected an integer, got '" + tok + "'");
  return v;
}

struct VehicleRow {
  double x0 = 0.0;
  bool has_d = false;
  double d = 0.0;
  int line = 0;
};

struct WeightRow {
  std::vector<std::string> tokens;
  int line = 0;
};

}  // namespace

ParsedScenario parse_scenario_text(std::string_view text,
                                   const std::string& origin) {
  std::istringstream stream{std::string(text)};
  std::string raw;
  int lineno = 0;
  std::string section;

  std::optional<int> n;
  std::optional<double> t_f;
  int samples = 1000;
  std::optional<std::string> kind;
  std::map<int, VehicleRow> vehicles;
  std::vector<WeightRow> weight_rows;
  bool mpc_present = false;
  mpc::MpcConfig mpc_config;

  while (std::getline(stream, raw)) {
    ++lineno;
    const LineCtx ctx{origin, lineno};
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError(origin, lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "platoon" && section != "vehicles" &&
          section != "topology" && section != "mpc")
        throw ParseError(origin, lineno, "unknown section [" + section + "]");
      if (section == "mpc") mpc_present = true;
      continue;
    }
    if (section.empty())
      throw ParseError(origin, lineno, "content before any section header");

    const auto eq = line.find('=');
    if (section == "platoon") {
      if (eq == std::string::npos)
        throw ParseError(origin, lineno, "expected key = value");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key == "n") n = parse_int(value, ctx);
      else if (key == "t_f") t_f = parse_number(value, ctx);
      else if (key == "samples") samples = parse_int(value, ctx);
      else throw ParseError(origin, lineno, "unknown key '" + key + "'");
    } else if (section == "mpc") {
      if (eq == std::string::npos)
        throw ParseError(origin, lineno, "expected key = value");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key == "horizon") mpc_config.horizon = parse_int(value, ctx);
      else if (key == "sample_time")
        mpc_config.sample_time = parse_number(value, ctx);
      else throw ParseError(origin, lineno, "unknown key '" + key + "'");
    } else if (section == "vehicles") {
      const auto tok = split_ws(line);
      if (tok.size() != 3)
        throw ParseError(origin, lineno, "expected: index x0 d");
      const int idx = parse_int(tok[0], ctx);
      if (vehicles.count(idx))
        throw ParseError(origin, lineno, "duplicate vehicle row");
      VehicleRow row;
      row.x0 = parse_number(tok[1], ctx);
      row.line = lineno;
      if (tok[2] != "-") {
        row.has_d = true;
        row.d = parse_number(tok[2], ctx);
      }
      vehicles[idx] = row;
    } else {  // topology
      if (eq != std::string::npos) {
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key != "kind")
          throw ParseError(origin, lineno, "unknown key '" + key + "'");
        kind = value;
      } else {
        weight_rows.push_back({split_ws(line), lineno});
      }
    }
  }

  if (!n) throw ParseError(origin, lineno, "missing n in [platoon]");
  if (!t_f) throw ParseError(origin, lineno, "missing t_f in [platoon]");
  if (*n < 1) throw ParseError(origin, lineno, "n must be positive");
  if (samples < 2) throw ParseError(origin, lineno, "samples must be >= 2");
  if (!kind) throw ParseError(origin, lineno, "missing kind in [topology]");

  Vec x0(*n + 1), d(*n);
  for (int idx = 0; idx <= *n; ++idx) {
    const auto it = vehicles.find(idx);
    if (it == vehicles.end())
      throw ParseError(origin, lineno,
                       "missing vehicle row " + std::to_string(idx));
    x0[idx] = it->second.x0;
    if (idx == 0) {
      if (it->second.has_d)
        throw ParseError(origin, it->second.line,
                         "the virtual leader takes no distancing policy");
    } else {
      if (!it->second.has_d)
        throw ParseError(origin, it->second.line,
                         "vehicle needs a distancing policy");
      d[idx - 1] = it->second.d;
    }
  }
  if (static_cast<int>(vehicles.size()) != *n + 1)
    throw ParseError(origin, lineno, "unexpected extra vehicle rows");

  TopologyGraph topology = [&] {
    if (*kind == "pf" || *kind == "tpf") {
      std::vector<double> w(*n, -1.0), wt(std::max(0, *n - 2), -1.0);
      for (const WeightRow& row : weight_rows) {
        const LineCtx ctx{origin, row.line};
        const auto& tok = row.tokens;
        const bool tpf = *kind == "tpf";
        if (tok.size() < 2 || tok.size() > (tpf ? 3u : 2u))
          throw ParseError(origin, row.line, "malformed weight row");
        const int i = parse_int(tok[0], ctx);
        if (i < 1 || i > *n)
          throw ParseError(origin, row.line, "vehicle index out of range");
        if (w[i - 1] >= 0.0)
          throw ParseError(origin, row.line, "duplicate weight row");
        w[i - 1] = parse_number(tok[1], ctx);
        if (tpf && i >= 3) {
          if (tok.size() != 3 || tok[2] == "-")
            throw ParseError(origin, row.line,
                             "tpf vehicles 3..n need a v2v weight");
          wt[i - 3] = parse_number(tok[2], ctx);
        } else if (tok.size() == 3 && tok[2] != "-") {
          throw ParseError(origin, row.line,
                           "no v2v weight allowed for this vehicle");
        }
      }
      for (int i = 0; i < *n; ++i)
        if (w[i] < 0.0)
          throw ParseError(origin, lineno,
                           "missing weight row for vehicle " +
                               std::to_string(i + 1));
      return *kind == "pf" ? TopologyGraph::pf(w) : TopologyGraph::tpf(w, wt);
    }
    TopologyKind k = TopologyKind::Custom;
    if (*kind == "apf") k = TopologyKind::APF;
    else if (*kind == "lf") k = TopologyKind::LF;
    else if (*kind != "custom")
      throw ParseError(origin, lineno, "unknown topology kind '" + *kind + "'");
    std::vector<Edge> edges;
    for (const WeightRow& row : weight_rows) {
      const LineCtx ctx{origin, row.line};
      if (row.tokens.size() != 3)
        throw ParseError(origin, row.line, "expected edge row: i j w");
      Edge e;
      e.follower = parse_int(row.tokens[0], ctx);
      e.informed = parse_int(row.tokens[1], ctx);
      e.weight = parse_number(row.tokens[2], ctx);
      edges.push_back(e);
    }
    return TopologyGraph::custom(*n, std::move(edges), k);
  }();

  ParsedScenario parsed{
      Scenario::make(*t_f, x0, d, std::move(topology)),
      mpc_present ? std::optional<mpc::MpcConfig>(mpc_config) : std::nullopt,
      samples};
  return parsed;
}

ParsedScenario parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str(), path);
}

std::optional<Solver> solver_from_name(std::string_view name) {
  if (name == "auto") return Solver::Auto;
  if (name == "pf") return Solver::Pf;
  if (name == "tpf") return Solver::Tpf;
  if (name == "general") return Solver::General;
  if (name == "oracle") return Solver::Oracle;
  if (name == "mpc") return Solver::Mpc;
  return std::nullopt;
}

std::string to_string(Solver solver) {
  switch (solver) {
    case Solver::Auto: return "auto";
    case Solver::Pf: return "pf";
    case Solver::Tpf: return "tpf";
    case Solver::General: return "general";
    case Solver::Oracle: return "oracle";
    case Solver::Mpc: return "mpc";
  }
  return "auto";
}

namespace {

TrajectoryTable oracle_table(const Scenario& scenario, int samples) {
  const int intervals = samples - 1;
  const int per = std::max(
      1, static_cast<int>(std::ceil(static_cast<double>(oracle::kDefaultSteps) /
                                    intervals)));
  const int steps = intervals * per;
  const oracle::OdeRun run = oracle::solve_bvp(scenario, steps);
  const TrajectoryTable dense = oracle::to_table(run, scenario.d);
  TrajectoryTable table;
  table.t.resize(samples);
  table.y.resize(samples, scenario.n);
  table.e.resize(samples, scenario.n);
  table.u.resize(samples, scenario.n);
  for (int k = 0; k < samples; ++k) {
    const int row = k * per;
    table.t[k] = dense.t[row];
    table.y.row(k) = dense.y.row(row);
    table.e.row(k) = dense.e.row(row);
    table.u.row(k) = dense.u.row(row);
  }
  return table;
}

}  // namespace

SimulateResult simulate(const Scenario& scenario, int samples, Solver choice,
                        std::optional<mpc::MpcConfig> config) {
  if (choice == Solver::Auto) {
    switch (scenario.topology.kind()) {
      case TopologyKind::PF: choice = Solver::Pf; break;
      case TopologyKind::TPF: choice = Solver::Tpf; break;
      default: choice = Solver::General; break;
    }
  }
  SimulateResult result;
  result.used = choice;
  switch (choice) {
    case Solver::Pf:
      result.table = sample(solve_pf(scenario), samples);
      break;
    case Solver::Tpf:
      try {
        result.table = sample(solve_tpf(scenario), samples);
      } catch (const matfun::NearDegenerateSpectrum&) {
        result.oracle_fallback = true;
        result.table = oracle_table(scenario, samples);
      }
      break;
    case Solver::General:
      try {
        result.table = sample(solve_general(scenario), samples);
      } catch (const matfun::NearDegenerateSpectrum&) {
        result.oracle_fallback = true;
        result.table = oracle_table(scenario, samples);
      }
      break;
    case Solver::Oracle:
      result.table = oracle_table(scenario, samples);
      break;
    case Solver::Mpc:
      result.table =
          mpc::mpc_rollout(scenario, config.value_or(mpc::MpcConfig{}));
      break;
    case Solver::Auto:
      break;  // unreachable
  }
  return result;
}

ConvergenceMeasurement measure_convergence(const Scenario& scenario,
                                           double threshold,
                                           int samples_per_second) {
  const auto measure = [&](double horizon) {
    Scenario copy = scenario;
    copy.t_f = horizon;
    const int samples = std::max(
        501, static_cast<int>(std::lround(horizon * samples_per_second)) + 1);
    const SimulateResult sim = simulate(copy, samples, Solver::Auto);
    return stability::internal_stability(sim.table, threshold);
  };

  ConvergenceMeasurement out;
  out.at_scenario_horizon = measure(scenario.t_f);
  if (out.at_scenario_horizon.all_converged) return out;

  double horizon = 3.0 * scenario.t_f;
  for (int attempt = 0; attempt < 7; ++attempt) {
    stability::StabilityReport report = measure(horizon);
    report.extended_horizon = true;
    out.extended = report;
    if (report.all_converged) break;
    horizon *= 2.0;
  }
  return out;
}

double control_effort(const TrajectoryTable& table) {
  double acc = 0.0;
  for (int k = 0; k + 1 < table.samples(); ++k) {
    const double a = table.u.row(k).squaredNorm();
    const double b = table.u.row(k + 1).squaredNorm();
    acc += 0.5 * (a + b) * (table.t[k + 1] - table.t[k]);
  }
  return acc;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  if (res.ec != std::errc()) {
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
  }
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const TrajectoryTable& table) {
  const int n = table.vehicles();
  out << 't';
  for (int i = 1; i <= n; ++i) out << ",y" << i;
  for (int i = 1; i <= n; ++i) out << ",e" << i;
  for (int i = 1; i <= n; ++i) out << ",u" << i;
  out << '\n';
  for (int k = 0; k < table.samples(); ++k) {
    out << format_double(table.t[k]);
    for (int i = 0; i < n; ++i) out << ',' << format_double(table.y(k, i));
    for (int i = 0; i < n; ++i) out << ',' << format_double(table.e(k, i));
    for (int i = 0; i < n; ++i) out << ',' << format_double(table.u(k, i));
    out << '\n';
  }
}

void write_plot_blocks(std::ostream& out, const TrajectoryTable& table) {
  for (int i = 0; i < table.vehicles(); ++i) {
    out << "# vehicle " << (i + 1) << "  (t y e u)\n";
    for (int k = 0; k < table.samples(); ++k) {
      out << format_double(table.t[k]) << ' ' << format_double(table.y(k, i))
          << ' ' << format_double(table.e(k, i)) << ' '
          << format_double(table.u(k, i)) << '\n';
    }
    out << '\n';
  }
}

}  // namespace platoon::io
