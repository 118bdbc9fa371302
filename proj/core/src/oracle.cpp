// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The platoon-games authors

#include "platoon/oracle.hpp"

#include <cmath>
#include <vector>

namespace platoon::oracle {

namespace {

// The state-costate system is hyperbolic, so single shooting must cancel
// components that grow like exp(sqrt(delta) t_f). 80-bit arithmetic keeps
// that cancellation comfortably below the validation tolerances.
using Real = long double;
using VecL = std::vector<Real>;

struct RawRun {
  std::vector<VecL> y;
  std::vector<VecL> lambda;
  bool finite = true;
};

VecL widen(const Vec& v) {
  VecL out(v.size());
  for (int i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

RawRun rk4(const Mat& A, const Vec& omega, const VecL& y0,
           const VecL& lambda0, double t_f, int steps) {
  const int n = static_cast<int>(y0.size());
  std::vector<VecL> a(n, VecL(n));
  VecL w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = omega[i];
    for (int j = 0; j < n; ++j) a[i][j] = A(i, j);
  }
  VecL y = y0;
  VecL lam = lambda0;

  const Real h = static_cast<Real>(t_f) / steps;
  RawRun run;
  run.y.reserve(steps + 1);
  run.lambda.reserve(steps + 1);
  run.y.push_back(y);
  run.lambda.push_back(lam);

  VecL ky(n), kl(n), y1(n), l1(n), sy(n), sl(n);
  auto rhs = [&](const VecL& yy, const VecL& ll, VecL& dy, VecL& dl) {
    for (int i = 0; i < n; ++i) {
      dy[i] = -ll[i];
      Real acc = w[i];
      for (int j = 0; j <= i; ++j) acc += a[i][j] * yy[j];
      dl[i] = -acc;
    }
  };

  for (int s = 0; s < steps; ++s) {
    rhs(y, lam, ky, kl);
    for (int i = 0; i < n; ++i) {
      sy[i] = ky[i];
      sl[i] = kl[i];
      y1[i] = y[i] + h / 2 * ky[i];
      l1[i] = lam[i] + h / 2 * kl[i];
    }
    rhs(y1, l1, ky, kl);
    for (int i = 0; i < n; ++i) {
      sy[i] += 2 * ky[i];
      sl[i] += 2 * kl[i];
      y1[i] = y[i] + h / 2 * ky[i];
      l1[i] = lam[i] + h / 2 * kl[i];
    }
    rhs(y1, l1, ky, kl);
    for (int i = 0; i < n; ++i) {
      sy[i] += 2 * ky[i];
      sl[i] += 2 * kl[i];
      y1[i] = y[i] + h * ky[i];
      l1[i] = lam[i] + h * kl[i];
    }
    rhs(y1, l1, ky, kl);
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      y[i] += h / 6 * (sy[i] + ky[i]);
      lam[i] += h / 6 * (sl[i] + kl[i]);
      ok = ok && std::isfinite(static_cast<double>(y[i])) &&
           std::isfinite(static_cast<double>(lam[i]));
    }
    if (!ok) {
      run.finite = false;
      return run;
    }
    run.y.push_back(y);
    run.lambda.push_back(lam);
  }
  return run;
}

OdeRun pack(const RawRun& raw, double t_f, int steps) {
  const int n = static_cast<int>(raw.y.front().size());
  OdeRun out;
  out.steps = steps;
  out.h = t_f / steps;
  out.t = Vec::LinSpaced(steps + 1, 0.0, t_f);
  out.y.resize(steps + 1, n);
  out.lambda.resize(steps + 1, n);
  for (int s = 0; s <= steps; ++s)
    for (int i = 0; i < n; ++i) {
      out.y(s, i) = static_cast<double>(raw.y[s][i]);
      out.lambda(s, i) = static_cast<double>(raw.lambda[s][i]);
    }
  return out;
}

// Gaussian elimination with partial pivoting in extended precision.
VecL solve_dense(std::vector<VecL> m, VecL b) {
  const int n = static_cast<int>(b.size());
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(static_cast<double>(m[r][c])) >
          std::abs(static_cast<double>(m[piv][c])))
        piv = r;
    std::swap(m[c], m[piv]);
    std::swap(b[c], b[piv]);
    if (m[c][c] == static_cast<Real>(0))
      throw OracleError("singular shooting sensitivity matrix");
    for (int r = c + 1; r < n; ++r) {
      const Real f = m[r][c] / m[c][c];
      for (int k = c; k < n; ++k) m[r][k] -= f * m[c][k];
      b[r] -= f * b[c];
    }
  }
  VecL x(n);
  for (int r = n - 1; r >= 0; --r) {
    Real acc = b[r];
    for (int k = r + 1; k < n; ++k) acc -= m[r][k] * x[k];
    x[r] = acc / m[r][r];
  }
  return x;
}

}  // namespace

namespace {

OdeRun integrate_raw(const InfoMatrix& info, const VecL& y0,
                     const VecL& lambda0, double t_f, int steps) {
  if (steps < 100) throw OracleError("need at least 100 integration steps");
  RawRun raw = rk4(info.A, info.omega, y0, lambda0, t_f, steps);
  if (!raw.finite) {
    steps *= 2;
    raw = rk4(info.A, info.omega, y0, lambda0, t_f, steps);
    if (!raw.finite)
      throw OracleError("integration produced non-finite state");
  }
  return pack(raw, t_f, steps);
}

}  // namespace

OdeRun integrate_forward(const InfoMatrix& info, const Vec& y0,
                         const Vec& lambda0, double t_f, int steps) {
  return integrate_raw(info, widen(y0), widen(lambda0), t_f, steps);
}

namespace {

// Shooting in extended precision end to end; rounding lambda(0) to double
// before the final run would be amplified by exp(sqrt(delta) t_f).
VecL shoot_raw(const InfoMatrix& info, const Vec& y0, double t_f, int steps) {
  const int n = static_cast<int>(y0.size());
  const Vec zero = Vec::Zero(n);
  const VecL zero_l(n, 0.0);
  const RawRun particular =
      rk4(info.A, info.omega, widen(y0), zero_l, t_f, steps);
  if (!particular.finite)
    throw OracleError("shooting base run produced non-finite state");
  std::vector<VecL> sens(n, VecL(n));
  for (int j = 0; j < n; ++j) {
    VecL ej(n, 0.0);
    ej[j] = 1.0;
    const RawRun basis = rk4(info.A, zero, zero_l, ej, t_f, steps);
    if (!basis.finite)
      throw OracleError("shooting basis run produced non-finite state");
    for (int i = 0; i < n; ++i) sens[i][j] = basis.lambda.back()[i];
  }
  VecL rhs(n);
  for (int i = 0; i < n; ++i) rhs[i] = -particular.lambda.back()[i];
  return solve_dense(std::move(sens), std::move(rhs));
}

}  // namespace

Vec shoot_lambda0(const InfoMatrix& info, const Vec& y0, double t_f,
                  int steps) {
  const VecL sol = shoot_raw(info, y0, t_f, steps);
  Vec lambda0(static_cast<int>(sol.size()));
  for (int i = 0; i < lambda0.size(); ++i)
    lambda0[i] = static_cast<double>(sol[i]);
  return lambda0;
}

OdeRun solve_bvp(const Scenario& scenario, int steps) {
  const InfoMatrix info = build_info_matrix(scenario);
  const Vec y0 = relative_initial(scenario).y;
  const VecL lambda0 = shoot_raw(info, y0, scenario.t_f, steps);
  return integrate_raw(info, widen(y0), lambda0, scenario.t_f, steps);
}

TrajectoryTable to_table(const OdeRun& run, const Vec& d) {
  TrajectoryTable table;
  table.t = run.t;
  table.y = run.y;
  table.e = run.y;
  table.e.rowwise() += d.transpose();
  table.u = -run.lambda;
  return table;
}

namespace {

// Composite trapezoid of f over the table grid.
double trapezoid(const Vec& t, const Vec& f) {
  double acc = 0.0;
  for (int k = 0; k + 1 < t.size(); ++k)
    acc += 0.5 * (f[k] + f[k + 1]) * (t[k + 1] - t[k]);
  return acc;
}

// Player cost: 1/2 integral of sum_{j in N_i} w_ij (sum_{k=j+1}^i e_k)^2
// plus the control energy.
double player_cost(const Scenario& scenario, const Mat& e, const Vec& u_i,
                   const Vec& t, int player) {
  const int m = static_cast<int>(t.size());
  Vec integrand(m);
  for (int k = 0; k < m; ++k) {
    double acc = u_i[k] * u_i[k];
    for (const Edge& link : scenario.topology.neighbors(player)) {
      double gap = 0.0;
      for (int v = link.informed + 1; v <= player; ++v)
        gap += e(k, v - 1);
      acc += link.weight * gap * gap;
    }
    integrand[k] = acc;
  }
  return 0.5 * trapezoid(t, integrand);
}

}  // namespace

DeviationReport certify_nash(const Scenario& scenario,
                             const TrajectoryTable& table, int player,
                             int n_bumps, double eps) {
  if (player < 1 || player > scenario.n)
    throw OracleError("player index out of range");
  const int m = table.samples();
  const int pi = player - 1;
  const double T = table.t[m - 1];

  DeviationReport report;
  report.player = player;
  report.baseline_cost =
      player_cost(scenario, table.e, table.u.col(pi), table.t, player);

  const double halfwidth = T / (n_bumps + 1);
  Vec du(m), de(m), u2(m);
  Mat e2 = table.e;
  for (int b = 1; b <= n_bumps; ++b) {
    const double center = b * T / (n_bumps + 1);
    for (int k = 0; k < m; ++k) {
      const double w = 1.0 - std::abs(table.t[k] - center) / halfwidth;
      du[k] = w > 0.0 ? w : 0.0;
    }
    // Spacing-error shift is the running integral of the control bump.
    de[0] = 0.0;
    for (int k = 1; k < m; ++k)
      de[k] = de[k - 1] +
              0.5 * (du[k] + du[k - 1]) * (table.t[k] - table.t[k - 1]);
    for (const double sign : {eps, -eps}) {
      for (int k = 0; k < m; ++k) {
        u2[k] = table.u(k, pi) + sign * du[k];
        e2(k, pi) = table.e(k, pi) + sign * de[k];
      }
      const double cost = player_cost(scenario, e2, u2, table.t, player);
      report.deltas.push_back(cost - report.baseline_cost);
    }
    for (int k = 0; k < m; ++k) e2(k, pi) = table.e(k, pi);
  }
  report.min_delta = report.deltas.empty() ? 0.0 : report.deltas.front();
  for (const double dj : report.deltas)
    report.min_delta = std::min(report.min_delta, dj);
  report.certified =
      report.min_delta >= -1e-6 * (1.0 + std::abs(report.baseline_cost));
  return report;
}

}  // namespace platoon::oracle
