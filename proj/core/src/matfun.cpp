// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The platoon-games authors

#include "platoon/matfun.hpp"

#include <cmath>
#include <sstream>

namespace platoon::matfun {

namespace {

void require_lower_triangular(const Mat& A) {
  if (A.rows() != A.cols()) throw MatFunError("matrix must be square");
  for (int i = 0; i < A.rows(); ++i)
    for (int j = i + 1; j < A.cols(); ++j)
      if (A(i, j) != 0.0)
        throw MatFunError("matrix must be lower-triangular");
}

}  // namespace

EigenFactorization eig_lower_triangular(const Mat& A) {
  require_lower_triangular(A);
  const int n = static_cast<int>(A.rows());
  Vec delta = A.diagonal();
  for (int i = 0; i < n; ++i)
    if (!(delta[i] > 0.0))
      throw MatFunError("diagonal entries must be positive");
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double gap = std::abs(delta[i] - delta[j]);
      const double scale = std::max(std::abs(delta[i]), std::abs(delta[j]));
      if (gap <= kDegenerateGap * scale) {
        std::ostringstream msg;
        msg << "near-degenerate spectrum: delta[" << i + 1 << "] = "
            << delta[i] << " vs delta[" << j + 1 << "] = " << delta[j];
        throw NearDegenerateSpectrum(msg.str());
      }
    }
  }

  // Column i solves (A - delta_i I) v = 0 with v[i] = 1; rows above i
  // vanish because A is triangular with distinct diagonal.
  Mat V = Mat::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    for (int m = i + 1; m < n; ++m) {
      double acc = 0.0;
      for (int k = i; k < m; ++k) acc += A(m, k) * V(k, i);
      V(m, i) = acc / (delta[i] - A(m, m));
    }
  }
  Mat Vinv = tri_inverse(V);
  return EigenFactorization{std::move(delta), std::move(V), std::move(Vinv)};
}

Mat tri_inverse(const Mat& L) {
  require_lower_triangular(L);
  const int n = static_cast<int>(L.rows());
  for (int i = 0; i < n; ++i)
    if (L(i, i) == 0.0) throw MatFunError("singular triangular matrix");
  Mat X = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    X(j, j) = 1.0 / L(j, j);
    for (int m = j + 1; m < n; ++m) {
      double acc = 0.0;
      for (int k = j; k < m; ++k) acc += L(m, k) * X(k, j);
      X(m, j) = -acc / L(m, m);
    }
  }
  return X;
}

std::pair<Mat, Mat> hyp_pair(const EigenFactorization& ef, double t) {
  if (t < 0.0) throw MatFunError("hyp_pair needs t >= 0");
  const int n = ef.size();
  Vec c(n), s(n);
  for (int i = 0; i < n; ++i) {
    const double mu = std::sqrt(ef.delta[i]);
    const double x = mu * t;
    if (x > kHypOverflowLimit)
      throw MatFunError("hyperbolic factor overflow: sqrt(delta)*t > 700");
    c[i] = std::cosh(x);
    s[i] = std::sinh(x) / mu;
  }
  Mat C = ef.V * c.asDiagonal() * ef.Vinv;
  Mat S = ef.V * s.asDiagonal() * ef.Vinv;
  return {std::move(C), std::move(S)};
}

double scalar_alpha(double omega, double t, double t_f) {
  if (!(omega > 0.0)) throw MatFunError("scalar_alpha needs omega > 0");
  if (t < 0.0 || t > t_f) throw MatFunError("scalar_alpha needs 0 <= t <= t_f");
  const double mu = std::sqrt(omega);
  return (std::exp(-mu * t) + std::exp(-mu * (2.0 * t_f - t))) /
         (1.0 + std::exp(-2.0 * mu * t_f));
}

double scalar_alpha_dot(double omega, double t, double t_f) {
  if (!(omega > 0.0)) throw MatFunError("scalar_alpha_dot needs omega > 0");
  if (t < 0.0 || t > t_f)
    throw MatFunError("scalar_alpha_dot needs 0 <= t <= t_f");
  const double mu = std::sqrt(omega);
  return -mu * (std::exp(-mu * t) - std::exp(-mu * (2.0 * t_f - t))) /
         (1.0 + std::exp(-2.0 * mu * t_f));
}

}  // namespace platoon::matfun
