// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The platoon-games authors

#pragma once

#include <stdexcept>
#include <utility>

#include "platoon/model.hpp"

namespace platoon::matfun {

/// Signals that two diagonal entries coincide within the relative gap
/// tolerance, so the triangular eigenfactorization is unavailable and
/// the caller must fall back to the brute-force integrator.
class NearDegenerateSpectrum : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MatFunError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A = V * diag(delta) * Vinv with V unit-lower-triangular (diagonal of V
/// normalized to ones) and delta the diagonal of A.
struct EigenFactorization {
  Vec delta;
  Mat V;
  Mat Vinv;

  int size() const { return static_cast<int>(delta.size()); }
};

/// Relative gap below which two eigenvalues count as degenerate.
inline constexpr double kDegenerateGap = 1e-8;
/// Largest sqrt(delta)*t for which the hyperbolic factors stay finite.
inline constexpr double kHypOverflowLimit = 700.0;

/// Eigenfactorization of a lower-triangular matrix with positive,
/// pairwise-distinct diagonal. Eigenvectors come from back-substitution
/// on the triangular structure, O(n^2) per vector; Vinv by triangular
/// inversion of V.
EigenFactorization eig_lower_triangular(const Mat& A);

/// Inverse of a lower-triangular matrix by forward substitution. Upper
/// entries of the result are written as exact zeros.
Mat tri_inverse(const Mat& L);

/// (cosh(A^{1/2} t), sinh(A^{1/2} t) A^{-1/2}) through the
/// eigenfactorization.
std::pair<Mat, Mat> hyp_pair(const EigenFactorization& ef, double t);

/// cosh(sqrt(omega) (t_f - t)) / cosh(sqrt(omega) t_f), evaluated in the
/// exp-normalized form so it stays finite for arbitrarily large
/// sqrt(omega) * t_f. Monotonically decreasing in t, value in (0, 1],
/// exactly 1 at t = 0.
double scalar_alpha(double omega, double t, double t_f);

/// d/dt of scalar_alpha:
/// -sqrt(omega) sinh(sqrt(omega) (t_f - t)) / cosh(sqrt(omega) t_f).
/// Exactly 0 at t = t_f.
double scalar_alpha_dot(double omega, double t, double t_f);

}  // namespace platoon::matfun
