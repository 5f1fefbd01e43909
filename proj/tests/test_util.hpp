#pragma once

#include <cmath>
#include <random>

#include "llslp/numkit.hpp"

namespace llslp::testutil {

// Fixed-seed generator for reproducible random instances.
inline std::mt19937 rng(unsigned seed = 0xc0ffee) { return std::mt19937(seed); }

inline Matrix randomIntegerMatrix(std::mt19937& gen, int m, int n, int lo = -3, int hi = 3) {
  std::uniform_int_distribution<int> entry(lo, hi);
  Matrix A(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = entry(gen);
  return A;
}

// Random full-row-rank integer matrix; resamples until the rank check passes.
inline Matrix randomFullRankMatrix(std::mt19937& gen, int m, int n, int lo = -3, int hi = 3) {
  for (;;) {
    Matrix A = randomIntegerMatrix(gen, m, n, lo, hi);
    try {
      kernel_basis(A);
      return A;
    } catch (const RankDeficient&) {
    }
  }
}

// Power iteration run to convergence (no iteration cap): independent oracle
// for spectral norms.
inline double spectralNormOracle(const Matrix& M, double tol = 1e-14) {
  if (M.rows() == 0 || M.cols() == 0) return 0.0;
  const bool wide = M.cols() > M.rows();
  const Matrix G = wide ? M.times(M.transposed()) : M.transposed().times(M);
  const int dim = G.rows();
  if (G.maxAbs() == 0.0) return 0.0;
  std::mt19937 gen(0x0bac1eu);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(dim);
  for (double& vi : v) vi = gauss(gen);
  v = scale(v, 1.0 / norm2(v));
  double lambda = 0.0;
  for (int it = 0; it < 200000; ++it) {
    Vec w = G.apply(v);
    const double nw = norm2(w);
    if (nw == 0.0) return 0.0;
    v = scale(w, 1.0 / nw);
    const double rayleigh = dot(v, G.apply(v));
    if (std::fabs(rayleigh - lambda) <= tol * std::max(rayleigh, 1.0)) {
      lambda = rayleigh;
      break;
    }
    lambda = rayleigh;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

inline bool approxEq(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

inline bool approxEqRel(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max({std::fabs(a), std::fabs(b), 1e-300});
}

// Fixtures used across the suite.
inline Matrix fixtureF1() { return Matrix{{1, 1}}; }
inline Matrix fixtureF2() { return Matrix{{1, 2}}; }
inline Matrix fixtureF3() { return Matrix{{1, 1, 0}, {0, 1, 1}}; }

}  // namespace llslp::testutil
