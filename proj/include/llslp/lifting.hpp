#pragma once

#include <vector>

#include "llslp/numkit.hpp"

namespace llslp {

// Matrix form of the minimum-norm lift restricted off I: for p supported on
// the independent rows Iprime, the lift's coordinates on [n]\I are B p_Iprime.
struct LiftOperator {
  std::vector<int> I;           // sorted
  std::vector<int> Iprime;      // in pivot scan order
  std::vector<int> complement;  // [n]\I, sorted
  Matrix B;                     // |complement| x |Iprime|
};

struct LiftCertificate {
  int i = -1;   // in Iprime
  int j = -1;   // in [n]\I
  double t = 0.0;
};

// Pass certifies that the lifting score of I is at most theta. Fail carries a
// pair with theta/n <= t <= kappa_ij on the given subspace; it does not imply
// the score exceeds theta.
struct LiftVerdict {
  bool pass = false;
  LiftCertificate certificate;
  LiftOperator op;
};

// Minimum-norm z in the subspace with z_I = p. Throws NotInProjection when p
// is not (within 1e-9 relative) in the coordinate projection of the subspace.
Vec lift(const OrthonormalBasis& subspace, const std::vector<int>& I, const Vec& p);

// Exact lifting score sqrt(||L_I||^2 - 1) from the explicit operator matrix
// in orthonormal coordinates of the projection; 0 when the projection is {0}.
double lifting_score(const OrthonormalBasis& subspace, const std::vector<int>& I);

// One-sided certificate test on n * max |B_ji|; the row scan for the
// independent set follows increasing index order.
LiftVerdict verify_lift(const Matrix& subspaceBasis, const std::vector<int>& I, double theta);

// Same test with a caller-chosen row scan order (the layering uses the
// reverse-component order so that this path and the amortized one pick the
// same independent rows).
LiftVerdict verify_lift_ordered(const Matrix& subspaceBasis, const std::vector<int>& scanOrder,
                                double theta);

// Amortized verdicts for all suffixes C_{>=k}, k = 2..#components, from one
// staircase elimination and block orthogonalization. Element k-2 of the
// result corresponds to suffix k.
std::vector<LiftVerdict> verify_lift_suffixes(const Matrix& subspaceBasis,
                                              const std::vector<std::vector<int>>& components,
                                              double theta);

// Max suffix lifting score of an ordered partition on the row-rescaled
// subspace Diag(delta) * subspace.
double partition_lifting_score(const OrthonormalBasis& subspace, const Vec& delta,
                               const std::vector<std::vector<int>>& layers);

// Orthonormal basis of Diag(delta) * subspace.
OrthonormalBasis rescaled_subspace(const OrthonormalBasis& subspace, const Vec& delta);

}  // namespace llslp
