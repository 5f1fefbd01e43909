#pragma once

#include <optional>
#include <vector>

#include "llslp/numkit.hpp"

namespace llslp {

// Support-minimal kernel vector of A. g is full length n, zero off support,
// scaled so the smallest-index support entry is +1.
struct Circuit {
  std::vector<int> support;  // sorted ascending
  Vec g;

  bool contains(int i) const;
};

// Partition of [n] into non-separable components of the column matroid, in
// discovery order (by smallest member).
struct MatroidComponents {
  std::vector<std::vector<int>> components;
  std::vector<int> componentId;  // per column index

  int count() const { return static_cast<int>(components.size()); }
  bool samePair(int i, int j) const { return componentId[i] == componentId[j]; }
};

// Lower bounds kappaHat[i][j] <= kappa_ij with witness circuit ids. Entries
// are defined (positive) exactly for i != j in one non-separable component.
class KappaEstimates {
 public:
  KappaEstimates() = default;
  explicit KappaEstimates(int n);

  int size() const { return n_; }
  bool defined(int i, int j) const { return kappaHat_[idx(i, j)] > 0.0; }
  double value(int i, int j) const { return kappaHat_[idx(i, j)]; }
  int witness(int i, int j) const { return witness_[idx(i, j)]; }

  // Keeps the max; returns true when the entry strictly increased.
  bool improve(int i, int j, double value, int witnessId);

  std::vector<int> componentId;

 private:
  int idx(int i, int j) const { return i * n_ + j; }
  int n_ = 0;
  Vec kappaHat_;
  std::vector<int> witness_;
};

struct CircuitAnalysis {
  MatroidComponents components;
  std::vector<Circuit> circuits;
  KappaEstimates kappa;
  EliminationResult elimination;
};

// Decomposes the column matroid of A, returns a circuit family covering every
// same-component pair, and the induced lower bounds kappaHat.
CircuitAnalysis find_circuits(const Matrix& A);

// Fundamental circuit of non-basis column i with respect to the elimination's
// basis. Throws IndependentColumn when column i is independent of the basis.
Circuit fundamental_circuit(const EliminationResult& elim, int i);

// Circuit containing both i and j, built from a shortest path between the
// fundamental-circuit cliques. Throws SeparatedPair across components.
Circuit circuit_through_pair(const CircuitAnalysis& analysis, const Matrix& A, int i, int j);

// All circuits by subset enumeration; guard n <= 14.
std::vector<Circuit> enumerate_circuits_bruteforce(const Matrix& A);

// True kappa_ij map from enumerated circuits; 0 where no circuit contains the
// pair. Guard n <= 14.
Matrix kappa_bruteforce(const Matrix& A);

}  // namespace llslp
