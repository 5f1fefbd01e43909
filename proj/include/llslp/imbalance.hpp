#pragma once

#include <string>
#include <vector>

#include "llslp/circuits.hpp"
#include "llslp/numkit.hpp"

namespace llslp {

// Directed graph on [n] with positive weights kappaHat_ij on its edges.
struct CircuitRatioDigraph {
  int n = 0;
  Matrix weights;  // n x n, 0 = no edge

  bool hasEdge(int i, int j) const { return weights(i, j) > 0.0; }
  bool anyEdge() const;

  static CircuitRatioDigraph fromEstimates(const KappaEstimates& kappa);
  static CircuitRatioDigraph fromMatrix(const Matrix& weights);
};

struct RescalingResult {
  Vec d;        // positive rescaling, length n
  double tHat;  // max geometric mean cycle value, >= 1
  double xi;    // lower estimate of the lifting-norm condition number
  std::vector<std::string> warnings;
};

// xi = max edge weight; 1 by convention when the graph has no edges.
double chibar_lower_estimate(const CircuitRatioDigraph& graph);

// Max over directed cycles of (prod of weights)^(1/length), by the
// multiplicative (log-domain) variant of the Karp dynamic program.
// Throws EmptyGraph when no cycle exists.
double max_geometric_mean_cycle(const CircuitRatioDigraph& graph);

// Node potentials d with weight_ij * d_j / d_i <= tHat for all edges, via
// Bellman-Ford from an auxiliary source on log-domain weights.
RescalingResult compute_rescaling(const CircuitRatioDigraph& graph, double tHat);

// Full pipeline with the free-matroid convention (no circuits: xi = tHat = 1,
// d = ones).
RescalingResult analyze_rescaling(const CircuitRatioDigraph& graph);

// Exact chibar by enumerating nonsingular m x m column submatrices;
// guard binom(n, m) <= 1e5.
double chibar_bruteforce(const Matrix& A);

// Exact kappa* as the max geometric mean cycle over the true kappa map.
double kappa_star_bruteforce(const Matrix& trueKappa);

}  // namespace llslp
