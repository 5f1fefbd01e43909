#pragma once

#include <vector>

#include "llslp/circuits.hpp"
#include "llslp/numkit.hpp"

namespace llslp {

// Threshold graph on [n]: edge (i,j) present iff kappaHat_ij * delta_j/delta_i
// meets the threshold sigma.
struct AuxGraph {
  int n = 0;
  double sigma = 0.0;
  std::vector<std::vector<bool>> edges;

  bool hasEdge(int i, int j) const { return edges[i][j]; }
};

struct OrderedPartition {
  std::vector<std::vector<int>> layers;  // each sorted ascending

  int count() const { return static_cast<int>(layers.size()); }
  bool operator==(const OrderedPartition& o) const { return layers == o.layers; }
};

struct LayeringFail {
  int i = -1;  // in the checked suffix
  int j = -1;  // in the prefix
  double t = 0.0;
  double kappaBefore = 0.0;
  double kappaAfter = 0.0;
};

struct LayeringResult {
  OrderedPartition partition;
  std::vector<LayeringFail> fails;
  int initialComponentCount = 0;
};

AuxGraph build_aux_graph(const KappaEstimates& kappa, const Vec& delta, double sigma);

// Strongly connected components in the unique linear order imposed by the
// graph; throws OrderingAmbiguous when some component pair has no edge in
// either direction.
std::vector<std::vector<int>> scc_topological(const AuxGraph& graph);

// One pass of suffix validation over the components of the estimated
// long-edge graph at threshold gamma/n; failed checks raise kappaHat and the
// final components of the augmented edge set are returned in imposed order.
// kappa is updated in place.
LayeringResult layering(const OrthonormalBasis& kernel, const Vec& delta, KappaEstimates& kappa,
                        double gamma, bool amortizedChecks = false);

inline double default_gamma(int n, double beta) {
  double denom = 1024.0;
  for (int t = 0; t < 5; ++t) denom *= n;
  return beta / denom;
}

}  // namespace llslp
