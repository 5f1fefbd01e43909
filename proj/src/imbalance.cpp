#include "llslp/imbalance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace llslp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

long double binomial(int n, int k) {
  long double acc = 1.0L;
  for (int t = 1; t <= k; ++t) acc = acc * (n - k + t) / t;
  return acc;
}
}  // namespace

bool CircuitRatioDigraph::anyEdge() const {
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (weights(i, j) > 0.0) return true;
  return false;
}

CircuitRatioDigraph CircuitRatioDigraph::fromEstimates(const KappaEstimates& kappa) {
  CircuitRatioDigraph g;
  g.n = kappa.size();
  g.weights = Matrix(g.n, g.n);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (i != j && kappa.defined(i, j)) g.weights(i, j) = kappa.value(i, j);
  return g;
}

CircuitRatioDigraph CircuitRatioDigraph::fromMatrix(const Matrix& weights) {
  CircuitRatioDigraph g;
  g.n = weights.rows();
  g.weights = weights;
  for (int i = 0; i < g.n; ++i) g.weights(i, i) = 0.0;
  return g;
}

double chibar_lower_estimate(const CircuitRatioDigraph& graph) {
  if (!graph.anyEdge()) return 1.0;
  double xi = 0.0;
  for (int i = 0; i < graph.n; ++i)
    for (int j = 0; j < graph.n; ++j) xi = std::max(xi, graph.weights(i, j));
  return xi;
}

double max_geometric_mean_cycle(const CircuitRatioDigraph& graph) {
  const int n = graph.n;
  if (!graph.anyEdge()) throw EmptyGraph("max_geometric_mean_cycle: no edges");

  // Karp dynamic program on costs -log(weight); the minimum mean cycle there
  // is the negated log of the maximum geometric mean.
  Matrix cost(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      cost(i, j) = graph.weights(i, j) > 0.0 ? -std::log(graph.weights(i, j)) : kInf;

  std::vector<Vec> D(n + 1, Vec(n, kInf));
  D[0].assign(n, 0.0);
  for (int k = 1; k <= n; ++k)
    for (int v = 0; v < n; ++v) {
      double best = kInf;
      for (int u = 0; u < n; ++u) {
        if (cost(u, v) == kInf || D[k - 1][u] == kInf) continue;
        best = std::min(best, D[k - 1][u] + cost(u, v));
      }
      D[k][v] = best;
    }

  double lambda = kInf;
  for (int v = 0; v < n; ++v) {
    if (D[n][v] == kInf) continue;
    double worst = -kInf;
    for (int k = 0; k < n; ++k) {
      if (D[k][v] == kInf) continue;
      worst = std::max(worst, (D[n][v] - D[k][v]) / (n - k));
    }
    lambda = std::min(lambda, worst);
  }
  if (lambda == kInf) throw EmptyGraph("max_geometric_mean_cycle: no directed cycle");
  return std::exp(-lambda);
}

RescalingResult compute_rescaling(const CircuitRatioDigraph& graph, double tHat) {
  const int n = graph.n;
  RescalingResult res;
  res.tHat = tHat;
  res.xi = chibar_lower_estimate(graph);

  double minW = kInf, maxW = -kInf;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (graph.weights(i, j) > 0.0) {
        minW = std::min(minW, graph.weights(i, j));
        maxW = std::max(maxW, graph.weights(i, j));
      }
  if (minW < maxW && std::log10(maxW) - std::log10(minW) > 300.0)
    res.warnings.push_back("edge weights span more than 300 orders of magnitude");

  // Bellman-Ford from an implicit source with 0-cost edges to every node.
  // The +1e-12 shift absorbs roundoff in tHat so no spurious negative cycle
  // appears for critical cycles.
  const double logT = std::log(tHat);
  Vec sigma(n, 0.0);
  for (int pass = 0; pass < n; ++pass) {
    bool changed = false;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (graph.weights(i, j) <= 0.0) continue;
        const double w = logT - std::log(graph.weights(i, j)) + 1e-12;
        if (sigma[i] + w < sigma[j] - 1e-15) {
          sigma[j] = sigma[i] + w;
          changed = true;
        }
      }
    if (!changed) break;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (graph.weights(i, j) <= 0.0) continue;
      const double w = logT - std::log(graph.weights(i, j)) + 1e-12;
      if (sigma[i] + w < sigma[j] - 1e-9)
        throw NegativeCycle("compute_rescaling: tHat is below the max mean cycle value");
    }

  res.d.resize(n);
  for (int i = 0; i < n; ++i) res.d[i] = std::exp(sigma[i]);
  return res;
}

RescalingResult analyze_rescaling(const CircuitRatioDigraph& graph) {
  if (!graph.anyEdge()) {
    RescalingResult res;
    res.d = constantVec(graph.n, 1.0);
    res.tHat = 1.0;
    res.xi = 1.0;
    return res;
  }
  const double tHat = max_geometric_mean_cycle(graph);
  return compute_rescaling(graph, tHat);
}

double chibar_bruteforce(const Matrix& A) {
  const int m = A.rows(), n = A.cols();
  if (binomial(n, m) > 1e5) throw TooLarge("chibar_bruteforce: too many column subsets");

  double best = 0.0;
  std::vector<int> subset(m);
  for (int t = 0; t < m; ++t) subset[t] = t;
  for (;;) {
    const Matrix B = A.selectColumns(subset);
    bool singular = false;
    try {
      row_reduce(B);
    } catch (const RankDeficient&) {
      singular = true;
    }
    if (!singular) {
      std::vector<Vec> cols(n);
      for (int j = 0; j < n; ++j) cols[j] = least_squares(B, A.column(j));
      best = std::max(best, spectral_norm(Matrix::fromColumns(m, cols)));
    }

    int pos = m - 1;
    while (pos >= 0 && subset[pos] == n - m + pos) --pos;
    if (pos < 0) break;
    ++subset[pos];
    for (int t = pos + 1; t < m; ++t) subset[t] = subset[t - 1] + 1;
  }
  return best;
}

double kappa_star_bruteforce(const Matrix& trueKappa) {
  const CircuitRatioDigraph g = CircuitRatioDigraph::fromMatrix(trueKappa);
  if (!g.anyEdge()) return 1.0;
  return max_geometric_mean_cycle(g);
}

}  // namespace llslp
