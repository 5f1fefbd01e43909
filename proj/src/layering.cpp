#include "llslp/layering.hpp"

#include <algorithm>
#include <cmath>

#include "llslp/lifting.hpp"

namespace llslp {

namespace {

// Iterative Tarjan with vertices visited in increasing index order.
std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<bool>>& edges) {
  const int n = static_cast<int>(edges.size());
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> onStack(n, false);
  std::vector<int> stack;
  std::vector<std::vector<int>> comps;
  int counter = 0;

  struct Frame {
    int v;
    int next;
  };
  for (int start = 0; start < n; ++start) {
    if (index[start] >= 0) continue;
    std::vector<Frame> call;
    call.push_back({start, 0});
    index[start] = low[start] = counter++;
    stack.push_back(start);
    onStack[start] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next < n) {
        const int w = f.next++;
        if (!edges[f.v][w]) continue;
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          onStack[w] = true;
          call.push_back({w, 0});
        } else if (onStack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        if (low[f.v] == index[f.v]) {
          std::vector<int> comp;
          for (;;) {
            const int w = stack.back();
            stack.pop_back();
            onStack[w] = false;
            comp.push_back(w);
            if (w == f.v) break;
          }
          std::sort(comp.begin(), comp.end());
          comps.push_back(std::move(comp));
        }
        const int v = f.v;
        call.pop_back();
        if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      }
    }
  }
  return comps;
}

std::vector<std::vector<int>> order_components(const std::vector<std::vector<bool>>& edges,
                                               std::vector<std::vector<int>> comps) {
  const int n = static_cast<int>(edges.size());
  const int ell = static_cast<int>(comps.size());
  std::vector<int> compOf(n, -1);
  for (int c = 0; c < ell; ++c)
    for (int v : comps[c]) compOf[v] = c;

  // direction(a,b): +1 when some edge points from comp a to comp b.
  std::vector<std::vector<int>> dir(ell, std::vector<int>(ell, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!edges[i][j] || compOf[i] == compOf[j]) continue;
      dir[compOf[i]][compOf[j]] = 1;
    }
  for (int a = 0; a < ell; ++a)
    for (int b = a + 1; b < ell; ++b) {
      if (dir[a][b] && dir[b][a])
        throw OrderingAmbiguous("scc_topological: contradictory cross edges");
      if (!dir[a][b] && !dir[b][a])
        throw OrderingAmbiguous("scc_topological: component pair with no edge");
    }
  std::sort(comps.begin(), comps.end(), [&](const std::vector<int>& a, const std::vector<int>& b) {
    return dir[compOf[a[0]]][compOf[b[0]]] == 1;
  });
  return comps;
}

}  // namespace

AuxGraph build_aux_graph(const KappaEstimates& kappa, const Vec& delta, double sigma) {
  AuxGraph g;
  g.n = kappa.size();
  g.sigma = sigma;
  g.edges.assign(g.n, std::vector<bool>(g.n, false));
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      if (i == j || !kappa.defined(i, j)) continue;
      if (kappa.value(i, j) * delta[j] / delta[i] >= sigma) g.edges[i][j] = true;
    }
  return g;
}

std::vector<std::vector<int>> scc_topological(const AuxGraph& graph) {
  return order_components(graph.edges, strongly_connected_components(graph.edges));
}

LayeringResult layering(const OrthonormalBasis& kernel, const Vec& delta, KappaEstimates& kappa,
                        double gamma, bool amortizedChecks) {
  const int n = kernel.ambientDim;
  LayeringResult res;

  const AuxGraph aux = build_aux_graph(kappa, delta, gamma / n);
  std::vector<std::vector<int>> comps = scc_topological(aux);
  const int ell = static_cast<int>(comps.size());
  res.initialComponentCount = ell;

  std::vector<std::vector<bool>> edgeSet = aux.edges;

  if (ell > 1) {
    const OrthonormalBasis scaled = rescaled_subspace(kernel, delta);

    std::vector<LiftVerdict> verdicts;
    if (amortizedChecks) {
      verdicts = verify_lift_suffixes(scaled.vectors, comps, gamma);
    } else {
      verdicts.resize(ell - 1);
      for (int k = 2; k <= ell; ++k) {
        std::vector<int> scan;
        for (int h = ell - 1; h >= k - 1; --h)
          for (int v : comps[h]) scan.push_back(v);
        verdicts[k - 2] = verify_lift_ordered(scaled.vectors, scan, gamma);
      }
    }

    for (int k = 2; k <= ell; ++k) {
      const LiftVerdict& v = verdicts[k - 2];
      if (v.pass) continue;
      LayeringFail fail;
      fail.i = v.certificate.i;
      fail.j = v.certificate.j;
      fail.t = v.certificate.t;
      fail.kappaBefore = kappa.value(fail.i, fail.j);
      kappa.improve(fail.i, fail.j, fail.t * delta[fail.i] / delta[fail.j], -2);
      fail.kappaAfter = kappa.value(fail.i, fail.j);
      edgeSet[fail.i][fail.j] = true;
      res.fails.push_back(fail);
    }
  }

  res.partition.layers = order_components(edgeSet, strongly_connected_components(edgeSet));
  return res;
}

}  // namespace llslp
