#include "llslp/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

namespace llslp {

namespace {

constexpr double kSupportTol = 1e-9;

// Extracts the support of g by a relative threshold and rescales so the
// smallest-index support entry is +1.
Circuit normalized_circuit(Vec g) {
  const int n = static_cast<int>(g.size());
  const double scale = normInf(g);
  Circuit c;
  for (int i = 0; i < n; ++i) {
    if (std::fabs(g[i]) > kSupportTol * scale)
      c.support.push_back(i);
    else
      g[i] = 0.0;
  }
  if (!c.support.empty()) {
    const double head = g[c.support.front()];
    for (int i : c.support) g[i] /= head;
    g[c.support.front()] = 1.0;
  }
  c.g = std::move(g);
  return c;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent[b] = a;
  }
};

// Clique graph on the basis nodes: nodes are basis column indices, an edge
// (u,v) exists when some fundamental circuit contains both; the witness kept
// per edge is the smallest non-basis column inducing it.
struct FundamentalGraph {
  std::vector<int> basisRow;               // column index -> elimination row, -1 off basis
  std::vector<std::vector<int>> clique;    // non-basis column -> basis members of its circuit
  std::map<std::pair<int, int>, int> edgeWitness;
  std::vector<std::vector<int>> adjacency;  // basis column -> sorted neighbor columns
};

FundamentalGraph build_fundamental_graph(const EliminationResult& elim,
                                         const std::vector<Circuit>& fundamentals,
                                         const std::vector<int>& fundamentalOf, int n) {
  FundamentalGraph g;
  g.basisRow.assign(n, -1);
  for (size_t k = 0; k < elim.basisColumns.size(); ++k) g.basisRow[elim.basisColumns[k]] = static_cast<int>(k);
  g.clique.assign(n, {});
  g.adjacency.assign(n, {});
  for (int v = 0; v < n; ++v) {
    if (fundamentalOf[v] < 0) continue;
    const Circuit& c = fundamentals[fundamentalOf[v]];
    for (int member : c.support)
      if (member != v) g.clique[v].push_back(member);
    for (size_t a = 0; a < g.clique[v].size(); ++a)
      for (size_t b = a + 1; b < g.clique[v].size(); ++b) {
        const int u1 = g.clique[v][a], u2 = g.clique[v][b];
        auto key = std::minmax(u1, u2);
        auto it = g.edgeWitness.find(key);
        if (it == g.edgeWitness.end()) {
          g.edgeWitness.emplace(key, v);
          g.adjacency[u1].push_back(u2);
          g.adjacency[u2].push_back(u1);
        }
      }
  }
  for (auto& nbrs : g.adjacency) std::sort(nbrs.begin(), nbrs.end());
  return g;
}

// Multi-source BFS with smallest-index tie-breaking. Returns the first node in
// targets reached, or -1; parent/witness give the tree edges.
int bfs_to_targets(const FundamentalGraph& g, const std::vector<int>& sources,
                   const std::vector<bool>& isTarget, std::vector<int>& parent,
                   std::vector<int>& witness) {
  const int n = static_cast<int>(g.adjacency.size());
  parent.assign(n, -2);
  witness.assign(n, -1);
  std::deque<int> queue;
  std::vector<int> srt = sources;
  std::sort(srt.begin(), srt.end());
  for (int s : srt) {
    if (parent[s] != -2) continue;
    parent[s] = -1;
    if (isTarget[s]) return s;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : g.adjacency[u]) {
      if (parent[v] != -2) continue;
      parent[v] = u;
      witness[v] = g.edgeWitness.at(std::minmax(u, v));
      if (isTarget[v]) return v;
      queue.push_back(v);
    }
  }
  return -1;
}

// Builds the circuit determined by the exchange sets U (basis nodes dropped)
// and V (non-basis columns added, coupled pairwise through the rows of U).
Circuit circuit_from_path(const EliminationResult& elim, const FundamentalGraph& g,
                          const std::vector<int>& U, const std::vector<int>& V, int n) {
  Vec gvec(n, 0.0);
  gvec[V[0]] = 1.0;
  for (size_t t = 0; t < U.size(); ++t) {
    const int row = g.basisRow[U[t]];
    const double a = elim.reduced(row, V[t]);
    const double b = elim.reduced(row, V[t + 1]);
    gvec[V[t + 1]] = -a * gvec[V[t]] / b;
  }
  std::vector<bool> dropped(n, false);
  for (int u : U) dropped[u] = true;
  for (size_t k = 0; k < elim.basisColumns.size(); ++k) {
    const int bcol = elim.basisColumns[k];
    if (dropped[bcol]) continue;
    double acc = 0.0;
    for (int v : V) acc -= elim.reduced(static_cast<int>(k), v) * gvec[v];
    gvec[bcol] = acc;
  }
  return normalized_circuit(std::move(gvec));
}

Circuit pair_circuit_impl(const EliminationResult& elim, const FundamentalGraph& graph,
                          const std::vector<Circuit>& fundamentals, int i, int j, int n) {
  const std::vector<int>& basisRow = graph.basisRow;
  const bool iBasis = basisRow[i] >= 0, jBasis = basisRow[j] >= 0;

  for (const Circuit& c : fundamentals)
    if (c.contains(i) && c.contains(j)) return c;

  std::vector<int> parent, witness;
  std::vector<bool> isTarget(n, false);
  std::vector<int> U, V;

  if (!iBasis && !jBasis) {
    for (int u : graph.clique[j]) isTarget[u] = true;
    const int hit = bfs_to_targets(graph, graph.clique[i], isTarget, parent, witness);
    if (hit < 0) throw SeparatedPair("circuit_through_pair: no connecting path");
    std::vector<int> pathNodes;
    for (int u = hit; u != -1; u = parent[u]) pathNodes.push_back(u);
    std::reverse(pathNodes.begin(), pathNodes.end());
    V.push_back(i);
    for (size_t t = 1; t < pathNodes.size(); ++t) V.push_back(witness[pathNodes[t]]);
    V.push_back(j);
    U = pathNodes;
  } else if (iBasis != jBasis) {
    const int basisEnd = iBasis ? i : j;
    const int freeEnd = iBasis ? j : i;
    for (int u : graph.clique[freeEnd]) isTarget[u] = true;
    const int hit = bfs_to_targets(graph, {basisEnd}, isTarget, parent, witness);
    if (hit < 0) throw SeparatedPair("circuit_through_pair: no connecting path");
    std::vector<int> pathNodes;
    for (int u = hit; u != -1; u = parent[u]) pathNodes.push_back(u);
    std::reverse(pathNodes.begin(), pathNodes.end());
    // pathNodes[0] == basisEnd stays in the basis, later nodes are dropped.
    for (size_t t = 1; t < pathNodes.size(); ++t) {
      V.push_back(witness[pathNodes[t]]);
      U.push_back(pathNodes[t]);
    }
    V.push_back(freeEnd);
  } else {
    isTarget[j] = true;
    const int hit = bfs_to_targets(graph, {i}, isTarget, parent, witness);
    if (hit < 0) throw SeparatedPair("circuit_through_pair: no connecting path");
    std::vector<int> pathNodes;
    for (int u = hit; u != -1; u = parent[u]) pathNodes.push_back(u);
    std::reverse(pathNodes.begin(), pathNodes.end());
    for (size_t t = 1; t < pathNodes.size(); ++t) V.push_back(witness[pathNodes[t]]);
    for (size_t t = 1; t + 1 < pathNodes.size(); ++t) U.push_back(pathNodes[t]);
  }
  return circuit_from_path(elim, graph, U, V, n);
}

}  // namespace

bool Circuit::contains(int i) const {
  return std::binary_search(support.begin(), support.end(), i);
}

KappaEstimates::KappaEstimates(int n)
    : componentId(n, -1), n_(n), kappaHat_(static_cast<size_t>(n) * n, 0.0),
      witness_(static_cast<size_t>(n) * n, -1) {}

bool KappaEstimates::improve(int i, int j, double value, int witnessId) {
  double& slot = kappaHat_[idx(i, j)];
  if (value > slot) {
    slot = value;
    witness_[idx(i, j)] = witnessId;
    return true;
  }
  return false;
}

Circuit fundamental_circuit(const EliminationResult& elim, int i) {
  const int m = elim.reduced.rows();
  const int n = elim.reduced.cols();
  for (int b : elim.basisColumns)
    if (b == i) throw IndependentColumn("fundamental_circuit: column is in the basis");
  double colScale = 1.0;
  for (int r = 0; r < m; ++r) colScale = std::max(colScale, std::fabs(elim.reduced(r, i)));
  Vec g(n, 0.0);
  g[i] = 1.0;
  for (int r = 0; r < m; ++r) {
    const double h = elim.reduced(r, i);
    if (std::fabs(h) > pivot_tolerance() * colScale) g[elim.basisColumns[r]] = -h;
  }
  return normalized_circuit(std::move(g));
}

CircuitAnalysis find_circuits(const Matrix& A) {
  const int n = A.cols();
  CircuitAnalysis out;
  out.elimination = row_reduce(A);
  const EliminationResult& elim = out.elimination;

  std::vector<int> fundamentalOf(n, -1);
  std::vector<bool> inBasis(n, false);
  for (int b : elim.basisColumns) inBasis[b] = true;
  for (int i = 0; i < n; ++i) {
    if (inBasis[i]) continue;
    fundamentalOf[i] = static_cast<int>(out.circuits.size());
    out.circuits.push_back(fundamental_circuit(elim, i));
  }

  UnionFind uf(n);
  for (const Circuit& c : out.circuits)
    for (size_t a = 1; a < c.support.size(); ++a) uf.unite(c.support[0], c.support[a]);

  out.components.componentId.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    const int root = uf.find(i);
    if (out.components.componentId[root] < 0) {
      out.components.componentId[root] = out.components.count();
      out.components.components.push_back({});
    }
    out.components.componentId[i] = out.components.componentId[root];
    out.components.components[out.components.componentId[i]].push_back(i);
  }

  const std::vector<Circuit> fundamentals = out.circuits;
  const FundamentalGraph graph = build_fundamental_graph(elim, fundamentals, fundamentalOf, n);

  std::vector<bool> covered(static_cast<size_t>(n) * n, false);
  auto markCovered = [&](const Circuit& c) {
    for (int a : c.support)
      for (int b : c.support) covered[static_cast<size_t>(a) * n + b] = true;
  };
  for (const Circuit& c : out.circuits) markCovered(c);

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (!out.components.samePair(i, j)) continue;
      if (covered[static_cast<size_t>(i) * n + j]) continue;
      Circuit c = pair_circuit_impl(elim, graph, fundamentals, i, j, n);
      const Vec residual = A.apply(c.g);
      if (norm2(residual) > 1e-7 * std::max(1.0, A.maxAbs() * norm2(c.g)))
        throw Error("find_circuits: propagated vector is not in the kernel");
      markCovered(c);
      out.circuits.push_back(std::move(c));
    }

  out.kappa = KappaEstimates(n);
  out.kappa.componentId = out.components.componentId;
  for (size_t id = 0; id < out.circuits.size(); ++id) {
    const Circuit& c = out.circuits[id];
    for (int a : c.support)
      for (int b : c.support) {
        if (a == b) continue;
        out.kappa.improve(a, b, std::fabs(c.g[b] / c.g[a]), static_cast<int>(id));
      }
  }
  return out;
}

Circuit circuit_through_pair(const CircuitAnalysis& analysis, const Matrix& A, int i, int j) {
  const int n = A.cols();
  if (!analysis.components.samePair(i, j))
    throw SeparatedPair("circuit_through_pair: indices in different components");
  const EliminationResult& elim = analysis.elimination;

  std::vector<int> fundamentalOf(n, -1);
  std::vector<bool> inBasis(n, false);
  for (int b : elim.basisColumns) inBasis[b] = true;
  std::vector<Circuit> fundamentals;
  for (int v = 0; v < n; ++v) {
    if (inBasis[v]) continue;
    fundamentalOf[v] = static_cast<int>(fundamentals.size());
    fundamentals.push_back(fundamental_circuit(elim, v));
  }
  const FundamentalGraph graph = build_fundamental_graph(elim, fundamentals, fundamentalOf, n);

  Circuit c = pair_circuit_impl(elim, graph, fundamentals, i, j, n);
  const Vec residual = A.apply(c.g);
  if (norm2(residual) > 1e-7 * std::max(1.0, A.maxAbs() * norm2(c.g)))
    throw Error("circuit_through_pair: propagated vector is not in the kernel");
  return c;
}

std::vector<Circuit> enumerate_circuits_bruteforce(const Matrix& A) {
  const int n = A.cols();
  const int m = A.rows();
  if (n > 14) throw TooLarge("enumerate_circuits_bruteforce: n > 14");
  std::vector<Circuit> found;
  std::vector<int> subset;

  const int maxCard = std::min(n, m + 1);
  for (int card = 1; card <= maxCard; ++card) {
    subset.assign(card, 0);
    std::iota(subset.begin(), subset.end(), 0);
    for (;;) {
      const Matrix As = A.selectColumns(subset);
      const OrthonormalBasis null = orthonormal_nullspace(As);
      if (null.dim() == 1) {
        const Vec gs = null.vectors.column(0);
        const double scale = normInf(gs);
        bool fullSupport = true;
        for (double v : gs)
          if (std::fabs(v) <= kSupportTol * scale) fullSupport = false;
        if (fullSupport) {
          Vec g(n, 0.0);
          for (int t = 0; t < card; ++t) g[subset[t]] = gs[t];
          found.push_back(normalized_circuit(std::move(g)));
        }
      }
      // Next subset in lexicographic order.
      int pos = card - 1;
      while (pos >= 0 && subset[pos] == n - card + pos) --pos;
      if (pos < 0) break;
      ++subset[pos];
      for (int t = pos + 1; t < card; ++t) subset[t] = subset[t - 1] + 1;
    }
  }
  return found;
}

Matrix kappa_bruteforce(const Matrix& A) {
  const int n = A.cols();
  if (n > 14) throw TooLarge("kappa_bruteforce: n > 14");
  const std::vector<Circuit> circuits = enumerate_circuits_bruteforce(A);
  Matrix kappa(n, n);
  for (const Circuit& c : circuits)
    for (int a : c.support)
      for (int b : c.support) {
        if (a == b) continue;
        kappa(a, b) = std::max(kappa(a, b), std::fabs(c.g[b] / c.g[a]));
      }
  return kappa;
}

}  // namespace llslp
