// End-to-end acceptance suite: one pass/fail line per criterion.

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "llslp/cli.hpp"
#include "llslp/diagnostics.hpp"
#include "llslp/imbalance.hpp"
#include "llslp/init.hpp"
#include "llslp/ipm.hpp"
#include "llslp/layering.hpp"
#include "llslp/lifting.hpp"
#include "test_util.hpp"

using namespace llslp;
namespace tu = llslp::testutil;

namespace {

int failures = 0;

struct Criterion {
  int id;
  std::string title;
  bool pass = true;
  long checks = 0;
  std::string firstFailure;

  void require(bool ok, const std::string& detail) {
    ++checks;
    if (!ok && pass) {
      pass = false;
      firstFailure = detail;
    } else if (!ok) {
      pass = false;
    }
  }
  void report() const {
    if (pass) {
      std::printf("[PASS] criterion %2d: %s (%ld checks)\n", id, title.c_str(), checks);
    } else {
      std::printf("[FAIL] criterion %2d: %s — %s\n", id, title.c_str(), firstFailure.c_str());
      ++failures;
    }
  }
};

double maxEntry(const Matrix& k) {
  double top = 0.0;
  for (int i = 0; i < k.rows(); ++i)
    for (int j = 0; j < k.cols(); ++j) top = std::max(top, k(i, j));
  return top;
}

struct CorpusEntry {
  Matrix A;
  Matrix kappaTrue;
  double kappaW = 0.0;
  double kappaStar = 1.0;
  double chibar = 1.0;
  CircuitAnalysis analysis;
};

std::vector<CorpusEntry> buildCorpus(int count) {
  auto gen = tu::rng(0xacce97);
  std::vector<CorpusEntry> corpus;
  while (static_cast<int>(corpus.size()) < count) {
    std::uniform_int_distribution<int> mPick(1, 4);
    const int m = mPick(gen);
    std::uniform_int_distribution<int> nPick(m + 1, 8);
    const int n = nPick(gen);
    CorpusEntry e;
    e.A = tu::randomFullRankMatrix(gen, m, n);
    e.kappaTrue = kappa_bruteforce(e.A);
    e.kappaW = maxEntry(e.kappaTrue);
    e.kappaStar = kappa_star_bruteforce(e.kappaTrue);
    e.chibar = chibar_bruteforce(e.A);
    e.analysis = find_circuits(e.A);
    corpus.push_back(std::move(e));
  }
  return corpus;
}

struct SuiteInstance {
  std::string name;
  LpInstance lp;
  Iterate central;  // exactly central warm start
  double optimum = 0.0;
};

// Exact optimum over basic feasible solutions; the instances are built
// feasible and bounded, so a vertex attains the optimum.
double enumerateOptimum(const LpInstance& lp) {
  const int m = lp.rows(), n = lp.cols();
  double best = 1e300;
  std::vector<int> subset(m);
  for (int t = 0; t < m; ++t) subset[t] = t;
  for (;;) {
    const Matrix B = lp.A.selectColumns(subset);
    bool singular = false;
    try {
      row_reduce(B);
    } catch (const RankDeficient&) {
      singular = true;
    }
    if (!singular) {
      const Vec xB = least_squares(B, lp.b);
      bool feasible = true;
      for (double v : xB)
        if (v < -1e-9) feasible = false;
      if (feasible) {
        double obj = 0.0;
        for (int t = 0; t < m; ++t) obj += lp.c[subset[t]] * xB[t];
        best = std::min(best, obj);
      }
    }
    int pos = m - 1;
    while (pos >= 0 && subset[pos] == n - m + pos) --pos;
    if (pos < 0) break;
    ++subset[pos];
    for (int t = pos + 1; t < m; ++t) subset[t] = subset[t - 1] + 1;
  }
  return best;
}

std::vector<SuiteInstance> buildSuite() {
  std::vector<SuiteInstance> suite;
  {
    SuiteInstance f4;
    f4.name = "f4";
    f4.lp = LpInstance{Matrix{{1, 1}}, {1.0}, {1.0, 0.0}};
    f4.central = Iterate{{1.0 / 3.0, 2.0 / 3.0}, {-1.0}, {2.0, 1.0}};
    f4.optimum = 0.0;
    suite.push_back(std::move(f4));
  }
  {
    // Klee-Minty cube in dimension 4, slack form: maximize the weighted sum.
    SuiteInstance km;
    km.name = "klee-minty-4";
    km.lp.A = Matrix{{1, 0, 0, 0, 1, 0, 0, 0},
                     {4, 1, 0, 0, 0, 1, 0, 0},
                     {8, 4, 1, 0, 0, 0, 1, 0},
                     {16, 8, 4, 1, 0, 0, 0, 1}};
    km.lp.b = {5, 25, 125, 625};
    km.lp.c = {-8, -4, -2, -1, 0, 0, 0, 0};
    km.optimum = -625.0;
    // Interior point: x in the open cube, slacks strictly positive; make it
    // exactly central by back-solving the cost (the cost above is the real
    // one, so no warm start is stored; the big-M path is used instead).
    suite.push_back(std::move(km));
  }
  auto gen = tu::rng(0x5013e5);
  std::uniform_real_distribution<double> xPick(0.5, 2.0), yPick(-1.0, 1.0);
  while (suite.size() < 31) {
    std::uniform_int_distribution<int> mPick(1, 4);
    const int m = mPick(gen);
    std::uniform_int_distribution<int> nPick(m + 1, 8);
    const int n = nPick(gen);
    SuiteInstance inst;
    inst.name = "random-" + std::to_string(suite.size());
    inst.lp.A = tu::randomFullRankMatrix(gen, m, n);
    Vec x0(n), y0(m);
    for (double& v : x0) v = xPick(gen);
    for (double& v : y0) v = yPick(gen);
    inst.lp.b = inst.lp.A.apply(x0);
    Vec s0(n);
    for (int i = 0; i < n; ++i) s0[i] = 1.0 / x0[i];
    inst.lp.c = add(inst.lp.A.applyTransposed(y0), s0);
    inst.central = Iterate{x0, y0, s0};
    inst.optimum = enumerateOptimum(inst.lp);
    suite.push_back(std::move(inst));
  }
  return suite;
}

bool stronglyConnectedIn(const std::vector<int>& layer, const Matrix& kappaTrue, const Vec& delta,
                         double sigma) {
  const int k = static_cast<int>(layer.size());
  if (k <= 1) return true;
  std::vector<std::vector<bool>> edges(k, std::vector<bool>(k, false));
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      if (a == b) continue;
      const int i = layer[a], j = layer[b];
      if (kappaTrue(i, j) > 0.0 && kappaTrue(i, j) * delta[j] / delta[i] >= sigma)
        edges[a][b] = true;
    }
  for (int s = 0; s < k; ++s) {
    std::vector<bool> seen(k, false);
    seen[s] = true;
    std::vector<int> stack{s};
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w = 0; w < k; ++w)
        if (edges[v][w] && !seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
    }
    for (bool b : seen)
      if (!b) return false;
    }
  return true;
}

}  // namespace

int main() {
  std::printf("acceptance suite\n================\n");

  const std::vector<CorpusEntry> corpus = buildCorpus(200);
  std::printf("corpus: %zu random full-rank integer matrices\n", corpus.size());

  // 1. Condition-number sandwich.
  {
    Criterion c{1, "condition number sandwich sqrt(1+kappa^2) <= chibar <= n kappa"};
    for (const CorpusEntry& e : corpus) {
      const int n = e.A.cols();
      c.require(std::sqrt(1.0 + e.kappaW * e.kappaW) <= e.chibar + 1e-8,
                "lower bound violated (chibar=" + std::to_string(e.chibar) + ")");
      c.require(e.chibar <= n * e.kappaW + 1e-8,
                "upper bound violated (chibar=" + std::to_string(e.chibar) + ")");
    }
    c.report();
  }

  // 2. Duality of kappa and of lifting scores.
  {
    Criterion c{2, "duality kappa_ij(W) = kappa_ji(W-perp), ell^W(I) = ell^Wperp(comp)"};
    auto gen = tu::rng(0xd7a1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (size_t t = 0; t < corpus.size(); t += 4) {
      const CorpusEntry& e = corpus[t];
      const int n = e.A.cols();
      const OrthonormalBasis W = kernel_basis(e.A);
      const Matrix Aperp = W.vectors.transposed();
      const Matrix kPerp = kappa_bruteforce(Aperp);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          if (e.kappaTrue(i, j) == 0.0 && kPerp(j, i) == 0.0) continue;
          c.require(tu::approxEqRel(e.kappaTrue(i, j), kPerp(j, i), 1e-8),
                    "kappa duality off at a pair");
        }
      const OrthonormalBasis Wp = orthonormal_range(e.A.transposed());
      std::vector<int> I, comp;
      for (int i = 0; i < n; ++i) (unit(gen) < 0.5 ? I : comp).push_back(i);
      if (I.empty() || comp.empty()) continue;
      const double a = lifting_score(W, I);
      const double b = lifting_score(Wp, comp);
      c.require(std::fabs(a - b) <= 1e-8 * std::max({a, b, 1.0}), "lifting score duality off");
    }
    c.report();
  }

  // 3. Estimate law.
  {
    Criterion c{3, "estimate law kappaHat <= kappa <= (kappa*)^2 kappaHat"};
    for (const CorpusEntry& e : corpus) {
      const int n = e.A.cols();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j || !e.analysis.kappa.defined(i, j)) continue;
          const double hat = e.analysis.kappa.value(i, j);
          c.require(hat <= e.kappaTrue(i, j) * (1.0 + 1e-9), "kappaHat above kappa");
          c.require(e.kappaTrue(i, j) <= e.kappaStar * e.kappaStar * hat * (1.0 + 1e-9),
                    "kappa above (kappa*)^2 kappaHat");
        }
    }
    c.report();
  }

  // 4. Rescaling quality.
  {
    Criterion c{4, "rescaling kappa^d <= (kappa*)^3; single-circuit fixtures exact"};
    for (const CorpusEntry& e : corpus) {
      const auto res = analyze_rescaling(CircuitRatioDigraph::fromEstimates(e.analysis.kappa));
      Vec invD(res.d.size());
      for (size_t i = 0; i < res.d.size(); ++i) invD[i] = 1.0 / res.d[i];
      const double kappaD = maxEntry(kappa_bruteforce(e.A.scaledColumns(invD)));
      c.require(kappaD <= std::pow(e.kappaStar, 3) * (1.0 + 1e-8) + 1e-12,
                "rescaled kappa exceeds (kappa*)^3");
    }
    for (double ratio : {2.0, 3.0, 10.0, 0.25}) {
      const Matrix A{{1.0, ratio}};
      const auto analysis = find_circuits(A);
      const auto res = analyze_rescaling(CircuitRatioDigraph::fromEstimates(analysis.kappa));
      const Vec invD = {1.0 / res.d[0], 1.0 / res.d[1]};
      const double kappaD = maxEntry(kappa_bruteforce(A.scaledColumns(invD)));
      const double kappaStar = kappa_star_bruteforce(kappa_bruteforce(A));
      c.require(std::fabs(kappaD - kappaStar) <= 1e-9 * std::max(1.0, kappaStar),
                "single-circuit rescaling not exact");
    }
    c.report();
  }

  const std::vector<SuiteInstance> suite = buildSuite();
  std::printf("suite: %zu end-to-end instances\n", suite.size());

  SolveOptions traced;
  traced.recordDetail = true;

  std::vector<SolveResult> warmResults;
  std::vector<const SuiteInstance*> warmInstances;
  for (const SuiteInstance& inst : suite) {
    if (inst.central.x.empty()) continue;
    warmResults.push_back(lp_solve(inst.lp, inst.central, traced));
    warmInstances.push_back(&inst);
  }

  // 5/6. Affine identities and gap linearity along every solve.
  {
    Criterion c5{5, "affine residual identities at every predictor iteration"};
    Criterion c6{6, "gap linearity mu(w + a d) = (1 - a) mu(w) at every accepted step"};
    for (const SolveResult& res : warmResults) {
      for (const IterationRecord& rec : res.trace.iterations) {
        const size_t n = rec.xAfter.empty() ? res.iterate.x.size() : rec.xAfter.size();
        c5.require(rec.affineSumIdentity <= 1e-9 * std::sqrt(static_cast<double>(n)),
                   "Rx+Rs identity residual " + std::to_string(rec.affineSumIdentity));
        c5.require(rec.affineNormIdentity <= 1e-8,
                   "norm identity residual " + std::to_string(rec.affineNormIdentity));
        if (rec.alpha < 1.0)
          c6.require(rec.gapLinearityError <= 1e-9,
                     "gap linearity error " + std::to_string(rec.gapLinearityError));
      }
    }
    c5.report();
    c6.report();
  }

  // 7. Single-layer LLS equals the affine direction.
  {
    Criterion c{7, "single-layer layered step equals the affine direction"};
    auto gen = tu::rng(0x11a7e5);
    std::uniform_real_distribution<double> xPick(0.5, 2.0), yPick(-1.0, 1.0), muPick(0.05, 2.0);
    for (int t = 0; t < 50; ++t) {
      std::uniform_int_distribution<int> mPick(1, 3);
      const int m = mPick(gen);
      std::uniform_int_distribution<int> nPick(m + 1, 8);
      const int n = nPick(gen);
      LpInstance lp;
      lp.A = tu::randomFullRankMatrix(gen, m, n);
      Iterate w;
      w.x.resize(n);
      for (double& v : w.x) v = xPick(gen);
      w.y.resize(m);
      for (double& v : w.y) v = yPick(gen);
      const double mu = muPick(gen);
      w.s.resize(n);
      for (int i = 0; i < n; ++i) w.s[i] = mu / w.x[i];
      lp.b = lp.A.apply(w.x);
      lp.c = add(lp.A.applyTransposed(w.y), w.s);
      OrderedPartition single;
      single.layers.push_back({});
      for (int i = 0; i < n; ++i) single.layers[0].push_back(i);
      const Direction aff = affine_direction(lp, w);
      const Direction lls = lls_direction(lp, w, single);
      const double scaleDx = std::max(1.0, normInf(aff.dx));
      const double scaleDs = std::max(1.0, normInf(aff.ds));
      for (int i = 0; i < n; ++i) {
        c.require(std::fabs(aff.dx[i] - lls.dx[i]) <= 1e-10 * scaleDx, "dx mismatch");
        c.require(std::fabs(aff.ds[i] - lls.ds[i]) <= 1e-10 * scaleDs, "ds mismatch");
      }
    }
    c.report();
  }

  // 8/9. LLS proximity and layering soundness over the traced solves.
  {
    Criterion c8{8, "layered residuals within 6 n^1.5 ell(J) of affine when ell small"};
    Criterion c9{9, "emitted layerings balanced and truly strongly connected"};
    for (size_t r = 0; r < warmResults.size(); ++r) {
      const SolveResult& res = warmResults[r];
      const SuiteInstance& inst = *warmInstances[r];
      const bool decomposed = !res.trace.componentSplit.empty();
      Matrix kappaTrue;
      if (!decomposed) kappaTrue = kappa_bruteforce(inst.lp.A);
      for (const IterationRecord& rec : res.trace.iterations) {
        if (!rec.usedLls || rec.partitionScore < 0.0) continue;
        const int n = static_cast<int>(rec.delta.size());
        const double beta = 0.125;
        if (rec.partitionScore <= beta / (32.0 * n * n)) {
          const double bound = 6.0 * std::pow(n, 1.5) * rec.partitionScore + 1e-9;
          c8.require(rec.rxDiffNorm <= bound, "Rx difference above the proximity bound");
          c8.require(rec.rsDiffNorm <= bound, "Rs difference above the proximity bound");
        }
        const double gamma = default_gamma(n, beta);
        c9.require(rec.partitionScore <= gamma * (1.0 + 1e-9),
                   "suffix lifting score above gamma");
        if (!decomposed && n == inst.lp.cols()) {
          for (const auto& layer : rec.partition.layers)
            c9.require(stronglyConnectedIn(layer, kappaTrue, rec.delta, gamma / n),
                       "layer not strongly connected in the true long-edge graph");
        }
      }
    }
    c8.report();
    c9.report();
  }

  // 10/11/15 need the full pipeline.
  {
    Criterion c10{10, "end-to-end optimality against the vertex-enumeration oracle"};
    Criterion c15{15, "iteration budget 50 sqrt(n) log10(mu0/tol) per solve"};
    for (const SuiteInstance& inst : suite) {
      PipelineResult res;
      try {
        res = solve_with_m_search(inst.lp);
      } catch (const Error& e) {
        c10.require(false, inst.name + " threw: " + e.what());
        continue;
      }
      c10.require(res.status == PipelineStatus::Optimal, inst.name + " not optimal");
      if (res.status != PipelineStatus::Optimal) continue;
      c10.require(std::fabs(res.objective - inst.optimum) <=
                      1e-7 * std::max(1.0, std::fabs(inst.optimum)),
                  inst.name + " objective " + std::to_string(res.objective) + " vs oracle " +
                      std::to_string(inst.optimum));
      const Iterate& w = res.iterate;
      const double pScale =
          std::max({inst.lp.A.maxAbs() * normInf(w.x), norm2(inst.lp.b), 1.0});
      c10.require(norm2(sub(inst.lp.A.apply(w.x), inst.lp.b)) <= 1e-8 * pScale,
                  inst.name + " primal residual too large");
      const double dScale =
          std::max({inst.lp.A.maxAbs() * normInf(w.y), norm2(inst.lp.c), 1.0});
      c10.require(norm2(sub(add(inst.lp.A.applyTransposed(w.y), w.s), inst.lp.c)) <=
                      1e-8 * dScale,
                  inst.name + " dual residual too large");
      for (size_t i = 0; i < w.x.size(); ++i) {
        c10.require(w.x[i] >= 0.0 && w.s[i] >= 0.0, inst.name + " negative coordinate");
        c10.require(w.x[i] == 0.0 || w.s[i] == 0.0, inst.name + " inexact complementarity");
      }
      // Budget on the final extended solve.
      if (!res.trace.muTrajectory.empty()) {
        const double mu0 = res.trace.muTrajectory.front();
        const int n = 3 * inst.lp.cols();
        const double budget = 50.0 * std::sqrt(n) * std::log10(mu0 / 1e-11);
        c15.require(static_cast<double>(res.trace.iterations.size()) <= budget,
                    inst.name + " used " + std::to_string(res.trace.iterations.size()) +
                        " iterations");
      }
    }
    for (size_t r = 0; r < warmResults.size(); ++r) {
      const SolveResult& res = warmResults[r];
      const double mu0 = res.trace.muTrajectory.front();
      const int n = static_cast<int>(warmInstances[r]->lp.cols());
      const double budget = 50.0 * std::sqrt(n) * std::log10(std::max(mu0, 1.0) / 1e-11);
      c15.require(res.iterations <= budget, warmInstances[r]->name + " warm solve over budget");
    }
    c10.report();

    Criterion c11{11, "Farkas certificates verify on the crafted infeasible pair"};
    {
      LpInstance primalInf{Matrix{{1, 1}}, {-1.0}, {0.0, 0.0}};
      const PipelineResult res = solve_with_m_search(primalInf);
      c11.require(res.status == PipelineStatus::PrimalInfeasible, "primal certificate missing");
      if (res.certificate) c11.require(verify_certificate(primalInf, *res.certificate),
                                       "primal certificate failed verification");
      LpInstance dualInf{Matrix{{1, -1}}, {0.0}, {-1.0, -1.0}};
      const PipelineResult res2 = solve_with_m_search(dualInf);
      c11.require(res2.status == PipelineStatus::DualInfeasible, "dual certificate missing");
      if (res2.certificate) c11.require(verify_certificate(dualInf, *res2.certificate),
                                        "dual certificate failed verification");
    }
    c11.report();
    c15.report();
  }

  // 12. Scaling invariance of the solve.
  {
    Criterion c{12, "scaling invariance of mu-sequence, step kinds and layerings"};
    auto gen = tu::rng(0x5ca1e);
    std::uniform_real_distribution<double> logScale(-3.0, 3.0);
    int done = 0;
    for (size_t r = 0; r < warmResults.size() && done < 20; ++r) {
      const SuiteInstance& inst = *warmInstances[r];
      const SolveResult& base = warmResults[r];
      if (!base.trace.componentSplit.empty()) continue;
      const int n = inst.lp.cols();
      Vec d(n);
      for (double& v : d) v = std::pow(10.0, logScale(gen));
      LpInstance scaled;
      scaled.A = inst.lp.A.scaledColumns(d);
      scaled.b = inst.lp.b;
      scaled.c = hadamard(inst.lp.c, d);
      Iterate w0;
      w0.x = divide(inst.central.x, d);
      w0.y = inst.central.y;
      w0.s = hadamard(inst.central.s, d);
      const CircuitAnalysis baseAnalysis = find_circuits(inst.lp.A);
      KappaEstimates kappaScaled(n);
      kappaScaled.componentId = baseAnalysis.kappa.componentId;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j && baseAnalysis.kappa.defined(i, j))
            kappaScaled.improve(i, j, baseAnalysis.kappa.value(i, j) * d[i] / d[j], -1);
      SolveResult res;
      try {
        res = lp_solve(scaled, w0, traced, kappaScaled);
      } catch (const Error& e) {
        c.require(false, inst.name + " scaled run threw: " + e.what());
        continue;
      }
      ++done;
      c.require(res.status == base.status, inst.name + " status changed under rescaling");
      const size_t steps = std::min(base.trace.iterations.size(), res.trace.iterations.size());
      c.require(base.trace.iterations.size() == res.trace.iterations.size(),
                inst.name + " iteration counts differ");
      for (size_t t = 0; t < steps; ++t) {
        const IterationRecord& a = base.trace.iterations[t];
        const IterationRecord& b = res.trace.iterations[t];
        c.require(std::fabs(a.mu - b.mu) <= 1e-6 * std::max({a.mu, b.mu, 1e-300}),
                  inst.name + " mu sequence diverged at iteration " + std::to_string(t));
        c.require(a.kind == b.kind, inst.name + " step kind differs at iteration " +
                                        std::to_string(t));
        if (a.usedLls && b.usedLls)
          c.require(a.partition == b.partition,
                    inst.name + " layer partition differs at iteration " + std::to_string(t));
      }
    }
    c.require(done >= 20, "fewer than 20 rescaled runs executed");
    c.report();
  }

  // 13. Initialization quality.
  {
    Criterion c{13, "initial point inside N(1/8); mu0 = M^2 exactly on the cancelling fixture"};
    {
      const LpInstance f4{Matrix{{1, 1}}, {1.0}, {1.0, 0.0}};
      const ExtendedInstance ext = build_extended(f4, 40.0);
      const Iterate w0 = initial_point(ext, f4);
      c.require(std::fabs(mu_of(w0) - 1600.0) <= 1e-12 * 1600.0, "mu0 != M^2 on the fixture");
    }
    int tested = 0;
    for (size_t t = 0; t < corpus.size() && tested < 60; t += 3) {
      const CorpusEntry& e = corpus[t];
      auto gen = tu::rng(static_cast<unsigned>(0xbead + t));
      std::uniform_real_distribution<double> entry(-2.0, 2.0);
      Vec b(e.A.rows()), cVec(e.A.cols());
      for (double& v : b) v = entry(gen);
      for (double& v : cVec) v = entry(gen);
      const LpInstance lp{e.A, b, cVec};
      const Vec d = min_norm_solution(e.A, b);
      const double M =
          std::max({15.0 * (e.chibar + 1.0) * norm2(cVec), 15.0 * e.chibar * norm2(d), 1.0});
      try {
        const Iterate w0 = initial_point(build_extended(lp, M), lp);
        c.require(centrality_gap(w0) <= 0.125, "initial point outside N(1/8)");
        ++tested;
      } catch (const NeighborhoodViolation&) {
        c.require(false, "initial point rejected despite the chibar precondition");
      }
    }
    c.report();
  }

  // 14. Potential sanity over the traced solves.
  {
    Criterion c{14, "potentials monotone, bounded by 2n, total bounded"};
    for (size_t r = 0; r < warmResults.size(); ++r) {
      const SolveResult& res = warmResults[r];
      if (!res.trace.componentSplit.empty()) continue;
      const int n = warmInstances[r]->lp.cols();
      const double gamma = default_gamma(n, 0.125);
      const PotentialState state = potentials_from_trace(res.trace, n, gamma);
      if (state.updates() == 0) continue;
      double totalLog2 = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          const Vec series = state.psiSeries(i, j);
          for (size_t t = 1; t < series.size(); ++t)
            c.require(series[t] >= series[t - 1] - 1e-12, "potential decreased");
          c.require(state.psi(i, j) <= 2.0 * n && state.psi(i, j) >= 1.0,
                    "potential outside [1, 2n]");
          totalLog2 += std::log2(state.psi(i, j));
        }
      c.require(totalLog2 <= n * (n - 1) * (std::log2(n) + 1.0) + 1e-9,
                "total potential above the bound");
    }
    c.report();
  }

  std::printf("================\n%s (%d criterion failures)\n",
              failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES PRESENT", failures);
  return failures == 0 ? 0 : 1;
}
