#include "llslp/ipm.hpp"

#include <algorithm>
#include <cmath>

#include "llslp/imbalance.hpp"
#include "llslp/lifting.hpp"

namespace llslp {

namespace {

double feasibility_scale(const LpInstance& lp, const Iterate& w) {
  return std::max({lp.A.maxAbs() * (normInf(w.x) + normInf(w.y)), norm2(lp.b), norm2(lp.c), 1.0});
}

// Newton direction for the centering parameter sigma. The normal equations
// A Diag(x/s) A^T dy = -A v are solved as the equivalent weighted least
// squares min || Diag(sqrt(x/s)) A^T dy + Diag(sqrt(s/x)) v ||, which halves
// the exponent range of the weights; a kernel projection then refines
// A dx = 0.
Direction newton_direction(const LpInstance& lp, const Iterate& w, double sigma) {
  const int n = lp.cols();
  const double mu = mu_of(w);
  Vec v(n), xs(n), wsqrt(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = w.x[i] / w.s[i];
    wsqrt[i] = std::sqrt(xs[i]);
    v[i] = sigma * mu / w.s[i] - w.x[i];
    if (!std::isfinite(xs[i]) || !(w.x[i] > 0.0) || !(w.s[i] > 0.0))
      throw SingularSystem("iterate left the positive orthant");
  }
  const Matrix B = lp.A.transposed().scaledRows(wsqrt);
  // Solves A W A^T z = r without forming the Gram matrix.
  const auto solveNormal = [&](const Vec& r) -> Vec {
    Vec g;
    try {
      g = min_norm_solution(lp.A, r);
    } catch (const RankDeficient&) {
      throw SingularSystem("constraint matrix lost rank in the direction solve");
    }
    Vec h(n);
    for (int i = 0; i < n; ++i) h[i] = g[i] / wsqrt[i];
    return least_squares_full_rank(B, h);
  };
  const auto backOut = [&](const Vec& dy) {
    Direction d;
    d.dy = dy;
    d.ds = scale(lp.A.applyTransposed(dy), -1.0);
    d.dx.resize(n);
    // The sum equation s dx + x ds = sigma mu e - xs holds exactly here.
    for (int i = 0; i < n; ++i) d.dx[i] = v[i] - xs[i] * d.ds[i];
    return d;
  };

  // Componentwise-stable right-hand side: -W^{-1/2} v = sqrt(xs) - sigma mu / sqrt(xs).
  Vec rhs(n);
  for (int i = 0; i < n; ++i) {
    const double root = std::sqrt(w.x[i] * w.s[i]);
    rhs[i] = root - sigma * mu / root;
  }
  Vec dy = least_squares_full_rank(B, rhs);
  Direction d = backOut(dy);
  for (int refine = 0; refine < 2; ++refine) {
    const Vec resid = lp.A.apply(d.dx);
    if (norm2(resid) == 0.0) break;
    const Vec e = solveNormal(scale(resid, -1.0));
    dy = add(dy, e);
    d = backOut(dy);
  }
  d.kind = sigma == 0.0 ? StepKind::Affine : StepKind::Centrality;
  return d;
}

// Minimizes ||Diag(weight)(target + fixed + basis z)|| where the basis columns
// may be dependent on these rows; dependent columns are dropped first.
Vec layer_displacement(const Vec& weight, const Vec& target, const Matrix& basis,
                       const Vec& fixed) {
  const int rows = basis.rows();
  Vec disp(rows, 0.0);
  if (basis.cols() == 0) return disp;
  const std::vector<int> keep = independent_columns(basis.scaledRows(weight));
  const Matrix reduced = basis.selectColumns(keep);
  const Vec z = constrained_least_squares(weight, target, reduced, fixed);
  for (int i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (size_t t = 0; t < keep.size(); ++t) acc += reduced(i, static_cast<int>(t)) * z[t];
    disp[i] = acc;
  }
  return disp;
}

// Sequential layered least squares over one subspace: backward over the
// layers for weights/targets given in that subspace's coordinates.
Vec sequential_lls(const OrthonormalBasis& space, const std::vector<std::vector<int>>& layers,
                   const Vec& weight, const Vec& target) {
  const int n = space.ambientDim;
  Vec current(n, 0.0);  // running point in the subspace
  std::vector<int> fixedRows;
  for (size_t k = layers.size(); k-- > 0;) {
    const std::vector<int>& layer = layers[k];
    // Basis of the subspace vectors vanishing on the already-fixed rows.
    Matrix freeBasis;
    if (fixedRows.empty()) {
      freeBasis = space.vectors;
    } else {
      const OrthonormalBasis Z = orthonormal_nullspace(space.vectors.selectRows(fixedRows));
      freeBasis = space.vectors.times(Z.vectors);
    }
    if (freeBasis.cols() > 0) {
      const Vec disp = layer_displacement(gather(weight, layer), gather(target, layer),
                                          freeBasis.selectRows(layer), gather(current, layer));
      // Recover the full-space move: solve freeBasis coords from the layer fit.
      // disp = freeBasis_layer z with z the chosen coefficients; recompute z to
      // apply it to all coordinates.
      const std::vector<int> keep = independent_columns(
          freeBasis.selectRows(layer).scaledRows(gather(weight, layer)));
      const Matrix reducedLayer = freeBasis.selectRows(layer).selectColumns(keep);
      const Vec z = least_squares(reducedLayer, disp);
      const Matrix reducedFull = freeBasis.selectColumns(keep);
      const Vec move = reducedFull.apply(z);
      for (int i = 0; i < n; ++i) current[i] += move[i];
    }
    for (int i : layer) fixedRows.push_back(i);
  }
  return current;
}

struct Quartic {
  // coeff[d] multiplies alpha^d.
  double coeff[5] = {0, 0, 0, 0, 0};

  double eval(double a) const {
    return ((((coeff[4] * a) + coeff[3]) * a + coeff[2]) * a + coeff[1]) * a + coeff[0];
  }
};

using Poly = std::vector<double>;

Poly trim(Poly p, double eps) {
  while (p.size() > 1 && std::fabs(p.back()) <= eps) p.pop_back();
  return p;
}

double polyEval(const Poly& p, double x) {
  double acc = 0.0;
  for (size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

Poly polyDeriv(const Poly& p) {
  if (p.size() <= 1) return {0.0};
  Poly d(p.size() - 1);
  for (size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<double>(i);
  return d;
}

Poly polyNegRem(const Poly& a, const Poly& b, double eps) {
  Poly r = a;
  while (r.size() >= b.size() && r.size() > 1) {
    const double f = r.back() / b.back();
    const size_t shift = r.size() - b.size();
    for (size_t i = 0; i < b.size(); ++i) r[i + shift] -= f * b[i];
    r.pop_back();
    r = trim(std::move(r), eps);
    if (r.size() < b.size()) break;
  }
  for (double& v : r) v = -v;
  return trim(std::move(r), eps);
}

std::vector<Poly> sturmChain(const Poly& f, double eps) {
  std::vector<Poly> chain;
  chain.push_back(trim(f, eps));
  chain.push_back(trim(polyDeriv(f), eps));
  while (chain.back().size() > 1 || std::fabs(chain.back()[0]) > eps) {
    const Poly& a = chain[chain.size() - 2];
    const Poly& b = chain.back();
    if (b.size() == 1 && std::fabs(b[0]) <= eps) break;
    Poly r = polyNegRem(a, b, eps);
    if (r.size() == 1 && std::fabs(r[0]) <= eps) break;
    chain.push_back(std::move(r));
    if (chain.back().size() == 1) break;
  }
  return chain;
}

int signVariations(const std::vector<Poly>& chain, double x, double eps) {
  int vars = 0;
  int prev = 0;
  for (const Poly& p : chain) {
    const double v = polyEval(p, x);
    const int s = v > eps ? 1 : (v < -eps ? -1 : 0);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++vars;
    prev = s;
  }
  return vars;
}

// Distinct roots of f in (lo, hi], isolated by Sturm bisection to 1e-12.
void isolateRoots(const std::vector<Poly>& chain, double lo, double hi, double eps,
                  std::vector<double>& out) {
  const int count = signVariations(chain, lo, eps) - signVariations(chain, hi, eps);
  if (count <= 0) return;
  if (hi - lo <= 1e-12) {
    out.push_back(hi);
    return;
  }
  const double mid = 0.5 * (lo + hi);
  isolateRoots(chain, lo, mid, eps, out);
  isolateRoots(chain, mid, hi, eps, out);
}

}  // namespace

void validate_instance(const LpInstance& lp) {
  if (lp.A.rows() < 1 || lp.A.cols() < 1) throw DimensionMismatch("empty constraint matrix");
  if (static_cast<int>(lp.b.size()) != lp.rows()) throw DimensionMismatch("b length != rows of A");
  if (static_cast<int>(lp.c.size()) != lp.cols()) throw DimensionMismatch("c length != cols of A");
  if (!lp.A.allFinite()) throw Error("non-finite entries in A");
  for (double v : lp.b)
    if (!std::isfinite(v)) throw Error("non-finite entries in b");
  for (double v : lp.c)
    if (!std::isfinite(v)) throw Error("non-finite entries in c");
  kernel_basis(lp.A);  // throws RankDeficient unless full row rank
}

double mu_of(const Iterate& w) { return dot(w.x, w.s) / static_cast<double>(w.x.size()); }

Vec delta_of(const Iterate& w) {
  Vec d(w.x.size());
  for (size_t i = 0; i < d.size(); ++i) d[i] = std::sqrt(w.s[i] / w.x[i]);
  return d;
}

double centrality_gap(const Iterate& w) {
  const double mu = mu_of(w);
  double acc = 0.0;
  for (size_t i = 0; i < w.x.size(); ++i) {
    const double t = w.x[i] * w.s[i] / mu - 1.0;
    acc += t * t;
  }
  return std::sqrt(acc);
}

void check_in_neighborhood(const LpInstance& lp, const Iterate& w, double beta) {
  if (static_cast<int>(w.x.size()) != lp.cols() || static_cast<int>(w.s.size()) != lp.cols() ||
      static_cast<int>(w.y.size()) != lp.rows())
    throw DimensionMismatch("iterate dimensions");
  for (int i = 0; i < lp.cols(); ++i)
    if (!(w.x[i] > 0.0) || !(w.s[i] > 0.0))
      throw NeighborhoodViolation("iterate is not strictly positive");
  const double scale = feasibility_scale(lp, w);
  const Vec pResid = sub(lp.A.apply(w.x), lp.b);
  const Vec dResid = sub(add(lp.A.applyTransposed(w.y), w.s), lp.c);
  if (norm2(pResid) > 1e-9 * scale || norm2(dResid) > 1e-9 * scale)
    throw NeighborhoodViolation("iterate violates the linear constraints");
  if (centrality_gap(w) > beta + 1e-9)
    throw NeighborhoodViolation("iterate is outside the required neighborhood");
}

Direction affine_direction(const LpInstance& lp, const Iterate& w) {
  return newton_direction(lp, w, 0.0);
}

Direction centrality_direction(const LpInstance& lp, const Iterate& w) {
  return newton_direction(lp, w, 1.0);
}

Direction lls_direction(const LpInstance& lp, const Iterate& w, const OrderedPartition& partition) {
  const int n = lp.cols();
  {
    std::vector<bool> seen(n, false);
    int covered = 0;
    for (const auto& layer : partition.layers)
      for (int i : layer) {
        if (i < 0 || i >= n || seen[i]) throw InvalidPartition("layers must partition the columns");
        seen[i] = true;
        ++covered;
      }
    if (covered != n) throw InvalidPartition("layers must cover all columns");
  }
  const Vec delta = delta_of(w);
  Direction d;
  d.kind = StepKind::Lls;
  d.partition = partition;

  // Primal: backward over layers in ker(A), weights delta, target x.
  const OrthonormalBasis W = kernel_basis(lp.A);
  d.dx = sequential_lls(W, partition.layers, delta, w.x);

  // Dual: forward over layers in range(A^T), weights 1/delta, target s.
  const OrthonormalBasis Wp = orthonormal_columns(lp.A.transposed());
  Vec invDelta(n);
  for (int i = 0; i < n; ++i) invDelta[i] = 1.0 / delta[i];
  std::vector<std::vector<int>> reversed(partition.layers.rbegin(), partition.layers.rend());
  d.ds = sequential_lls(Wp, reversed, invDelta, w.s);

  d.dy = least_squares(lp.A.transposed(), scale(d.ds, -1.0));
  return d;
}

ResidualPair residuals_of(const Iterate& w, const Direction& d) {
  const double sqrtMu = std::sqrt(mu_of(w));
  const Vec delta = delta_of(w);
  const int n = static_cast<int>(w.x.size());
  ResidualPair r;
  r.rx.resize(n);
  r.rs.resize(n);
  for (int i = 0; i < n; ++i) {
    r.rx[i] = delta[i] * (w.x[i] + d.dx[i]) / sqrtMu;
    r.rs[i] = (w.s[i] + d.ds[i]) / (delta[i] * sqrtMu);
  }
  return r;
}

double epsilon_measure(const ResidualPair& r) {
  double worst = 0.0;
  for (size_t i = 0; i < r.rx.size(); ++i)
    worst = std::max(worst, std::min(std::fabs(r.rx[i]), std::fabs(r.rs[i])));
  return worst;
}

double step_length(const LpInstance& lp, const Iterate& w, const Direction& d, double bound,
                   double terminationEpsilon) {
  (void)lp;
  const int n = static_cast<int>(w.x.size());
  const double mu = mu_of(w);

  double dirNorm = 0.0;
  for (int i = 0; i < n; ++i)
    dirNorm = std::max({dirNorm, std::fabs(d.dx[i]), std::fabs(d.ds[i])});
  if (dirNorm == 0.0) {
    if (mu <= 1e-300) return 1.0;
    throw Degenerate("zero direction at positive duality gap");
  }

  // Probe alpha = 1: exact termination.
  {
    const ResidualPair r = residuals_of(w, d);
    if (epsilon_measure(r) <= terminationEpsilon) {
      bool nonneg = true;
      for (int i = 0; i < n; ++i) {
        if (w.x[i] + d.dx[i] < -1e-9 * std::max(w.x[i], 1.0)) nonneg = false;
        if (w.s[i] + d.ds[i] < -1e-9 * std::max(w.s[i], 1.0)) nonneg = false;
      }
      if (nonneg) return 1.0;
    }
  }

  // Membership along the ray: N_i(a) = q_i(a) - (1-a) mu with q_i quadratic,
  // and F(a) = sum N_i(a)^2 - bound^2 mu^2 (1-a)^2 <= 0. All scaled by 1/mu.
  Poly F(5, 0.0);
  for (int i = 0; i < n; ++i) {
    const double a0 = (w.x[i] * w.s[i] - mu) / mu;
    const double a1 = (w.x[i] * d.ds[i] + w.s[i] * d.dx[i] + mu) / mu;
    const double a2 = d.dx[i] * d.ds[i] / mu;
    F[0] += a0 * a0;
    F[1] += 2.0 * a0 * a1;
    F[2] += 2.0 * a0 * a2 + a1 * a1;
    F[3] += 2.0 * a1 * a2;
    F[4] += a2 * a2;
  }
  F[0] -= bound * bound;
  F[1] += 2.0 * bound * bound;
  F[2] -= bound * bound;

  if (polyEval(F, 0.0) >= 0.0) return 0.0;

  // Tail-safe membership indicator at a = 1 - u: the head product
  // (x+dx)(s+ds) is formed directly so the quadratic loses no digits as the
  // gap factor (1-a) vanishes.
  const auto memberTail = [&](double u) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double head = (w.x[i] + d.dx[i]) * (w.s[i] + d.ds[i]);
      const double slope = w.x[i] * d.ds[i] + w.s[i] * d.dx[i] + 2.0 * d.dx[i] * d.ds[i];
      const double q = head + u * (-slope + u * d.dx[i] * d.ds[i]);
      const double ratio = q / (u * mu) - 1.0;
      acc += ratio * ratio;
      if (!(acc <= 1e300)) return false;
    }
    return acc <= bound * bound;
  };
  const auto member = [&](double a) {
    if (a <= 0.0) return true;
    if (a >= 1.0) return false;
    return memberTail(1.0 - a);
  };

  // Root isolation stays away from a = 1 where the quartic underflows.
  const double tailWidth = 1e-5;
  double maxCoeff = 0.0;
  for (double v : F) maxCoeff = std::max(maxCoeff, std::fabs(v));
  const double eps = 1e-14 * std::max(maxCoeff, 1.0);
  const std::vector<Poly> chain = sturmChain(F, eps);
  std::vector<double> roots;
  isolateRoots(chain, 0.0, 1.0 - tailWidth, eps, roots);
  std::sort(roots.begin(), roots.end());

  // The prefix ends at the first root past which F turns positive.
  double alpha = -1.0;
  for (size_t t = 0; t < roots.size(); ++t) {
    const double next = t + 1 < roots.size() ? roots[t + 1] : 1.0 - tailWidth;
    const double probe = std::min(roots[t] + 1e-9, 0.5 * (roots[t] + next));
    if (polyEval(F, probe) > 0.0) {
      alpha = roots[t];
      break;
    }
  }
  if (alpha < 0.0) {
    // Membership persists through 1 - tailWidth; locate the boundary in the
    // tail by bisection on u = 1 - a.
    double uGood = tailWidth;          // member
    double uBad = 1e-15;               // expected violation
    if (!memberTail(uGood)) {
      // Fall back to a plain bisection on [0, 1 - tailWidth].
      double lo = 0.0, hi = 1.0 - tailWidth;
      while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (member(mid) ? lo : hi) = mid;
      }
      return lo;
    }
    if (memberTail(uBad)) return 1.0 - uBad;
    for (int it = 0; it < 200 && uGood - uBad > 1e-18 && uGood / uBad > 1.0 + 1e-12; ++it) {
      const double um = std::sqrt(uGood * uBad);
      (memberTail(um) ? uGood : uBad) = um;
    }
    return 1.0 - uGood;
  }
  // Guard against a missed crossing: the returned point must itself satisfy
  // the membership test.
  if (!member(alpha)) {
    double lo = 0.0, hi = alpha;
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      (member(mid) ? lo : hi) = mid;
    }
    return lo;
  }
  return alpha;
}

Iterate exact_termination_round(const LpInstance& lp, const Iterate& w, const Direction& d,
                                double terminationEpsilon) {
  const int n = lp.cols();
  const ResidualPair r = residuals_of(w, d);
  if (epsilon_measure(r) > terminationEpsilon)
    throw RoundingFailed("termination rounding requested above the epsilon threshold");

  Iterate out;
  out.x = add(w.x, d.dx);
  out.y = add(w.y, d.dy);
  out.s = add(w.s, d.ds);
  constexpr double kZeroResidual = 1e-6;
  for (int i = 0; i < n; ++i) {
    if (std::fabs(r.rx[i]) <= kZeroResidual) out.x[i] = 0.0;
    if (std::fabs(r.rs[i]) <= kZeroResidual) out.s[i] = 0.0;
  }
  for (int i = 0; i < n; ++i) {
    if (out.x[i] < 0.0 || out.s[i] < 0.0)
      throw RoundingFailed("rounded point has a negative coordinate");
    if (out.x[i] != 0.0 && out.s[i] != 0.0)
      throw RoundingFailed("rounded point is not complementary");
  }
  const double scale = feasibility_scale(lp, out);
  const double pResid = norm2(sub(lp.A.apply(out.x), lp.b));
  if (pResid > 1e-8 * scale)
    throw RoundingFailed("rounded point violates primal feasibility: residual " +
                         std::to_string(pResid) + " over scale " + std::to_string(scale));
  const double dResid = norm2(sub(add(lp.A.applyTransposed(out.y), out.s), lp.c));
  if (dResid > 1e-8 * scale)
    throw RoundingFailed("rounded point violates dual feasibility: residual " +
                         std::to_string(dResid) + " over scale " + std::to_string(scale));
  return out;
}

namespace {

SolveResult solve_connected(const LpInstance& lp, const Iterate& w0, const SolveOptions& opts,
                            KappaEstimates kappa) {
  const int n = lp.cols();
  const double beta = opts.beta;
  const double gamma = opts.gammaOverride > 0.0 ? opts.gammaOverride : default_gamma(n, beta);
  const double termEps = opts.termTol * (0.5 - 0.75 * beta);
  const double llsThreshold = 10.0 * std::pow(n, 1.5) * gamma;
  const int maxIters = opts.maxIterations >= 0
                           ? opts.maxIterations
                           : static_cast<int>(10.0 * n * n *
                                              std::ceil(std::log10(1.0 / opts.termTol)));

  SolveResult res;
  res.trace.notes.push_back("gamma=" + std::to_string(gamma));
  {
    const auto graph = CircuitRatioDigraph::fromEstimates(kappa);
    const RescalingResult est = analyze_rescaling(graph);
    res.trace.xi = est.xi;
    res.trace.tHat = est.tHat;
  }
  const OrthonormalBasis kernel = kernel_basis(lp.A);

  Iterate w = w0;
  int acceleratingRun = 0;
  double lastAlpha = 0.0;
  // A warm start within N(2 beta) is re-centered before the main loop.
  if (centrality_gap(w) > beta + 1e-9) {
    const Direction corr = centrality_direction(lp, w);
    w.x = add(w.x, corr.dx);
    w.y = add(w.y, corr.dy);
    w.s = add(w.s, corr.ds);
  }
  check_in_neighborhood(lp, w, beta);

  for (int iter = 0;; ++iter) {
    const double mu = mu_of(w);
    res.trace.muTrajectory.push_back(mu);
    if (iter >= maxIters) {
      res.status = SolveStatus::IterationLimit;
      res.iterate = w;
      res.iterations = iter;
      res.objective = dot(lp.c, w.x);
      return res;
    }

    if (mu < 1e-280) throw NumericalBreakdown("duality gap underflow");

    IterationRecord rec;
    rec.index = iter;
    rec.mu = mu;

    Direction affine = affine_direction(lp, w);
    const ResidualPair affRes = residuals_of(w, affine);
    rec.epsilonAffine = epsilon_measure(affRes);
    {
      Vec target(n);
      for (int i = 0; i < n; ++i) target[i] = std::sqrt(w.x[i] * w.s[i] / mu);
      Vec sum = add(affRes.rx, affRes.rs);
      rec.affineSumIdentity = norm2(sub(sum, target));
      rec.affineNormIdentity =
          std::fabs(dot(affRes.rx, affRes.rx) + dot(affRes.rs, affRes.rs) - n);
    }

    Direction step = std::move(affine);
    rec.kind = StepKind::Affine;
    // An affine direction already below the termination epsilon ends the
    // solve; it coincides with the layered direction of the terminal
    // partition, so the layering pass would be redundant.
    const bool affineTerminal =
        rec.epsilonAffine <= termEps && step_length(lp, w, step, 2.0 * beta, termEps) >= 1.0;
    // An accelerating run of affine steps marks a crossover epoch: take a
    // layered step then rather than grinding mu into the rounding floor.
    const bool forcedLayered = acceleratingRun >= 3;
    if (!affineTerminal && (rec.epsilonAffine < llsThreshold || forcedLayered)) {
      const Vec delta = delta_of(w);
      const LayeringResult layers = layering(kernel, delta, kappa, gamma, opts.amortizedChecks);
      Direction lls = lls_direction(lp, w, layers.partition);
      const ResidualPair llsRes = residuals_of(w, lls);
      rec.kind = StepKind::Lls;
      rec.usedLls = true;
      rec.partition = layers.partition;
      rec.initialComponentCount = layers.initialComponentCount;
      for (const LayeringFail& f : layers.fails) {
        KappaUpdateRecord u;
        u.i = f.i;
        u.j = f.j;
        u.t = f.t;
        u.before = f.kappaBefore;
        u.after = f.kappaAfter;
        rec.kappaUpdates.push_back(u);
      }
      rec.rxDiffNorm = norm2(sub(llsRes.rx, affRes.rx));
      rec.rsDiffNorm = norm2(sub(llsRes.rs, affRes.rs));
      double floorVal = 1e300;
      for (int i = 0; i < n; ++i)
        floorVal = std::min(floorVal, std::max(std::fabs(llsRes.rx[i]), std::fabs(llsRes.rs[i])));
      rec.llsResidualFloor = floorVal;
      if (opts.recordDetail) {
        rec.delta = delta;
        rec.partitionScore = partition_lifting_score(kernel, delta, layers.partition.layers);
      }
      // A balanced layering keeps the layered residuals within
      // 6 n^{3/2} ell(J) <= 6 n^{3/2} gamma of the affine ones and above the
      // per-coordinate floor; violations mean the rescaled subspace ran out
      // of precision, so the affine direction is kept for this step.
      const double proximitySlack = 12.0 * std::pow(n, 1.5) * gamma + 1e-9;
      const double epsLls = epsilon_measure(llsRes);
      if (floorVal < 0.5 - 0.75 * beta - 0.01 || epsLls > rec.epsilonAffine + proximitySlack) {
        rec.kind = StepKind::Affine;
        rec.usedLls = false;
        res.trace.notes.push_back("discarded an ill-conditioned layered step at iteration " +
                                  std::to_string(iter));
      } else {
        step = std::move(lls);
      }
    }
    rec.epsilonUsed = epsilon_measure(residuals_of(w, step));
    if (opts.recordDetail) {
      rec.kappaSnapshot = Matrix(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j && kappa.defined(i, j)) rec.kappaSnapshot(i, j) = kappa.value(i, j);
      if (rec.delta.empty()) rec.delta = delta_of(w);
    }

    double alpha = step_length(lp, w, step, 2.0 * beta, termEps);
    rec.alpha = alpha;
    // Termination: the epsilon threshold guarantees the rounding succeeds;
    // in the regime where rounding-noise floors epsilon above it, any step
    // with all minority residuals below the zeroing level is also tried, and
    // accepted only when the rounded point verifies.
    if (alpha >= 1.0 || rec.epsilonUsed <= 1e-6) {
      try {
        res.iterate =
            exact_termination_round(lp, w, step, std::max(termEps, rec.epsilonUsed * 1.0001));
        res.status = SolveStatus::Optimal;
        res.iterations = iter + 1;
        res.objective = dot(lp.c, res.iterate.x);
        rec.alpha = 1.0;
        rec.muAfterPredictor = 0.0;
        rec.gapLinearityError = 0.0;
        res.trace.iterations.push_back(std::move(rec));
        res.trace.muTrajectory.push_back(0.0);
        return res;
      } catch (const RoundingFailed&) {
        if (alpha >= 1.0) alpha = 1.0 - 1e-9;
      }
    }

    Iterate wPred;
    double alphaUsed = alpha;
    for (int attempt = 0;; ++attempt) {
      wPred.x = add(w.x, scale(step.dx, alphaUsed));
      wPred.y = add(w.y, scale(step.dy, alphaUsed));
      wPred.s = add(w.s, scale(step.ds, alphaUsed));
      // The sup sits on the neighborhood boundary where the re-evaluated gap
      // carries noise of order eps/(1-alpha); back off until the evaluated
      // point itself satisfies the bound.
      if (centrality_gap(wPred) <= 2.0 * beta || attempt >= 60) break;
      alphaUsed = 1.0 - 1.25 * (1.0 - alphaUsed);
      if (alphaUsed <= 0.0) {
        alphaUsed = 0.0;
        wPred = w;
        break;
      }
    }
    rec.alpha = alphaUsed;
    const double muPred = mu_of(wPred);
    rec.muAfterPredictor = muPred;
    rec.gapAfterPredictor = centrality_gap(wPred);
    rec.gapLinearityError = std::fabs(muPred - (1.0 - alphaUsed) * mu) / mu;

    const Direction corr = centrality_direction(lp, wPred);
    Iterate wNext;
    wNext.x = add(wPred.x, corr.dx);
    wNext.y = add(wPred.y, corr.dy);
    wNext.s = add(wPred.s, corr.ds);
    rec.gapAfterCorrector = centrality_gap(wNext);
    if (!(rec.gapAfterCorrector <= 2.0 * beta))
      throw NumericalBreakdown("centrality gap above 1/4 after the corrector");
    for (int i = 0; i < n; ++i)
      if (!(wNext.x[i] > 0.0) || !(wNext.s[i] > 0.0))
        throw NumericalBreakdown("corrector left the positive orthant");

    // Feasibility refinement: rounding in the updates drifts the iterate off
    // the affine constraints; left alone the drift compounds and fabricates a
    // phantom converged coordinate. The corrections are weighted by the
    // iterate so the relative change per coordinate stays at rounding level.
    {
      const Vec pResid = sub(lp.b, lp.A.apply(wNext.x));
      if (norm2(pResid) > 0.0) {
        try {
          // min ||u|| with (A Diag(x)) u = residual, applied as x*u and
          // damped so no coordinate moves more than 40% relative.
          Vec u = min_norm_solution(lp.A.scaledColumns(wNext.x), pResid);
          const double uMax = normInf(u);
          if (uMax > 0.4) u = scale(u, 0.4 / uMax);
          wNext.x = add(wNext.x, hadamard(wNext.x, u));
        } catch (const Error&) {
        }
      }
      const Vec dResid = sub(lp.c, add(lp.A.applyTransposed(wNext.y), wNext.s));
      if (norm2(dResid) > 0.0) {
        try {
          // min || (r - A^T dy)/s ||, then shift s by the remainder.
          Vec sinv(n);
          for (int i = 0; i < n; ++i) sinv[i] = 1.0 / wNext.s[i];
          Vec dy =
              least_squares_full_rank(lp.A.transposed().scaledRows(sinv), hadamard(sinv, dResid));
          Vec ds = sub(dResid, lp.A.applyTransposed(dy));
          double rel = 0.0;
          for (int i = 0; i < n; ++i) rel = std::max(rel, std::fabs(ds[i]) / wNext.s[i]);
          if (rel > 0.4) {
            dy = scale(dy, 0.4 / rel);
            ds = scale(ds, 0.4 / rel);
          }
          wNext.y = add(wNext.y, dy);
          wNext.s = add(wNext.s, ds);
        } catch (const Error&) {
        }
      }
    }

    if (opts.recordDetail) {
      rec.xAfter = wNext.x;
      rec.sAfter = wNext.s;
    }
    if (rec.alpha >= 0.5 && rec.alpha > lastAlpha)
      ++acceleratingRun;
    else
      acceleratingRun = 0;
    lastAlpha = rec.alpha;
    res.trace.iterations.push_back(std::move(rec));
    w = std::move(wNext);
  }
}

SolveResult solve_decomposed(const LpInstance& lp, const Iterate& w0, const SolveOptions& opts,
                             const CircuitAnalysis& analysis) {
  const int n = lp.cols();
  SolveResult merged;
  merged.status = SolveStatus::Optimal;
  merged.iterate.x.assign(n, 0.0);
  merged.iterate.s.assign(n, 0.0);
  merged.trace.componentSplit = analysis.components.components;

  for (const std::vector<int>& comp : analysis.components.components) {
    const Matrix Acols = lp.A.selectColumns(comp);
    const std::vector<int> rows = independent_columns(Acols.transposed());
    if (rows.empty()) {
      // Zero columns: the subproblem is min c_i x_i over x_i >= 0. A valid
      // warm start has s_i = c_i > 0, so the optimum is x_i = 0.
      for (int i : comp) {
        merged.iterate.x[i] = 0.0;
        merged.iterate.s[i] = lp.c[i];
      }
      continue;
    }
    LpInstance subLp;
    subLp.A = Acols.selectRows(rows);
    subLp.c = gather(lp.c, comp);
    Vec xComp = gather(w0.x, comp);
    subLp.b = subLp.A.apply(xComp);

    Iterate subStart;
    subStart.x = xComp;
    subStart.s = gather(w0.s, comp);
    subStart.y = least_squares(subLp.A.transposed(), sub(subLp.c, subStart.s));

    const CircuitAnalysis subAnalysis = find_circuits(subLp.A);
    const SolveResult part = solve_connected(subLp, subStart, opts, subAnalysis.kappa);
    if (part.status != SolveStatus::Optimal) merged.status = part.status;
    for (size_t t = 0; t < comp.size(); ++t) {
      merged.iterate.x[comp[t]] = part.iterate.x[t];
      merged.iterate.s[comp[t]] = part.iterate.s[t];
    }
    merged.iterations += part.iterations;
    for (double m : part.trace.muTrajectory) merged.trace.muTrajectory.push_back(m);
    for (const IterationRecord& r : part.trace.iterations) merged.trace.iterations.push_back(r);
  }

  merged.iterate.y = least_squares(lp.A.transposed(), sub(lp.c, merged.iterate.s));
  merged.objective = dot(lp.c, merged.iterate.x);
  return merged;
}

}  // namespace

SolveResult lp_solve(const LpInstance& lp, const Iterate& w0, const SolveOptions& opts) {
  validate_instance(lp);
  check_in_neighborhood(lp, w0, opts.beta);
  const CircuitAnalysis analysis = find_circuits(lp.A);
  if (analysis.components.count() > 1) return solve_decomposed(lp, w0, opts, analysis);
  return solve_connected(lp, w0, opts, analysis.kappa);
}

SolveResult lp_solve(const LpInstance& lp, const Iterate& w0, const SolveOptions& opts,
                     const KappaEstimates& initialKappa) {
  validate_instance(lp);
  check_in_neighborhood(lp, w0, opts.beta);
  const CircuitAnalysis analysis = find_circuits(lp.A);
  if (analysis.components.count() > 1) return solve_decomposed(lp, w0, opts, analysis);
  return solve_connected(lp, w0, opts, initialKappa);
}

}  // namespace llslp
