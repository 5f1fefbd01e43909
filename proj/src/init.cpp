#include "llslp/init.hpp"

#include <algorithm>
#include <cmath>

#include "llslp/imbalance.hpp"

namespace llslp {

namespace {

double farkas_scale(const LpInstance& lp, const Vec& witness) {
  return std::max({lp.A.maxAbs() * normInf(witness), norm2(lp.b), norm2(lp.c), 1.0});
}

Certificate primal_certificate(const LpInstance& lp, const Vec& y) {
  Certificate cert;
  cert.kind = CertificateKind::PrimalInfeasible;
  cert.witness = y;
  cert.gain = dot(lp.b, y);
  const Vec aty = lp.A.applyTransposed(y);
  double violation = 0.0;
  for (double v : aty) violation = std::max(violation, v);
  cert.residual = violation;
  return cert;
}

Certificate dual_certificate(const LpInstance& lp, const Vec& x) {
  Certificate cert;
  cert.kind = CertificateKind::DualInfeasible;
  cert.witness = x;
  cert.gain = -dot(lp.c, x);
  const Vec ax = lp.A.apply(x);
  double violation = normInf(ax);
  for (double v : x) violation = std::max(violation, -v);
  cert.residual = violation;
  return cert;
}

}  // namespace

ExtendedInstance build_extended(const LpInstance& lp, double M) {
  if (!(M > 0.0)) throw Error("build_extended: M must be positive");
  const int m = lp.rows(), n = lp.cols();
  ExtendedInstance ext;
  ext.M = M;
  ext.originalRows = m;
  ext.originalCols = n;
  ext.extended.A = Matrix(m + n, 3 * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      ext.extended.A(i, j) = lp.A(i, j);
      ext.extended.A(i, n + j) = -lp.A(i, j);
    }
  for (int j = 0; j < n; ++j) {
    ext.extended.A(m + j, j) = 1.0;
    ext.extended.A(m + j, 2 * n + j) = 1.0;
  }
  ext.extended.b.assign(m + n, 2.0 * M);
  for (int i = 0; i < m; ++i) ext.extended.b[i] = lp.b[i];
  ext.extended.c.assign(3 * n, 0.0);
  for (int j = 0; j < n; ++j) {
    ext.extended.c[j] = lp.c[j];
    ext.extended.c[n + j] = M;
  }
  return ext;
}

Iterate initial_point(const ExtendedInstance& ext, const LpInstance& lp) {
  const int m = ext.originalRows, n = ext.originalCols;
  const double M = ext.M;
  const Vec d = min_norm_solution(lp.A, lp.b);

  Iterate w;
  w.x.assign(3 * n, M);
  for (int j = 0; j < n; ++j) {
    w.x[n + j] = M - d[j];
    if (!(w.x[n + j] > 0.0))
      throw NeighborhoodViolation("initial_point: M below the min-norm solution scale");
  }
  w.y.assign(m + n, 0.0);
  for (int j = 0; j < n; ++j) w.y[m + j] = -M;
  w.s.assign(3 * n, M);
  for (int j = 0; j < n; ++j) {
    w.s[j] = M + lp.c[j];
    if (!(w.s[j] > 0.0))
      throw NeighborhoodViolation("initial_point: M below the cost scale");
  }
  check_in_neighborhood(ext.extended, w, 0.125);
  return w;
}

MapBackResult map_back(const ExtendedInstance& ext, const Iterate& extSolution,
                       const LpInstance& lp) {
  const int m = ext.originalRows, n = ext.originalCols;
  MapBackResult out;
  const double auxTol = 1e-7 * ext.M * n;
  for (int j = 0; j < n; ++j)
    if (extSolution.x[n + j] > auxTol) return out;

  out.iterate.x.assign(extSolution.x.begin(), extSolution.x.begin() + n);
  out.iterate.y.assign(extSolution.y.begin(), extSolution.y.begin() + m);
  out.iterate.s.assign(extSolution.s.begin(), extSolution.s.begin() + n);

  // The upper-bound multipliers must be inactive for the dual to project.
  const double scale = std::max({lp.A.maxAbs() * normInf(out.iterate.y), norm2(lp.c), 1.0});
  const Vec dResid = sub(add(lp.A.applyTransposed(out.iterate.y), out.iterate.s), lp.c);
  if (norm2(dResid) > 1e-8 * scale) return out;
  const double pScale = std::max({lp.A.maxAbs() * normInf(out.iterate.x), norm2(lp.b), 1.0});
  if (norm2(sub(lp.A.apply(out.iterate.x), lp.b)) > 1e-8 * pScale) return out;
  out.ok = true;
  return out;
}

bool verify_certificate(const LpInstance& lp, const Certificate& cert) {
  const double scale = farkas_scale(lp, cert.witness);
  if (cert.kind == CertificateKind::PrimalInfeasible) {
    const Vec aty = lp.A.applyTransposed(cert.witness);
    for (double v : aty)
      if (v > 1e-8 * scale) return false;
    return dot(lp.b, cert.witness) > 1e-8 * scale;
  }
  const Vec ax = lp.A.apply(cert.witness);
  if (normInf(ax) > 1e-8 * scale) return false;
  for (double v : cert.witness)
    if (v < -1e-8 * scale) return false;
  return dot(lp.c, cert.witness) < -1e-8 * scale;
}

TwoPhaseResult two_phase_feasibility(const LpInstance& lp, double chiGuess,
                                     const SolveOptions& opts) {
  TwoPhaseResult out;
  const int n = lp.cols();

  // Phase one: primal feasibility via (A, b, 0). b = 0 is trivially feasible.
  if (norm2(lp.b) > 0.0) {
    LpInstance phase{lp.A, lp.b, constantVec(n, 0.0)};
    const Vec d = min_norm_solution(lp.A, lp.b);
    const double M = std::max(15.0 * chiGuess * norm2(d), 1.0);
    const ExtendedInstance ext = build_extended(phase, M);
    const Iterate w0 = initial_point(ext, phase);
    const SolveResult res = lp_solve(ext.extended, w0, opts);
    out.iterations += res.iterations;
    if (res.status != SolveStatus::Optimal) return out;  // inconclusive
    if (res.objective > 1e-8 * M * n) {
      Certificate cert = primal_certificate(phase, Vec(res.iterate.y.begin(),
                                                       res.iterate.y.begin() + lp.rows()));
      if (!verify_certificate(lp, cert)) return out;  // guess too small
      out.status = FeasibilityStatus::PrimalInfeasible;
      out.certificate = cert;
      return out;
    }
  }

  // Phase two: dual feasibility via (A, 0, c). c = 0 admits y = 0, s = 0.
  if (norm2(lp.c) > 0.0) {
    LpInstance phase{lp.A, constantVec(lp.rows(), 0.0), lp.c};
    const double M = std::max(15.0 * (chiGuess + 1.0) * norm2(lp.c), 1.0);
    const ExtendedInstance ext = build_extended(phase, M);
    const Iterate w0 = initial_point(ext, phase);
    const SolveResult res = lp_solve(ext.extended, w0, opts);
    out.iterations += res.iterations;
    if (res.status != SolveStatus::Optimal) return out;
    if (res.objective < -1e-8 * M * n) {
      Certificate cert =
          dual_certificate(phase, Vec(res.iterate.x.begin(), res.iterate.x.begin() + n));
      if (!verify_certificate(lp, cert)) return out;
      out.status = FeasibilityStatus::DualInfeasible;
      out.certificate = cert;
      return out;
    }
  }
  out.status = FeasibilityStatus::Feasible;
  return out;
}

PipelineResult solve_with_m_search(const LpInstance& lp, const MSearchOptions& opts) {
  validate_instance(lp);
  PipelineResult out;
  const int n = lp.cols();
  const Vec d = min_norm_solution(lp.A, lp.b);

  double guess = opts.initialGuess;
  if (guess <= 0.0) {
    const CircuitAnalysis analysis = find_circuits(lp.A);
    const RescalingResult est =
        analyze_rescaling(CircuitRatioDigraph::fromEstimates(analysis.kappa));
    guess = std::max(100.0, n * est.tHat * est.tHat * est.xi);
  }

  const bool overridden = opts.bigMOverride > 0.0;
  const int attempts = overridden ? 1 : std::max(opts.maxSquarings, 1);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    AttemptRecord rec;
    rec.guess = guess;
    const double M = overridden
                         ? opts.bigMOverride
                         : std::max({15.0 * (guess + 1.0) * norm2(lp.c),
                                     15.0 * guess * norm2(d), 1.0});
    rec.bigM = M;
    try {
      if (!overridden) {
        const TwoPhaseResult phases = two_phase_feasibility(lp, guess, opts.solver);
        out.iterations += phases.iterations;
        if (phases.status == FeasibilityStatus::PrimalInfeasible ||
            phases.status == FeasibilityStatus::DualInfeasible) {
          out.status = phases.status == FeasibilityStatus::PrimalInfeasible
                           ? PipelineStatus::PrimalInfeasible
                           : PipelineStatus::DualInfeasible;
          out.certificate = phases.certificate;
          rec.outcome = "infeasibility certificate";
          out.attempts.push_back(rec);
          return out;
        }
        if (phases.status == FeasibilityStatus::Inconclusive) {
          rec.outcome = "feasibility phase inconclusive";
          out.attempts.push_back(rec);
          guess = guess * guess;
          continue;
        }
      }

      const ExtendedInstance ext = build_extended(lp, M);
      const Iterate w0 = initial_point(ext, lp);
      const SolveResult res = lp_solve(ext.extended, w0, opts.solver);
      out.iterations += res.iterations;
      if (res.status != SolveStatus::Optimal) {
        rec.outcome = "iteration limit";
        out.attempts.push_back(rec);
        if (overridden) {
          out.status = PipelineStatus::IterationLimit;
          out.trace = res.trace;
          return out;
        }
        guess = guess * guess;
        continue;
      }
      const MapBackResult mapped = map_back(ext, res.iterate, lp);
      if (!mapped.ok) {
        rec.outcome = "M too small";
        out.attempts.push_back(rec);
        if (overridden) throw Error("the supplied big-M value is too small for this instance");
        guess = guess * guess;
        continue;
      }
      rec.outcome = "optimal";
      out.attempts.push_back(rec);
      out.status = PipelineStatus::Optimal;
      out.iterate = mapped.iterate;
      out.objective = dot(lp.c, mapped.iterate.x);
      out.trace = res.trace;
      return out;
    } catch (const NeighborhoodViolation&) {
      rec.outcome = "initial point outside the neighborhood";
      out.attempts.push_back(rec);
      if (overridden) throw;
      guess = guess * guess;
    }
  }
  throw SearchLimit("solve_with_m_search: no adequate M after the squaring budget");
}

}  // namespace llslp
