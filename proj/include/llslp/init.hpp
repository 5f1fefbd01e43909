#pragma once

#include <optional>
#include <string>
#include <vector>

#include "llslp/ipm.hpp"

namespace llslp {

// Auxiliary system with penalized artificial variables, variable order
// (x, xLow, xUp): rows [A -A 0; I 0 I], rhs (b, 2Me), cost (c, Me, 0).
struct ExtendedInstance {
  LpInstance extended;
  double M = 0.0;
  int originalRows = 0;
  int originalCols = 0;
};

ExtendedInstance build_extended(const LpInstance& lp, double M);

// Feasible point of the extended system near the central path with
// mu = (3n)^{-1} (3n M^2 + M e^T c - M e^T d); throws NeighborhoodViolation
// if its centrality gap exceeds 1/8 (M too small).
Iterate initial_point(const ExtendedInstance& ext, const LpInstance& lp);

// Projection of an optimal extended solution onto the original variables; ok
// is false (M too small) when the artificial block is not negligible or the
// upper-bound multipliers are active.
struct MapBackResult {
  bool ok = false;
  Iterate iterate;
};
MapBackResult map_back(const ExtendedInstance& ext, const Iterate& extSolution,
                       const LpInstance& lp);

enum class CertificateKind { PrimalInfeasible, DualInfeasible };

struct Certificate {
  CertificateKind kind = CertificateKind::PrimalInfeasible;
  Vec witness;          // y with A^T y <= 0, b^T y > 0; or x with Ax=0, x>=0, c^T x < 0
  double gain = 0.0;    // b^T y or -c^T x
  double residual = 0.0;  // worst scaled inequality violation
};

// Farkas inequalities at 1e-8 scaled tolerance.
bool verify_certificate(const LpInstance& lp, const Certificate& cert);

enum class FeasibilityStatus { Feasible, PrimalInfeasible, DualInfeasible, Inconclusive };

struct TwoPhaseResult {
  FeasibilityStatus status = FeasibilityStatus::Inconclusive;
  std::optional<Certificate> certificate;
  int iterations = 0;
};

// Phase one decides primal feasibility on (A, b, 0); phase two decides dual
// feasibility on (A, 0, c). Inconclusive signals that the chi-bar guess (and
// so M) was too small.
TwoPhaseResult two_phase_feasibility(const LpInstance& lp, double chiGuess,
                                     const SolveOptions& opts);

enum class PipelineStatus { Optimal, PrimalInfeasible, DualInfeasible, IterationLimit };

struct AttemptRecord {
  double guess = 0.0;
  double bigM = 0.0;
  std::string outcome;
};

struct PipelineResult {
  PipelineStatus status = PipelineStatus::IterationLimit;
  Iterate iterate;
  double objective = 0.0;
  std::optional<Certificate> certificate;
  SolveTrace trace;  // trace of the final extended solve
  std::vector<AttemptRecord> attempts;
  int iterations = 0;
};

struct MSearchOptions {
  SolveOptions solver;
  double bigMOverride = 0.0;   // > 0: no search, single attempt
  double initialGuess = 0.0;   // > 0: overrides the estimate-derived guess
  int maxSquarings = 60;
};

// Feasibility phases, then the big-M solve with repeated squaring of the
// chi-bar guess until the solution maps back. Throws SearchLimit after
// maxSquarings failed attempts.
PipelineResult solve_with_m_search(const LpInstance& lp, const MSearchOptions& opts = {});

}  // namespace llslp
