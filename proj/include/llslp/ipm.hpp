#pragma once

#include <optional>
#include <string>
#include <vector>

#include "llslp/circuits.hpp"
#include "llslp/layering.hpp"
#include "llslp/numkit.hpp"

namespace llslp {

struct LpInstance {
  Matrix A;
  Vec b;
  Vec c;

  int rows() const { return A.rows(); }
  int cols() const { return A.cols(); }
};

// Throws on dimension mismatch, non-finite data, or rank-deficient A.
void validate_instance(const LpInstance& lp);

struct Iterate {
  Vec x;
  Vec y;
  Vec s;
};

double mu_of(const Iterate& w);
Vec delta_of(const Iterate& w);
double centrality_gap(const Iterate& w);

// Throws NeighborhoodViolation unless w is strictly feasible for lp within
// 1e-9 scaled residuals and centrality_gap(w) <= beta + 1e-9.
void check_in_neighborhood(const LpInstance& lp, const Iterate& w, double beta);

enum class StepKind { Affine, Centrality, Lls };

struct Direction {
  Vec dx;
  Vec dy;
  Vec ds;
  StepKind kind = StepKind::Affine;
  OrderedPartition partition;  // set for Lls
};

struct ResidualPair {
  Vec rx;
  Vec rs;
};

Direction affine_direction(const LpInstance& lp, const Iterate& w);
Direction centrality_direction(const LpInstance& lp, const Iterate& w);
Direction lls_direction(const LpInstance& lp, const Iterate& w, const OrderedPartition& partition);

ResidualPair residuals_of(const Iterate& w, const Direction& d);
double epsilon_measure(const ResidualPair& r);

// Sup of the prefix of step lengths alpha with w + a*d in N(bound) for all
// a <= alpha, located through the per-coordinate quadratics (a quartic root
// isolation with bisection to 1e-12). An initial probe detects alpha = 1 via
// the termination epsilon.
double step_length(const LpInstance& lp, const Iterate& w, const Direction& d, double bound,
                   double terminationEpsilon);

// Full step plus rounding of near-zero residual coordinates to exact zeros;
// verifies feasibility and complementarity of the result.
Iterate exact_termination_round(const LpInstance& lp, const Iterate& w, const Direction& d,
                                double terminationEpsilon);

struct KappaUpdateRecord {
  int i = -1;
  int j = -1;
  double t = 0.0;
  double before = 0.0;
  double after = 0.0;
};

struct IterationRecord {
  int index = 0;
  double mu = 0.0;
  StepKind kind = StepKind::Affine;
  double alpha = 0.0;
  double epsilonAffine = 0.0;
  double epsilonUsed = 0.0;
  double muAfterPredictor = 0.0;
  double gapAfterPredictor = 0.0;
  double gapAfterCorrector = 0.0;
  double gapLinearityError = 0.0;   // |mu(w+aD) - (1-a)mu| / mu
  double affineSumIdentity = 0.0;   // ||Rx+Rs - sqrt(xs/mu)||
  double affineNormIdentity = 0.0;  // | ||Rx||^2 + ||Rs||^2 - n |
  // LLS-only fields.
  bool usedLls = false;
  double llsResidualFloor = 0.0;  // min_i max(|Rx_i|, |Rs_i|)
  double rxDiffNorm = 0.0;
  double rsDiffNorm = 0.0;
  double partitionScore = -1.0;  // direct suffix lifting score (detail mode)
  OrderedPartition partition;
  std::vector<KappaUpdateRecord> kappaUpdates;
  int initialComponentCount = 0;
  // Detail-mode snapshots.
  Vec xAfter, sAfter;
  Vec delta;
  Matrix kappaSnapshot;
};

struct SolveTrace {
  Vec muTrajectory;
  std::vector<IterationRecord> iterations;
  double xi = 1.0;
  double tHat = 1.0;
  std::vector<std::string> notes;
  // Set when the instance decomposed into matroid components.
  std::vector<std::vector<int>> componentSplit;
};

enum class SolveStatus { Optimal, IterationLimit };

struct SolveResult {
  SolveStatus status = SolveStatus::IterationLimit;
  Iterate iterate;
  double objective = 0.0;
  int iterations = 0;
  SolveTrace trace;
};

struct SolveOptions {
  double beta = 0.125;
  double gammaOverride = 0.0;  // 0: use beta / (2^10 n^5)
  double termTol = 1e-11;
  int maxIterations = -1;  // -1: 10 n^2 ceil(log10(1/termTol))
  double pivotTol = kPivotTolDefault;
  bool recordDetail = false;
  bool amortizedChecks = false;
};

SolveResult lp_solve(const LpInstance& lp, const Iterate& w0, const SolveOptions& opts = {});

// Variant with externally supplied initial estimates (used by rescaling
// equivariance checks).
SolveResult lp_solve(const LpInstance& lp, const Iterate& w0, const SolveOptions& opts,
                     const KappaEstimates& initialKappa);

}  // namespace llslp
