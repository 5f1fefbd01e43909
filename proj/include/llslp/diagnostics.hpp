#pragma once

#include <string>
#include <vector>

#include "llslp/ipm.hpp"

namespace llslp {

// Estimated pair potential: log of the rescaled circuit-imbalance estimate,
// normalized by log(4 n tHat / gamma).
double rho_estimate(double kappaHatIj, double deltaI, double deltaJ, double tHat, double gamma,
                    int n);

// Running per-pair potentials over a solve. Ordered pairs (i, j), i != j.
class PotentialState {
 public:
  PotentialState(int n, double tHat, double gamma);

  // mu must strictly decrease across calls; rhoHat is n x n (diagonal unused).
  void update(double mu, const Matrix& rhoHat);

  int size() const { return n_; }
  double runningInf(int i, int j) const { return inf_[idx(i, j)]; }
  // Clamp of the running inf into [1, 2n].
  double psi(int i, int j) const;
  // Sum of log psi over all ordered pairs.
  double totalPotential() const;

  // Retrospective per-update series of psi for one pair: entry t clamps the
  // inf over updates after t, matching the inf over smaller gaps; the series
  // is nondecreasing by construction.
  Vec psiSeries(int i, int j) const;

  int updates() const { return static_cast<int>(mus_.size()); }

 private:
  int idx(int i, int j) const { return i * n_ + j; }
  double clamp(double v) const;
  int n_ = 0;
  double tHat_ = 1.0;
  double gamma_ = 0.0;
  double lastMu_ = 0.0;
  bool any_ = false;
  Vec inf_;
  std::vector<Vec> history_;  // per update, flattened rho values
  Vec mus_;
};

struct SolveEvent {
  enum class Kind { LayerSizeDoubling, PairSeparation, KappaUpdate };
  Kind kind;
  int iteration = 0;
  int i = -1;
  int j = -1;
  double value = 0.0;
  std::string describe() const;
};

// Scans a detailed trace for combinatorial progress events.
std::vector<SolveEvent> detect_events(const SolveTrace& trace);

// Potentials recomputed from a detailed trace (delta and kappa snapshots per
// layered iteration). Returns the state after replaying all updates.
PotentialState potentials_from_trace(const SolveTrace& trace, int n, double gamma);

}  // namespace llslp
