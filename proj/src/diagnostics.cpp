#include "llslp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace llslp {

double rho_estimate(double kappaHatIj, double deltaI, double deltaJ, double tHat, double gamma,
                    int n) {
  if (!(kappaHatIj > 0.0)) throw Error("rho_estimate: undefined pair estimate");
  if (!(tHat >= 1.0) || !(gamma > 0.0) || !(gamma < 1.0))
    throw Error("rho_estimate: parameters out of range");
  const double numer = std::log(kappaHatIj * deltaJ / deltaI);
  const double denom = std::log(4.0 * n * tHat / gamma);
  return numer / denom;
}

PotentialState::PotentialState(int n, double tHat, double gamma)
    : n_(n), tHat_(tHat), gamma_(gamma), inf_(static_cast<size_t>(n) * n, 1e300) {}

double PotentialState::clamp(double v) const {
  return std::max(1.0, std::min(2.0 * n_, v));
}

void PotentialState::update(double mu, const Matrix& rhoHat) {
  if (any_ && !(mu < lastMu_)) throw NonMonotoneMu("update_potentials: mu did not decrease");
  any_ = true;
  lastMu_ = mu;
  Vec flat(static_cast<size_t>(n_) * n_, 1e300);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      if (i == j) continue;
      flat[idx(i, j)] = rhoHat(i, j);
      inf_[idx(i, j)] = std::min(inf_[idx(i, j)], rhoHat(i, j));
    }
  history_.push_back(std::move(flat));
  mus_.push_back(mu);
}

double PotentialState::psi(int i, int j) const { return clamp(inf_[idx(i, j)]); }

double PotentialState::totalPotential() const {
  double total = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (i != j) total += std::log(psi(i, j));
  return total;
}

Vec PotentialState::psiSeries(int i, int j) const {
  // The potential at gap mu takes the inf over strictly smaller gaps, i.e.
  // over later updates; computed backward as suffix infima.
  const size_t T = history_.size();
  Vec series(T, 0.0);
  double running = 1e300;
  for (size_t t = T; t-- > 0;) {
    running = std::min(running, history_[t][idx(i, j)]);
    series[t] = clamp(running);
  }
  return series;
}

std::string SolveEvent::describe() const {
  switch (kind) {
    case Kind::LayerSizeDoubling:
      return "layer holding (" + std::to_string(i) + "," + std::to_string(j) +
             ") doubled to size " + std::to_string(static_cast<int>(value)) + " at iteration " +
             std::to_string(iteration);
    case Kind::PairSeparation:
      return "pair (" + std::to_string(i) + "," + std::to_string(j) +
             ") separated after iteration " + std::to_string(iteration);
    case Kind::KappaUpdate:
      return "estimate (" + std::to_string(i) + "," + std::to_string(j) + ") raised to " +
             std::to_string(value) + " at iteration " + std::to_string(iteration);
  }
  return "";
}

std::vector<SolveEvent> detect_events(const SolveTrace& trace) {
  std::vector<SolveEvent> events;
  std::vector<const IterationRecord*> layered;
  for (const IterationRecord& rec : trace.iterations) {
    if (rec.usedLls && rec.partition.count() > 0) layered.push_back(&rec);
    for (const KappaUpdateRecord& u : rec.kappaUpdates) {
      SolveEvent e;
      e.kind = SolveEvent::Kind::KappaUpdate;
      e.iteration = rec.index;
      e.i = u.i;
      e.j = u.j;
      e.value = u.after;
      events.push_back(e);
    }
  }
  if (layered.empty()) return events;

  const int n = [&] {
    int top = 0;
    for (const auto& layer : layered.front()->partition.layers)
      for (int v : layer) top = std::max(top, v + 1);
    return top;
  }();

  // Layer membership per layered iteration: layerOf[t][i].
  std::vector<std::vector<int>> layerOf(layered.size(), std::vector<int>(n, -1));
  for (size_t t = 0; t < layered.size(); ++t)
    for (size_t k = 0; k < layered[t]->partition.layers.size(); ++k)
      for (int v : layered[t]->partition.layers[k]) layerOf[t][v] = static_cast<int>(k);

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      int smallestShared = -1;
      int lastShared = -1;
      for (size_t t = 0; t < layered.size(); ++t) {
        if (layerOf[t][i] < 0 || layerOf[t][j] < 0) continue;
        if (layerOf[t][i] != layerOf[t][j]) continue;
        const int size =
            static_cast<int>(layered[t]->partition.layers[layerOf[t][i]].size());
        if (smallestShared < 0) {
          smallestShared = size;
        } else if (size >= 2 * smallestShared) {
          SolveEvent e;
          e.kind = SolveEvent::Kind::LayerSizeDoubling;
          e.iteration = layered[t]->index;
          e.i = i;
          e.j = j;
          e.value = size;
          events.push_back(e);
          smallestShared = size;  // raise the baseline: one event per doubling
        } else {
          smallestShared = std::min(smallestShared, size);
        }
        lastShared = static_cast<int>(t);
      }
      if (lastShared >= 0 && lastShared + 1 < static_cast<int>(layered.size())) {
        // Shared a layer once, never again afterwards.
        SolveEvent e;
        e.kind = SolveEvent::Kind::PairSeparation;
        e.iteration = layered[lastShared]->index;
        e.i = i;
        e.j = j;
        events.push_back(e);
      }
    }
  std::sort(events.begin(), events.end(), [](const SolveEvent& a, const SolveEvent& b) {
    if (a.iteration != b.iteration) return a.iteration < b.iteration;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  return events;
}

PotentialState potentials_from_trace(const SolveTrace& trace, int n, double gamma) {
  PotentialState state(n, trace.tHat, gamma);
  double lastMu = 1e300;
  for (const IterationRecord& rec : trace.iterations) {
    if (rec.delta.empty() || rec.kappaSnapshot.rows() != n) continue;
    if (!(rec.mu < lastMu)) continue;
    lastMu = rec.mu;
    Matrix rho(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j || rec.kappaSnapshot(i, j) <= 0.0) {
          rho(i, j) = -1e300;  // undefined pairs never bind the clamp
          continue;
        }
        rho(i, j) =
            rho_estimate(rec.kappaSnapshot(i, j), rec.delta[i], rec.delta[j], trace.tHat, gamma, n);
      }
    state.update(rec.mu, rho);
  }
  return state;
}

}  // namespace llslp
