#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "llslp/imbalance.hpp"
#include "llslp/init.hpp"
#include "test_util.hpp"

using namespace llslp;
namespace tu = llslp::testutil;

namespace {

LpInstance fixtureF4() { return LpInstance{tu::fixtureF1(), {1.0}, {1.0, 0.0}}; }

LpInstance steepInstance() {
  // Optimal solution (0, 1e4): demands M beyond 2e4 to map back.
  return LpInstance{Matrix{{1.0, 1e-4}}, {1.0}, {1.0, 0.0}};
}

}  // namespace

TEST_CASE("build_extended block structure on F4") {
  const ExtendedInstance ext = build_extended(fixtureF4(), 40.0);
  REQUIRE(ext.extended.A.rows() == 3);
  REQUIRE(ext.extended.A.cols() == 6);
  const Matrix& A = ext.extended.A;
  CHECK(A.row(0) == Vec{1, 1, -1, -1, 0, 0});
  CHECK(A.row(1) == Vec{1, 0, 0, 0, 1, 0});
  CHECK(A.row(2) == Vec{0, 1, 0, 0, 0, 1});
  CHECK(ext.extended.b == Vec{1, 80, 80});
  CHECK(ext.extended.c == Vec{1, 0, 40, 40, 0, 0});
  // Larger M touches only the entries carrying it.
  const ExtendedInstance ext2 = build_extended(fixtureF4(), 80.0);
  CHECK(ext2.extended.A.row(0) == A.row(0));
  CHECK(ext2.extended.b[1] == 160.0);
  CHECK(ext2.extended.c[2] == 80.0);
}

TEST_CASE("initial_point hits mu = M^2 exactly on F4") {
  const LpInstance lp = fixtureF4();
  const ExtendedInstance ext = build_extended(lp, 40.0);
  const Iterate w0 = initial_point(ext, lp);
  // c^T e = 1 and d^T e = 1 cancel, so mu0 = M^2 without error.
  CHECK(std::fabs(mu_of(w0) - 1600.0) <= 1e-12 * 1600.0);
  CHECK(centrality_gap(w0) <= 0.125);
  // x block: (Me, Me - d, Me) with d = (1/2, 1/2).
  CHECK(w0.x[2] == doctest::Approx(39.5));
  CHECK(w0.x[3] == doctest::Approx(39.5));
}

TEST_CASE("initial_point is exactly central for b = 0, c = 0") {
  LpInstance lp{tu::fixtureF2(), {0.0}, {0.0, 0.0}};
  const ExtendedInstance ext = build_extended(lp, 7.0);
  const Iterate w0 = initial_point(ext, lp);
  CHECK(centrality_gap(w0) <= 1e-12);
  CHECK(mu_of(w0) == doctest::Approx(49.0).epsilon(1e-14));
}

TEST_CASE("initial_point rejects an inadequate M") {
  CHECK_THROWS_AS(initial_point(build_extended(fixtureF4(), 1.0), fixtureF4()),
                  NeighborhoodViolation);
}

TEST_CASE("map_back on a solved F4 extension") {
  const LpInstance lp = fixtureF4();
  const ExtendedInstance ext = build_extended(lp, 40.0);
  const Iterate w0 = initial_point(ext, lp);
  const SolveResult res = lp_solve(ext.extended, w0);
  REQUIRE(res.status == SolveStatus::Optimal);
  const MapBackResult mapped = map_back(ext, res.iterate, lp);
  REQUIRE(mapped.ok);
  CHECK(mapped.iterate.x[0] == doctest::Approx(0.0));
  CHECK(mapped.iterate.x[1] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(mapped.iterate.s[0] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("map_back flags an undersized M") {
  const LpInstance lp = steepInstance();
  const ExtendedInstance ext = build_extended(lp, 100.0);
  const Iterate w0 = initial_point(ext, lp);
  const SolveResult res = lp_solve(ext.extended, w0);
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK_FALSE(map_back(ext, res.iterate, lp).ok);
}

TEST_CASE("two_phase_feasibility fixtures") {
  {
    const TwoPhaseResult r = two_phase_feasibility(fixtureF4(), 100.0, {});
    CHECK(r.status == FeasibilityStatus::Feasible);
  }
  {
    LpInstance lp{tu::fixtureF1(), {-1.0}, {0.0, 0.0}};
    const TwoPhaseResult r = two_phase_feasibility(lp, 100.0, {});
    REQUIRE(r.status == FeasibilityStatus::PrimalInfeasible);
    REQUIRE(r.certificate.has_value());
    CHECK(verify_certificate(lp, *r.certificate));
    CHECK(r.certificate->witness[0] < 0.0);
  }
  {
    LpInstance lp{Matrix{{1.0, -1.0}}, {0.0}, {-1.0, -1.0}};
    const TwoPhaseResult r = two_phase_feasibility(lp, 100.0, {});
    REQUIRE(r.status == FeasibilityStatus::DualInfeasible);
    REQUIRE(r.certificate.has_value());
    CHECK(verify_certificate(lp, *r.certificate));
  }
}

TEST_CASE("solve_with_m_search on F4 succeeds at the first guess") {
  const PipelineResult r = solve_with_m_search(fixtureF4());
  REQUIRE(r.status == PipelineStatus::Optimal);
  CHECK(r.objective == doctest::Approx(0.0));
  CHECK(r.attempts.size() == 1);
  CHECK(r.iterate.x[1] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("squaring search needs a second attempt on the steep instance") {
  MSearchOptions opts;
  opts.initialGuess = 100.0;
  const PipelineResult r = solve_with_m_search(steepInstance(), opts);
  REQUIRE(r.status == PipelineStatus::Optimal);
  CHECK(r.attempts.size() == 2);
  CHECK(r.attempts[0].outcome == "M too small");
  CHECK(r.objective == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(r.iterate.x[1] == doctest::Approx(1e4).epsilon(1e-7));
}

TEST_CASE("infeasible input returns a certificate before any optimality solve") {
  LpInstance lp{tu::fixtureF1(), {-1.0}, {0.0, 0.0}};
  const PipelineResult r = solve_with_m_search(lp);
  REQUIRE(r.status == PipelineStatus::PrimalInfeasible);
  REQUIRE(r.certificate.has_value());
  CHECK(r.attempts.size() == 1);
  CHECK(r.attempts[0].outcome == "infeasibility certificate");
}

TEST_CASE("true chi-bar based M always maps back on random instances") {
  auto gen = tu::rng(173);
  std::uniform_real_distribution<double> xPick(0.5, 2.0), yPick(-1.0, 1.0), sPick(0.5, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::uniform_int_distribution<int> mPick(1, 2);
    const int m = mPick(gen);
    std::uniform_int_distribution<int> nPick(m + 1, 5);
    const int n = nPick(gen);
    LpInstance lp;
    lp.A = tu::randomFullRankMatrix(gen, m, n);
    Vec x0(n), y0(m), s0(n);
    for (double& v : x0) v = xPick(gen);
    for (double& v : y0) v = yPick(gen);
    for (double& v : s0) v = sPick(gen);
    lp.b = lp.A.apply(x0);
    lp.c = add(lp.A.applyTransposed(y0), s0);

    const double chi = chibar_bruteforce(lp.A);
    const Vec d = min_norm_solution(lp.A, lp.b);
    const double M =
        std::max({15.0 * (chi + 1.0) * norm2(lp.c), 15.0 * chi * norm2(d), 1.0});
    const ExtendedInstance ext = build_extended(lp, M);
    const Iterate w0 = initial_point(ext, lp);  // must not throw
    CHECK(centrality_gap(w0) <= 0.125);
    const SolveResult res = lp_solve(ext.extended, w0);
    REQUIRE(res.status == SolveStatus::Optimal);
    const MapBackResult mapped = map_back(ext, res.iterate, lp);
    CHECK(mapped.ok);
  }
}
