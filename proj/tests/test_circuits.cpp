#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "llslp/circuits.hpp"
#include "llslp/imbalance.hpp"
#include "test_util.hpp"

using namespace llslp;
namespace tu = llslp::testutil;

namespace {

std::set<std::vector<int>> supportSet(const std::vector<Circuit>& circuits) {
  std::set<std::vector<int>> out;
  for (const Circuit& c : circuits) out.insert(c.support);
  return out;
}

// Orthogonal-complement representation: ker(B^T) = ker(A)^perp for B the
// kernel basis of A.
Matrix complementMatrix(const Matrix& A) {
  return kernel_basis(A).vectors.transposed();
}

}  // namespace

TEST_CASE("find_circuits on fixtures") {
  {
    const auto r = find_circuits(tu::fixtureF3());
    REQUIRE(r.components.count() == 1);
    CHECK(r.components.components[0] == std::vector<int>{0, 1, 2});
    REQUIRE(r.circuits.size() == 1);
    CHECK(r.circuits[0].support == std::vector<int>{0, 1, 2});
    CHECK(r.circuits[0].g[0] == doctest::Approx(1.0));
    CHECK(r.circuits[0].g[1] == doctest::Approx(-1.0));
    CHECK(r.circuits[0].g[2] == doctest::Approx(1.0));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) CHECK(r.kappa.value(i, j) == doctest::Approx(1.0).epsilon(1e-12));
  }
  {
    const auto r = find_circuits(tu::fixtureF2());
    REQUIRE(r.circuits.size() == 1);
    CHECK(r.circuits[0].support == std::vector<int>{0, 1});
    CHECK(r.circuits[0].g[0] == doctest::Approx(1.0));
    CHECK(r.circuits[0].g[1] == doctest::Approx(-0.5));
    CHECK(r.kappa.value(0, 1) == doctest::Approx(0.5));
    CHECK(r.kappa.value(1, 0) == doctest::Approx(2.0));
  }
  {
    const auto r = find_circuits(Matrix::identity(2));
    CHECK(r.components.count() == 2);
    CHECK(r.circuits.empty());
    CHECK_FALSE(r.kappa.defined(0, 1));
    CHECK_FALSE(r.kappa.defined(1, 0));
  }
}

TEST_CASE("fundamental_circuit fixtures") {
  {
    const auto e = row_reduce(tu::fixtureF3());
    const Circuit c = fundamental_circuit(e, 2);
    CHECK(c.support == std::vector<int>{0, 1, 2});
    CHECK(c.g[0] == doctest::Approx(1.0));
    CHECK(c.g[1] == doctest::Approx(-1.0));
    CHECK(c.g[2] == doctest::Approx(1.0));
    CHECK_THROWS_AS(fundamental_circuit(e, 0), IndependentColumn);
  }
  {
    const auto e = row_reduce(tu::fixtureF2());
    const Circuit c = fundamental_circuit(e, 1);
    CHECK(c.support == std::vector<int>{0, 1});
    // (-2, 1) normalized to lead with +1.
    CHECK(c.g[0] == doctest::Approx(1.0));
    CHECK(c.g[1] == doctest::Approx(-0.5));
  }
  {
    const auto e = row_reduce(tu::fixtureF1());
    const Circuit c = fundamental_circuit(e, 1);
    CHECK(c.support == std::vector<int>{0, 1});
    CHECK(c.g[1] == doctest::Approx(-1.0));
  }
}

TEST_CASE("circuit_through_pair fixtures") {
  {
    const Matrix A = tu::fixtureF3();
    const auto r = find_circuits(A);
    const Circuit c = circuit_through_pair(r, A, 0, 2);
    CHECK(c.support == std::vector<int>{0, 1, 2});
  }
  {
    const Matrix A = tu::fixtureF1();
    const auto r = find_circuits(A);
    const Circuit c = circuit_through_pair(r, A, 0, 1);
    CHECK(c.support == std::vector<int>{0, 1});
  }
  {
    const Matrix A{{1, 1, 0, 0}, {0, 0, 1, 1}};
    const auto r = find_circuits(A);
    CHECK(r.components.count() == 2);
    CHECK_THROWS_AS(circuit_through_pair(r, A, 0, 2), SeparatedPair);
  }
}

TEST_CASE("enumerate_circuits_bruteforce") {
  CHECK(supportSet(enumerate_circuits_bruteforce(tu::fixtureF3())) ==
        std::set<std::vector<int>>{{0, 1, 2}});
  CHECK(supportSet(enumerate_circuits_bruteforce(tu::fixtureF1())) ==
        std::set<std::vector<int>>{{0, 1}});
  {
    const Matrix A{{1, 1, 0, 0}, {0, 1, 1, 1}};
    const auto circuits = enumerate_circuits_bruteforce(A);
    CHECK(supportSet(circuits) == std::set<std::vector<int>>{{2, 3}, {0, 1, 2}, {0, 1, 3}});
  }
  CHECK_THROWS_AS(enumerate_circuits_bruteforce(Matrix(1, 15)), TooLarge);
}

TEST_CASE("circuit supports are inclusion-minimal dependent sets") {
  auto gen = tu::rng(71);
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<int> mPick(1, 3);
    const int m = mPick(gen);
    std::uniform_int_distribution<int> nPick(m + 1, 7);
    const int n = nPick(gen);
    const Matrix A = tu::randomFullRankMatrix(gen, m, n);
    for (const Circuit& c : enumerate_circuits_bruteforce(A)) {
      // Dependent: a kernel vector with that support exists (by construction).
      CHECK(norm2(A.apply(c.g)) <= 1e-9 * std::max(1.0, A.maxAbs() * norm2(c.g)));
      // Minimal: every proper subset of the support is independent.
      for (int drop : c.support) {
        std::vector<int> sub;
        for (int i : c.support)
          if (i != drop) sub.push_back(i);
        if (sub.empty()) continue;
        const auto null = orthonormal_nullspace(A.selectColumns(sub));
        CHECK(null.dim() == 0);
      }
    }
  }
}

TEST_CASE("kappa_bruteforce fixtures") {
  {
    const Matrix k = kappa_bruteforce(tu::fixtureF2());
    CHECK(k(0, 1) == doctest::Approx(0.5));
    CHECK(k(1, 0) == doctest::Approx(2.0));
  }
  {
    const Matrix k = kappa_bruteforce(tu::fixtureF3());
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) CHECK(k(i, j) == doctest::Approx(1.0));
  }
  {
    const Matrix k = kappa_bruteforce(tu::fixtureF1());
    CHECK(k(0, 1) == doctest::Approx(1.0));
    CHECK(k(1, 0) == doctest::Approx(1.0));
  }
}

TEST_CASE("estimate and tournament laws on random instances") {
  auto gen = tu::rng(83);
  for (int trial = 0; trial < 60; ++trial) {
    std::uniform_int_distribution<int> mPick(1, 4);
    const int m = mPick(gen);
    std::uniform_int_distribution<int> nPick(m + 1, 10);
    const int n = nPick(gen);
    const Matrix A = tu::randomFullRankMatrix(gen, m, n);
    const auto r = find_circuits(A);
    const Matrix kTrue = kappa_bruteforce(A);
    const double kStar = kappa_star_bruteforce(kTrue);

    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        if (!r.components.samePair(i, j)) {
          CHECK_FALSE(r.kappa.defined(i, j));
          continue;
        }
        REQUIRE(r.kappa.defined(i, j));
        const double hat = r.kappa.value(i, j);
        CHECK(hat <= kTrue(i, j) * (1.0 + 1e-9));
        CHECK(kTrue(i, j) <= kStar * kStar * hat * (1.0 + 1e-9));
        CHECK(r.kappa.value(i, j) * r.kappa.value(j, i) >= 1.0 - 1e-9);
      }
  }
}

TEST_CASE("triangle inequality on true kappa") {
  auto gen = tu::rng(89);
  for (int trial = 0; trial < 40; ++trial) {
    std::uniform_int_distribution<int> mPick(1, 3);
    const int m = mPick(gen);
    std::uniform_int_distribution<int> nPick(m + 1, 7);
    const int n = nPick(gen);
    const Matrix A = tu::randomFullRankMatrix(gen, m, n);
    const auto comps = find_circuits(A).components;
    const Matrix k = kappa_bruteforce(A);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          if (i == j || j == l || i == l) continue;
          if (!(comps.samePair(i, j) && comps.samePair(j, l))) continue;
          CHECK(k(i, j) <= k(i, l) * k(l, j) * (1.0 + 1e-9));
        }
  }
}

TEST_CASE("kappa duality with the orthogonal complement") {
  auto gen = tu::rng(97);
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<int> mPick(1, 3);
    const int m = mPick(gen);
    std::uniform_int_distribution<int> nPick(m + 1, 7);
    const int n = nPick(gen);
    const Matrix A = tu::randomFullRankMatrix(gen, m, n);
    const Matrix Aperp = complementMatrix(A);
    const Matrix k = kappa_bruteforce(A);
    const Matrix kPerp = kappa_bruteforce(Aperp);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        if (k(i, j) == 0.0 && kPerp(j, i) == 0.0) continue;
        CHECK(tu::approxEqRel(k(i, j), kPerp(j, i), 1e-8));
      }
  }
}
