#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "chipfire/vector_firing.hpp"

using namespace chipfire;

TEST_CASE("positive roots in canonical order", "[vector]") {
  const RootSet a3 = positive_roots(RootType::A, 3);
  REQUIRE(a3.roots.size() == 3);
  CHECK(a3.roots[0] == Root{RootKind::diff, 1, 2});
  CHECK(a3.roots[1] == Root{RootKind::diff, 1, 3});
  CHECK(a3.roots[2] == Root{RootKind::diff, 2, 3});

  const RootSet b2 = positive_roots(RootType::B, 2);
  REQUIRE(b2.roots.size() == 4);  // n^2 roots for type B
  CHECK(b2.roots[0] == Root{RootKind::diff, 1, 2});
  CHECK(b2.roots[1] == Root{RootKind::sum, 1, 2});
  CHECK(b2.roots[2] == Root{RootKind::single, 1, 0});
  CHECK(b2.roots[3] == Root{RootKind::single, 2, 0});

  CHECK(positive_roots(RootType::B, 5).roots.size() == 25);
  CHECK(positive_roots(RootType::A, 5).roots.size() == 10);
}

TEST_CASE("root coordinates and inner products", "[vector]") {
  const Root d{RootKind::diff, 1, 2};
  CHECK(d.to_vector(2) == VectorState{-1, 1});
  const Root s{RootKind::sum, 1, 2};
  CHECK(s.to_vector(2) == VectorState{1, 1});
  const Root e{RootKind::single, 2, 0};
  CHECK(e.to_vector(3) == VectorState{0, 1, 0});

  const VectorState v{3, -3};
  CHECK(inner(v, d) == -6);
  CHECK(inner(v, s) == 0);
  CHECK(inner(v, Root{RootKind::single, 1, 0}) == 3);
}

TEST_CASE("worked two-coordinate firing chain", "[vector]") {
  VectorState v{0, 0};
  v = vector_fire(v, Root{RootKind::diff, 1, 2});
  CHECK(v == VectorState{-1, 1});
  v = vector_fire(v, Root{RootKind::sum, 1, 2});
  CHECK(v == VectorState{0, 2});
  v = vector_fire(v, Root{RootKind::single, 1, 0});
  CHECK(v == VectorState{1, 2});
  // Now nothing is orthogonal to v: terminal.
  CHECK(applicable_roots(positive_roots(RootType::B, 2), v).empty());

  CHECK_THROWS_AS(vector_fire(v, Root{RootKind::single, 1, 0}), std::invalid_argument);
}

TEST_CASE("type B terminals are the identity staircase", "[vector]") {
  for (int n = 1; n <= 12; ++n) {
    VectorState want(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) want[static_cast<std::size_t>(i)] = i + 1;
    const VectorRun canonical = vector_stabilize(RootType::B, n, VectorStrategy::canonical_first, 0);
    CHECK(canonical.final == want);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      CHECK(vector_stabilize(RootType::B, n, VectorStrategy::uniform_random, seed).final == want);
    }
  }
}

TEST_CASE("type A firing is labeled chip-firing in coordinates", "[vector]") {
  // Coordinate i holds the position of chip (i); a diff root fires two
  // chips at a common position. Even counts therefore sort.
  const VectorRun run = vector_stabilize(RootType::A, 4, VectorStrategy::uniform_random, 11);
  CHECK(run.final == VectorState{-2, -1, 1, 2});
  CHECK(run.steps == 5);
  CHECK(vector_stabilize(RootType::A, 6, VectorStrategy::canonical_first, 0).final ==
        VectorState{-3, -2, -1, 1, 2, 3});

  // Odd counts reach some one-per-position spread around the origin.
  const VectorRun odd = vector_stabilize(RootType::A, 5, VectorStrategy::uniform_random, 7);
  std::vector<std::int64_t> sorted = odd.final;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<std::int64_t>{-2, -1, 0, 1, 2});
}

TEST_CASE("vector runs respect a step budget", "[vector]") {
  CHECK_THROWS_AS(vector_stabilize(RootType::B, 10, VectorStrategy::canonical_first, 0, 3),
                  StepBudgetExceeded);
}

TEST_CASE("random vector runs are reproducible", "[vector]") {
  const VectorRun a = vector_stabilize(RootType::B, 7, VectorStrategy::uniform_random, 1000);
  const VectorRun b = vector_stabilize(RootType::B, 7, VectorStrategy::uniform_random, 1000);
  CHECK(a.steps == b.steps);
  CHECK(a.final == b.final);
}
