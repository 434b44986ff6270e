#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "chipfire/montecarlo.hpp"

using namespace chipfire;

TEST_CASE("exact sorting probabilities at tiny sizes", "[montecarlo]") {
  for (auto proto :
       {Protocol::uniform_move, Protocol::uniform_vertex_then_pair, Protocol::uniform_sequence}) {
    INFO(protocol_name(proto));
    CHECK(exact_sort_probability(1, proto) == Rational(1));
    CHECK(exact_sort_probability(2, proto) == Rational(1));
    // Three chips: sorted with probability exactly one third, whatever the
    // randomization.
    CHECK(exact_sort_probability(3, proto) == Rational(1, 3));
    // Even counts always sort.
    CHECK(exact_sort_probability(4, proto) == Rational(1));
    CHECK(exact_sort_probability(6, proto) == Rational(1));
  }
}

TEST_CASE("five chips sort with probability exactly one fifth", "[montecarlo]") {
  for (auto proto :
       {Protocol::uniform_move, Protocol::uniform_vertex_then_pair, Protocol::uniform_sequence}) {
    INFO(protocol_name(proto));
    CHECK(exact_sort_probability(5, proto) == Rational(1, 5));
  }
}

TEST_CASE("the three protocols genuinely differ at seven chips", "[montecarlo]") {
  const Rational p1 = exact_sort_probability(7, Protocol::uniform_move);
  const Rational p2 = exact_sort_probability(7, Protocol::uniform_vertex_then_pair);
  const Rational p3 = exact_sort_probability(7, Protocol::uniform_sequence);
  for (const Rational& p : {p1, p2, p3}) {
    CHECK(p > Rational(1, 4));
    CHECK(p < Rational(3, 10));
  }
  CHECK(p1 != p2);
  CHECK(p1 != p3);
  CHECK(p2 != p3);
}

TEST_CASE("sampling agrees with the exact law", "[montecarlo]") {
  // Two independent code paths: full-trajectory simulation vs mass
  // propagation over the reachable state graph.
  for (int n : {5, 7}) {
    for (auto proto : {Protocol::uniform_move, Protocol::uniform_vertex_then_pair}) {
      const double exact = static_cast<double>(exact_sort_probability(n, proto));
      const std::int64_t trials = 20000;
      const ProtocolRun run = estimate_sort_probability(n, proto, trials, 20240819, 1);
      const double sigma = std::sqrt(exact * (1 - exact) / static_cast<double>(trials));
      INFO(protocol_name(proto) << " n=" << n << " est=" << run.estimate() << " exact=" << exact);
      CHECK(std::abs(run.estimate() - exact) < 4 * sigma);
      CHECK(run.ci_lo <= run.estimate());
      CHECK(run.estimate() <= run.ci_hi);
    }
  }
}

TEST_CASE("sequence protocol has no sampler", "[montecarlo]") {
  CHECK_THROWS_AS(estimate_sort_probability(5, Protocol::uniform_sequence, 100, 1, 1),
                  std::invalid_argument);
}

TEST_CASE("runs are reproducible and thread-count invariant", "[montecarlo]") {
  const ProtocolRun a = estimate_sort_probability(9, Protocol::uniform_move, 4000, 777, 1);
  const ProtocolRun b = estimate_sort_probability(9, Protocol::uniform_move, 4000, 777, 1);
  CHECK(a.sorted_count == b.sorted_count);
  const ProtocolRun c = estimate_sort_probability(9, Protocol::uniform_move, 4000, 777, 4);
  CHECK(a.sorted_count == c.sorted_count);
  const ProtocolRun d = estimate_sort_probability(9, Protocol::uniform_move, 4000, 778, 1);
  CHECK(a.sorted_count != d.sorted_count);  // different seed, different sample
}

TEST_CASE("degenerate estimates keep sane intervals", "[montecarlo]") {
  const ProtocolRun sure = estimate_sort_probability(4, Protocol::uniform_move, 500, 5, 1);
  CHECK(sure.sorted_count == 500);
  CHECK(sure.estimate() == 1.0);
  CHECK(sure.ci_hi == 1.0);
  CHECK(sure.ci_lo < 1.0);  // rule-of-three lower bound stays honest
}

TEST_CASE("feasibility guard on exact computation", "[montecarlo]") {
  CHECK_THROWS_AS(exact_sort_probability(9, Protocol::uniform_move), std::invalid_argument);
  // Raising the guard explicitly allows the larger space; an even count
  // collapses to certainty, cross-checking the interning on a bigger graph.
  CHECK(exact_sort_probability(8, Protocol::uniform_vertex_then_pair, 8) == Rational(1));
}

TEST_CASE("protocol names round trip", "[montecarlo]") {
  for (auto proto :
       {Protocol::uniform_move, Protocol::uniform_vertex_then_pair, Protocol::uniform_sequence}) {
    REQUIRE(protocol_from_name(protocol_name(proto)).has_value());
    CHECK(*protocol_from_name(protocol_name(proto)) == proto);
  }
  CHECK_FALSE(protocol_from_name("dice").has_value());
}
