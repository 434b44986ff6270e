#include <catch2/catch_amalgamated.hpp>

#include "chipfire/config.hpp"

using namespace chipfire;

TEST_CASE("unlabeled configurations count chips sparsely", "[config]") {
  UnlabeledConfig c;
  CHECK(c.empty());
  CHECK(c.total() == 0);
  CHECK_FALSE(c.min_vertex().has_value());

  c = c.plus(0, 2).plus(5, 1).plus(-3, 4);
  CHECK(c.total() == 7);
  CHECK(c.count(0) == 2);
  CHECK(c.count(5) == 1);
  CHECK(c.count(-3) == 4);
  CHECK(c.count(1) == 0);
  CHECK(*c.min_vertex() == -3);
  CHECK(*c.max_vertex() == 5);

  // Removing all chips at a vertex drops it from the support.
  const UnlabeledConfig d = c.plus(5, -1);
  CHECK(d.count(5) == 0);
  CHECK(*d.max_vertex() == 0);
  CHECK_THROWS(d.plus(5, -1));
}

TEST_CASE("delta builders", "[config]") {
  CHECK(n_delta0(3) == UnlabeledConfig().plus(0, 3));
  CHECK(n_delta0(0).empty());
  CHECK(delta(7) == UnlabeledConfig().plus(7, 1));
  CHECK(delta_interval(2, 4) == delta(2).plus(3, 1).plus(4, 1));
  CHECK(delta_interval(3, 2).empty());
  CHECK(delta_interval(5, 5) == delta(5));
}

TEST_CASE("statistics of a configuration", "[config]") {
  // Two chips at the origin: phi_0 weighs both at (0 - 0 - 1) = -1.
  const StatisticsBundle s = statistics(n_delta0(2), 0);
  CHECK(s.phi_ell == -2);
  CHECK(s.phi_inf == 0);
  CHECK(s.phi2_inf == 0);
  CHECK(s.gamma == 0);

  const UnlabeledConfig c = delta(-1).plus(2, 3);
  const StatisticsBundle t = statistics(c, 1);
  // Only the chip at -1 is weighed for ell = 1: (-1 - 1 - 1) = -3.
  CHECK(t.phi_ell == -3);
  CHECK(t.phi_inf == -1 + 3 * 2);
  CHECK(t.phi2_inf == 1 + 3 * 4);
  // Gap between -1 and 2 is 3, exceeding a stable spacing by 1.
  CHECK(t.gamma == 1);
}

TEST_CASE("gamma counts slack in internal gaps", "[config]") {
  CHECK(statistics(delta(0).plus(1, 1), 0).gamma == 0);
  CHECK(statistics(delta(0).plus(2, 1), 0).gamma == 0);
  CHECK(statistics(delta(0).plus(3, 1), 0).gamma == 1);
  CHECK(statistics(delta(0).plus(1, 1).plus(5, 1), 0).gamma == 2);
  CHECK(statistics(delta(-4).plus(0, 2).plus(4, 1), 0).gamma == 4);
  CHECK(statistics(delta(9), 0).gamma == 0);
}

TEST_CASE("prefix-sum order and covers", "[config]") {
  // Moving one chip right one vertex is a cover step upward.
  const CompareResult up = compare(n_delta0(2), delta(0).plus(1, 1));
  CHECK(up.order == Order::less);
  CHECK(up.is_cover);

  const CompareResult down = compare(delta(0).plus(1, 1), n_delta0(2));
  CHECK(down.order == Order::greater);
  CHECK(down.is_cover);

  // Moving right by two vertices is strictly above but not a cover.
  const CompareResult skip = compare(n_delta0(2), delta(0).plus(2, 1));
  CHECK(skip.order == Order::less);
  CHECK_FALSE(skip.is_cover);

  // A firing output is incomparable with its input's shape: mass spreads
  // both ways.
  const CompareResult fired = compare(n_delta0(2), delta(-1).plus(1, 1));
  CHECK(fired.order == Order::incomparable);

  CHECK(compare(n_delta0(4), n_delta0(4)).order == Order::equal);
  CHECK_FALSE(compare(n_delta0(4), n_delta0(4)).is_cover);

  CHECK_THROWS_AS(compare(n_delta0(2), n_delta0(3)), std::invalid_argument);
}

TEST_CASE("order is translation covariant in the expected direction", "[config]") {
  // Everything shifted right is above.
  const UnlabeledConfig c = delta(-1).plus(0, 2).plus(3, 1);
  UnlabeledConfig shifted;
  for (const auto& [v, k] : c.counts()) shifted = shifted.plus(v + 1, k);
  CHECK(compare(c, shifted).order == Order::less);
  CHECK(compare(shifted, c).order == Order::greater);
}

TEST_CASE("labeled configurations map labels to vertices", "[config]") {
  const LabeledConfig c = LabeledConfig::stacked_at_origin(3);
  CHECK(c.size() == 3);
  CHECK(c.position(2) == 0);
  CHECK(c.has_standard_labels(3));
  CHECK_FALSE(c.has_standard_labels(4));
  CHECK(c.underlying() == n_delta0(3));
  CHECK_THROWS_AS(c.position(4), std::invalid_argument);

  const LabeledConfig moved = c.with_position(2, 5);
  CHECK(moved.position(2) == 5);
  CHECK(c.position(2) == 0);

  const LabeledConfig d = LabeledConfig::from_positions({{1, -2}, {4, 0}});
  CHECK(d.size() == 2);
  CHECK(d.has_label(4));
  CHECK_FALSE(d.has_label(2));
  CHECK_FALSE(d.has_standard_labels(2));
}

TEST_CASE("duality reflects positions and reverses labels", "[config]") {
  const LabeledConfig c = LabeledConfig::from_positions({{1, 2}, {2, 0}, {3, -1}});
  const LabeledConfig d = dual(c, 3);
  CHECK(d.position(1) == 1);
  CHECK(d.position(2) == 0);
  CHECK(d.position(3) == -2);
  CHECK(dual(d, 3) == c);
  CHECK_THROWS_AS(dual(LabeledConfig::from_positions({{2, 0}}), 1), std::invalid_argument);
}

TEST_CASE("psi sums the positions of an initial label segment", "[config]") {
  const LabeledConfig c = LabeledConfig::from_positions({{1, -1}, {2, 1}, {3, 0}});
  CHECK(psi(c, 1) == -1);
  CHECK(psi(c, 2) == 0);
  CHECK(psi(c, 3) == 0);
  CHECK(psi(LabeledConfig::stacked_at_origin(5), 4) == 0);
}

TEST_CASE("restriction to high labels forgets the rest", "[config]") {
  const LabeledConfig c = LabeledConfig::from_positions({{1, -1}, {2, 1}, {3, 0}, {4, 1}});
  CHECK(restrict_geq(c, 3) == delta(0).plus(1, 1));
  CHECK(restrict_geq(c, 1) == c.underlying());
  CHECK(restrict_geq(c, 5).empty());
}
