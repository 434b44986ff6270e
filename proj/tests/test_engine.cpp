#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "chipfire/engine.hpp"
#include "chipfire/rng.hpp"

using namespace chipfire;

namespace {

UnlabeledConfig random_config(std::uint64_t seed, std::int64_t max_chips, Vertex lo, Vertex hi) {
  Rng rng(seed);
  const std::int64_t chips = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(max_chips)));
  UnlabeledConfig c;
  for (std::int64_t i = 0; i < chips; ++i) c = c.plus(rng.range(lo, hi), 1);
  return c;
}

}  // namespace

TEST_CASE("three chips at the origin admit exactly three first moves", "[engine]") {
  const PathGraph z = PathGraph::line();
  const LabeledConfig start = LabeledConfig::stacked_at_origin(3);
  const auto moves = legal_moves(z, start);
  REQUIRE(moves.size() == 3);
  CHECK(moves[0] == FiringMove{0, {1, 2}});
  CHECK(moves[1] == FiringMove{0, {1, 3}});
  CHECK(moves[2] == FiringMove{0, {2, 3}});

  // Lesser label goes left, greater goes right, bystander stays.
  const LabeledConfig a = fire(z, start, moves[0]);
  CHECK(a == LabeledConfig::from_positions({{1, -1}, {2, 1}, {3, 0}}));
  const LabeledConfig b = fire(z, start, moves[1]);
  CHECK(b == LabeledConfig::from_positions({{1, -1}, {3, 1}, {2, 0}}));
  const LabeledConfig c = fire(z, start, moves[2]);
  CHECK(c == LabeledConfig::from_positions({{2, -1}, {3, 1}, {1, 0}}));
}

TEST_CASE("worked four-chip stabilization script", "[engine]") {
  const PathGraph z = PathGraph::line();
  const std::vector<FiringMove> script = {
      {0, {1, 2}}, {0, {3, 4}}, {-1, {1, 3}}, {1, {2, 4}}, {0, {2, 3}},
  };
  const StabilizationReport rep =
      stabilize(z, LabeledConfig::stacked_at_origin(4), Strategy::scripted(script));
  CHECK(rep.total_firings == 5);
  CHECK(*rep.final_labeled == sorted_line_terminal(4));
  CHECK(*rep.final_labeled ==
        LabeledConfig::from_positions({{1, -2}, {2, -1}, {3, 1}, {4, 2}}));

  // The same script replayed step by step visits the expected states.
  const LabeledConfig mid = apply_script(z, LabeledConfig::stacked_at_origin(4),
                                         {script.begin(), script.begin() + 2});
  CHECK(mid == LabeledConfig::from_positions({{1, -1}, {3, -1}, {2, 1}, {4, 1}}));
}

TEST_CASE("scripts must land exactly on the stable state", "[engine]") {
  const PathGraph z = PathGraph::line();
  const std::vector<FiringMove> script = {
      {0, {1, 2}}, {0, {3, 4}}, {-1, {1, 3}}, {1, {2, 4}}, {0, {2, 3}},
  };
  std::vector<FiringMove> shy(script.begin(), script.end() - 1);
  CHECK_THROWS_WITH(stabilize(z, LabeledConfig::stacked_at_origin(4), Strategy::scripted(shy)),
                    "script ends before stabilization");
  std::vector<FiringMove> chatty = script;
  chatty.push_back({5, {1, 2}});
  CHECK_THROWS_WITH(stabilize(z, LabeledConfig::stacked_at_origin(4), Strategy::scripted(chatty)),
                    "script continues past stabilization");
}

TEST_CASE("illegal moves are rejected with reasons", "[engine]") {
  const PathGraph z = PathGraph::line();
  const LabeledConfig start = LabeledConfig::stacked_at_origin(3);
  CHECK_THROWS_AS(fire(z, start, {0, {1}}), std::invalid_argument);          // arity
  CHECK_THROWS_AS(fire(z, start, {0, {2, 1}}), std::invalid_argument);       // order
  CHECK_THROWS_AS(fire(z, start, {0, {1, 1}}), std::invalid_argument);       // repeat
  CHECK_THROWS_AS(fire(z, start, {1, {1, 2}}), std::invalid_argument);       // wrong vertex
  CHECK_THROWS_AS(fire(z, start, {0, {1, 4}}), std::invalid_argument);       // absent label
  CHECK_THROWS_AS(fire(PathGraph::half_line(), LabeledConfig::from_positions({{1, 0}, {2, 0}}),
                       {-1, {1, 2}}),
                  std::invalid_argument);  // off-domain vertex
}

TEST_CASE("unlabeled stabilization is strategy independent", "[engine]") {
  const PathGraph z = PathGraph::line();
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const UnlabeledConfig start = random_config(seed, 25, -12, 12);
    const StabilizationReport base = stabilize(z, start, Strategy::leftmost());
    for (const Strategy& s : {Strategy::rightmost(), Strategy::uniform_move(seed * 77 + 1),
                              Strategy::uniform_vertex_then_chips(seed * 91 + 5)}) {
      const StabilizationReport rep = stabilize(z, start, s);
      CHECK(rep.final_config == base.final_config);
      CHECK(rep.total_firings == base.total_firings);
      CHECK(rep.odometer == base.odometer);
    }
    const StabilizationReport bulk = stabilize_fast(z, start);
    CHECK(bulk.final_config == base.final_config);
    CHECK(bulk.total_firings == base.total_firings);
    CHECK(bulk.odometer == base.odometer);
  }
}

TEST_CASE("labeled and unlabeled runs agree through forgetting", "[engine]") {
  const PathGraph z = PathGraph::line();
  for (int n : {3, 5, 6, 8}) {
    const StabilizationReport lab =
        stabilize(z, LabeledConfig::stacked_at_origin(n), Strategy::uniform_move(n * 13 + 1));
    const StabilizationReport unlab = stabilize_fast(z, n_delta0(n));
    CHECK(lab.final_config == unlab.final_config);
    CHECK(lab.total_firings == unlab.total_firings);
    CHECK(lab.odometer == unlab.odometer);
  }
}

TEST_CASE("same seed reproduces the same trajectory bit for bit", "[engine]") {
  const PathGraph z = PathGraph::line();
  StabilizeOptions opt;
  opt.trace = true;
  const auto a = stabilize(z, LabeledConfig::stacked_at_origin(7), Strategy::uniform_move(1234), opt);
  const auto b = stabilize(z, LabeledConfig::stacked_at_origin(7), Strategy::uniform_move(1234), opt);
  CHECK(a.trace == b.trace);
  CHECK(*a.final_labeled == *b.final_labeled);
  const auto c = stabilize(z, LabeledConfig::stacked_at_origin(7), Strategy::uniform_move(1235), opt);
  CHECK(a.trace != c.trace);  // astronomically unlikely to coincide
}

TEST_CASE("step budget cuts off runaway requests", "[engine]") {
  const PathGraph z = PathGraph::line();
  StabilizeOptions opt;
  opt.step_budget = 3;
  CHECK_THROWS_AS(stabilize(z, LabeledConfig::stacked_at_origin(6), Strategy::leftmost(), opt),
                  StepBudgetExceeded);
  CHECK_THROWS_AS(stabilize_fast(z, n_delta0(40), 10), StepBudgetExceeded);
}

TEST_CASE("trace honors its limit", "[engine]") {
  const PathGraph z = PathGraph::line();
  StabilizeOptions opt;
  opt.trace = true;
  opt.trace_limit = 4;
  const auto rep = stabilize(z, LabeledConfig::stacked_at_origin(6), Strategy::leftmost(), opt);
  CHECK(rep.trace.size() == 4);
  CHECK(rep.trace_truncated);
}

TEST_CASE("conservation laws along a labeled trajectory", "[engine]") {
  const PathGraph z = PathGraph::line();
  const int n = 7;
  StabilizeOptions opt;
  opt.trace = true;
  const auto rep = stabilize(z, LabeledConfig::stacked_at_origin(n), Strategy::uniform_move(5), opt);
  UnlabeledConfig prev = n_delta0(n);
  std::int64_t prev_gamma = statistics(prev, 0).gamma;
  walk_script(z, LabeledConfig::stacked_at_origin(n), rep.trace,
              [&](std::size_t, const FiringMove& mv, const LabeledConfig& state) {
                const UnlabeledConfig cur = state.underlying();
                // First moment is conserved; second moment gains exactly 2.
                CHECK(statistics(cur, 0).phi_inf == statistics(prev, 0).phi_inf);
                CHECK(statistics(cur, 0).phi2_inf == statistics(prev, 0).phi2_inf + 2);
                // phi_ell drops by one exactly when vertex ell + 1 fired.
                for (Vertex ell = mv.vertex - 3; ell <= mv.vertex + 3; ++ell) {
                  const std::int64_t want = ell == mv.vertex - 1 ? -1 : 0;
                  CHECK(statistics(cur, ell).phi_ell - statistics(prev, ell).phi_ell == want);
                }
                // Gap slack never increases.
                const std::int64_t g = statistics(cur, 0).gamma;
                CHECK(g <= prev_gamma);
                prev_gamma = g;
                prev = cur;
              });
}

TEST_CASE("odometer equals the drop in phi", "[engine]") {
  const PathGraph z = PathGraph::line();
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    const UnlabeledConfig start = random_config(seed, 20, -10, 10);
    const StabilizationReport rep = stabilize_fast(z, start);
    for (Vertex j = -40; j <= 40; ++j) {
      const std::int64_t fired =
          statistics(start, j - 1).phi_ell - statistics(rep.final_config, j - 1).phi_ell;
      const auto it = rep.odometer.find(j);
      CHECK(fired == (it == rep.odometer.end() ? 0 : it->second));
    }
    // Total firings from the second moment.
    const std::int64_t total =
        (statistics(rep.final_config, 0).phi2_inf - statistics(start, 0).phi2_inf) / 2;
    CHECK(total == rep.total_firings);
  }
}

TEST_CASE("crossing counts match the psi bookkeeping", "[engine]") {
  const PathGraph z = PathGraph::line();
  for (int n : {4, 5, 9, 10}) {
    const auto rep =
        stabilize(z, LabeledConfig::stacked_at_origin(n), Strategy::uniform_vertex_then_chips(n * 3 + 2));
    for (int k = 1; k <= n; ++k) {
      CHECK(rep.cross_firings.at(k) ==
            psi(LabeledConfig::stacked_at_origin(n), k) - psi(*rep.final_labeled, k));
    }
  }
}

TEST_CASE("firing count formulas match simulation", "[engine]") {
  const PathGraph z = PathGraph::line();
  for (int n = 1; n <= 24; ++n) {
    const FiringCountFormulas fc = predicted_counts(n);
    const StabilizationReport rep = stabilize_fast(z, n_delta0(n));
    CHECK(rep.total_firings == fc.total());
    for (Vertex j = -15; j <= 15; ++j) {
      const auto it = rep.odometer.find(j);
      CHECK((it == rep.odometer.end() ? 0 : it->second) == fc.at_vertex(j));
    }
  }
  CHECK(predicted_counts(4).total() == 5);
  CHECK(predicted_counts(6).total() == 14);
  CHECK_THROWS_AS(predicted_counts(5).crossings(2), std::domain_error);
}

TEST_CASE("even stacks sort under every strategy", "[engine]") {
  const PathGraph z = PathGraph::line();
  for (int n : {2, 4, 10}) {
    const LabeledConfig want = sorted_line_terminal(n);
    for (const Strategy& s : {Strategy::leftmost(), Strategy::rightmost(), Strategy::uniform_move(3),
                              Strategy::uniform_vertex_then_chips(4)}) {
      const auto rep = stabilize(z, LabeledConfig::stacked_at_origin(n), s);
      CHECK(*rep.final_labeled == want);
      const SortCheck sc = check_sorted(z, *rep.final_labeled, n);
      CHECK(sc.sorted);
      REQUIRE(sc.matches_closed_form.has_value());
      CHECK(*sc.matches_closed_form);
    }
  }
}

TEST_CASE("odd stacks stabilize into one chip per vertex, sorted or not", "[engine]") {
  const PathGraph z = PathGraph::line();
  const int n = 5;
  std::set<std::vector<Vertex>> finals;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto rep = stabilize(z, LabeledConfig::stacked_at_origin(n), Strategy::uniform_move(seed));
    CHECK(rep.final_config == delta_interval(-2, 2));
    std::vector<Vertex> pos;
    for (int k = 1; k <= n; ++k) pos.push_back(rep.final_labeled->position(k));
    finals.insert(pos);
  }
  // Several distinct terminals occur; each is stable and within bounds.
  CHECK(finals.size() > 1);
}

TEST_CASE("check_sorted demands stability first", "[engine]") {
  const PathGraph z = PathGraph::line();
  CHECK_THROWS_AS(check_sorted(z, LabeledConfig::stacked_at_origin(4), 4), std::invalid_argument);
}

TEST_CASE("label bounds hold along whole trajectories", "[engine]") {
  const PathGraph z = PathGraph::line();
  const int n = 9;
  StabilizeOptions opt;
  opt.trace = true;
  const auto rep = stabilize(z, LabeledConfig::stacked_at_origin(n), Strategy::uniform_move(17), opt);
  walk_script(z, LabeledConfig::stacked_at_origin(n), rep.trace,
              [&](std::size_t, const FiringMove&, const LabeledConfig& state) {
                CHECK(check_label_bounds(state, n).ok);
              });
  // A chip outside its band is flagged with its label.
  const BoundsCheck bad = check_label_bounds(LabeledConfig::from_positions({{1, 1}}), 1);
  CHECK_FALSE(bad.ok);
  CHECK(*bad.first_violating_label == 1);
}

TEST_CASE("duality conjugates whole runs", "[engine]") {
  const PathGraph z = PathGraph::line();
  for (int n : {4, 5, 7}) {
    StabilizeOptions opt;
    opt.trace = true;
    const auto rep = stabilize(z, LabeledConfig::stacked_at_origin(n), Strategy::uniform_move(n + 40u), opt);
    const auto mirrored = dual_script(rep.trace, n);
    const LabeledConfig fin = apply_script(z, LabeledConfig::stacked_at_origin(n), mirrored);
    CHECK(fin == dual(*rep.final_labeled, n));
    CHECK(is_stable(z, fin));
  }
}

TEST_CASE("restriction to high labels walks rightward", "[engine]") {
  // Forgetting labels < k turns each firing into a firing, a rightward
  // step, or a no-op on the restricted configuration.
  const PathGraph z = PathGraph::line();
  const int n = 8;
  StabilizeOptions opt;
  opt.trace = true;
  const auto rep = stabilize(z, LabeledConfig::stacked_at_origin(n), Strategy::uniform_move(99), opt);
  for (int k = 2; k <= n; ++k) {
    UnlabeledConfig restricted = restrict_geq(LabeledConfig::stacked_at_origin(n), k);
    walk_script(z, LabeledConfig::stacked_at_origin(n), rep.trace,
                [&](std::size_t, const FiringMove& mv, const LabeledConfig& state) {
                  const int a = mv.chips.front(), b = mv.chips.back();
                  UnlabeledConfig next;
                  if (a >= k) {
                    next = fire_unlabeled(z, restricted, mv.vertex);  // both chips kept
                  } else if (b >= k) {
                    next = restricted.plus(mv.vertex, -1).plus(mv.vertex + 1, 1);  // kept chip goes right
                  } else {
                    next = restricted;
                  }
                  CHECK(next == restrict_geq(state, k));
                  restricted = next;
                });
  }
}

TEST_CASE("interval-plus-chip stabilization formula", "[engine]") {
  // The refilled interval splits around a gap mirroring the extra chip.
  CHECK(linestab(-2, 2, 0) == delta_interval(-2, -1).plus(delta_interval(1, 2)));
  CHECK(linestab(-2, 2, 2) == delta_interval(-1, 2));
  CHECK(linestab(-2, 2, -2) == delta_interval(-2, 1));
  CHECK(linestab(-2, 2, 1) == delta(-2).plus(delta_interval(0, 2)));
  const PathGraph z = PathGraph::line();
  for (Vertex i = 0; i <= 5; ++i) {
    CHECK(stabilize_fast(z, delta_interval(1, 4).plus(i, 1)).final_config == linestab(0, 5, i));
  }
  CHECK_THROWS_AS(linestab(2, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(linestab(0, 3, 4), std::invalid_argument);
}

TEST_CASE("closed forms for the origin stack", "[engine]") {
  const PathGraph z = PathGraph::line();
  CHECK(closed_form_stabilization(z, 6) == delta_interval(-3, -1).plus(delta_interval(1, 3)));
  CHECK(closed_form_stabilization(z, 7) == delta_interval(-3, 3));
  CHECK(closed_form_stabilization(z, 0).empty());
  CHECK(closed_form_stabilization(z, 1) == delta(0));

  const PathGraph nn = PathGraph::half_line();
  CHECK(closed_form_stabilization(nn, 4) == delta_interval(1, 4));
  const PathGraph nd = PathGraph::half_line_directed();
  CHECK(closed_form_stabilization(nd, 4) == delta_interval(0, 3));

  const PathGraph g2 = PathGraph::line().with_loops({{0, 2}});
  // Fewer chips than the loop capacity: nothing ever fires.
  CHECK(closed_form_stabilization(g2, 1) == n_delta0(1));
  CHECK(closed_form_stabilization(g2, 2) == n_delta0(2));
  // Same parity: interval plus a loaded origin.
  CHECK(closed_form_stabilization(g2, 8) ==
        delta_interval(-3, -1).plus(delta_interval(1, 3)).plus(0, 2));
  // Off parity: origin holds one extra.
  CHECK(closed_form_stabilization(g2, 7) ==
        delta_interval(-2, -1).plus(delta_interval(1, 2)).plus(0, 3));

  CHECK_THROWS_AS(closed_form_stabilization(PathGraph::line().with_multiplicity(2), 4),
                  std::invalid_argument);
  CHECK_THROWS_AS(closed_form_stabilization(PathGraph::line().with_loops({{1, 1}}), 4),
                  std::invalid_argument);
  CHECK_THROWS_AS(closed_form_stabilization(PathGraph::half_line().with_loops({{0, 1}}), 4),
                  std::invalid_argument);
}

TEST_CASE("rightward random walks stay above their start after stabilization", "[engine]") {
  const PathGraph z = PathGraph::line();
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const UnlabeledConfig start = random_config(seed * 3 + 1, 15, -20, 20);
    const UnlabeledConfig walked = random_rightward_walk(start, 60, seed);
    const auto ord = compare(stabilize_fast(z, start).final_config,
                             stabilize_fast(z, walked).final_config)
                         .order;
    CHECK((ord == Order::less || ord == Order::equal));
  }
}

TEST_CASE("labeled terminals on decorated graphs", "[engine]") {
  for (int n = 1; n <= 12; ++n) {
    const auto nrep = stabilize(PathGraph::half_line(), LabeledConfig::stacked_at_origin(n),
                                Strategy::uniform_move(n * 5 + 1));
    CHECK(*nrep.final_labeled == half_line_sorted_terminal(n));
    const auto drep = stabilize(PathGraph::half_line_directed(), LabeledConfig::stacked_at_origin(n),
                                Strategy::uniform_vertex_then_chips(n * 5 + 2));
    CHECK(*drep.final_labeled == directed_half_line_sorted_terminal(n));
  }
  for (int ell = 1; ell <= 3; ++ell) {
    const PathGraph g = PathGraph::line().with_loops({{0, ell}});
    for (int n = ell % 2 ? 1 : 2; n <= 14; n += 2) {
      const auto rep = stabilize(g, LabeledConfig::stacked_at_origin(n), Strategy::uniform_move(n * 7u + ell));
      CHECK(*rep.final_labeled == loops_sorted_terminal(n, ell));
    }
  }
}

TEST_CASE("strategy names round trip", "[engine]") {
  for (auto kind : {Strategy::Kind::leftmost_vertex, Strategy::Kind::rightmost_vertex,
                    Strategy::Kind::uniform_move, Strategy::Kind::uniform_vertex_then_chips}) {
    REQUIRE(strategy_kind_from_name(strategy_name(kind)).has_value());
    CHECK(*strategy_kind_from_name(strategy_name(kind)) == kind);
  }
  CHECK_FALSE(strategy_kind_from_name("zigzag").has_value());
}
