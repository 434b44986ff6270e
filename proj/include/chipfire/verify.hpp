#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "chipfire/config.hpp"
#include "chipfire/engine.hpp"
#include "chipfire/explorer.hpp"
#include "chipfire/graph.hpp"
#include "chipfire/rng.hpp"
#include "chipfire/vector_firing.hpp"

namespace chipfire {

// Desk-scale verification suites behind `verify --suite ...`. Each case
// aggregates one parameter slice; a failing case carries a counterexample
// description so reruns are unnecessary for diagnosis.

struct CaseResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<CaseResult> cases;

  bool all_pass() const {
    for (const auto& c : cases) {
      if (!c.pass) return false;
    }
    return true;
  }
};

struct SuiteParams {
  int max_n = 40;
  int seeds = 20;
  std::uint64_t master_seed = 0x00c111a5eed0ull;
  std::int64_t pairs = 1000;  // stabcover: randomized cover pairs
  std::int64_t walks = 200;   // stabcover: rightward walks
};

namespace detail {

inline std::vector<Strategy> strategy_battery(int seeds, std::uint64_t master, std::uint64_t salt) {
  std::vector<Strategy> out;
  out.push_back(Strategy::leftmost());
  out.push_back(Strategy::rightmost());
  for (int s = 0; s < seeds; ++s) {
    out.push_back(Strategy::uniform_move(stream_seed(master, salt + 2 * static_cast<std::uint64_t>(s))));
    out.push_back(
        Strategy::uniform_vertex_then_chips(stream_seed(master, salt + 2 * static_cast<std::uint64_t>(s) + 1)));
  }
  return out;
}

inline std::string describe(const LabeledConfig& c) {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (const auto& [label, v] : c.positions()) {
    if (!first) out << ", ";
    first = false;
    out << '(' << label << ")@" << v;
  }
  out << '}';
  return out.str();
}

inline std::string describe(const UnlabeledConfig& c) {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (const auto& [v, k] : c.counts()) {
    if (!first) out << ", ";
    first = false;
    out << v << ":" << k;
  }
  out << '}';
  return out.str();
}

// Runs every strategy in the battery on the labeled origin stack and
// demands one exact terminal.
inline CaseResult expect_terminal(const PathGraph& g, int n, const LabeledConfig& expected,
                                  const std::vector<Strategy>& battery, const std::string& name) {
  CaseResult cr{name, true, ""};
  for (const Strategy& strat : battery) {
    const StabilizationReport rep = stabilize(g, LabeledConfig::stacked_at_origin(n), strat);
    if (*rep.final_labeled != expected) {
      cr.pass = false;
      std::ostringstream out;
      out << "strategy " << strategy_name(strat.kind) << " seed " << strat.seed << ": got "
          << describe(*rep.final_labeled) << " expected " << describe(expected);
      cr.detail = out.str();
      return cr;
    }
  }
  return cr;
}

inline UnlabeledConfig random_config(Rng& rng, std::int64_t max_chips, Vertex lo, Vertex hi) {
  const std::int64_t chips = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(max_chips)));
  UnlabeledConfig c;
  for (std::int64_t i = 0; i < chips; ++i) c = c.plus(rng.range(lo, hi), 1);
  return c;
}

inline SuiteResult suite_main(const SuiteParams& p) {
  SuiteResult res{"main", {}};
  const PathGraph g = PathGraph::line();
  for (int n = 2; n <= p.max_n; n += 2) {
    const auto battery = strategy_battery(p.seeds, p.master_seed, 1000 + static_cast<std::uint64_t>(n));
    res.cases.push_back(expect_terminal(g, n, sorted_line_terminal(n), battery, "sorted terminal n=" + std::to_string(n)));
  }
  return res;
}

inline SuiteResult suite_runtime(const SuiteParams& p) {
  SuiteResult res{"runtime", {}};
  const PathGraph g = PathGraph::line();
  // Totals and odometer, unlabeled (the counts are unlabeled facts).
  for (int n = 1; n <= p.max_n; ++n) {
    CaseResult cr{"counts n=" + std::to_string(n), true, ""};
    const FiringCountFormulas fc = predicted_counts(n);
    std::map<Vertex, std::int64_t> expected;
    for (Vertex j = -fc.m; j <= fc.m; ++j) {
      const std::int64_t count = fc.at_vertex(j);
      if (count > 0) expected.emplace(j, count);
    }
    const auto battery = strategy_battery(p.seeds, p.master_seed, 2000 + static_cast<std::uint64_t>(n));
    for (const Strategy& strat : battery) {
      const StabilizationReport rep = stabilize(g, n_delta0(n), strat);
      if (rep.total_firings != fc.total() || rep.odometer != expected) {
        cr.pass = false;
        std::ostringstream out;
        out << "strategy " << strategy_name(strat.kind) << " seed " << strat.seed << ": total "
            << rep.total_firings << " expected " << fc.total();
        cr.detail = out.str();
        break;
      }
    }
    res.cases.push_back(cr);
  }
  // Crossing counts, labeled, even n.
  for (int n = 2; n <= std::min(p.max_n, 100); n += 2) {
    CaseResult cr{"crossings n=" + std::to_string(n), true, ""};
    const FiringCountFormulas fc = predicted_counts(n);
    const auto battery = strategy_battery(p.seeds, p.master_seed, 3000 + static_cast<std::uint64_t>(n));
    for (const Strategy& strat : battery) {
      const StabilizationReport rep = stabilize(g, LabeledConfig::stacked_at_origin(n), strat);
      for (int k = 1; k <= n; ++k) {
        const auto it = rep.cross_firings.find(k);
        const std::int64_t got = it == rep.cross_firings.end() ? -1 : it->second;
        if (got != fc.crossings(k)) {
          cr.pass = false;
          std::ostringstream out;
          out << "strategy " << strategy_name(strat.kind) << " seed " << strat.seed << ": cut k=" << k
              << " crossed " << got << " expected " << fc.crossings(k);
          cr.detail = out.str();
          break;
        }
      }
      if (!cr.pass) break;
    }
    res.cases.push_back(cr);
  }
  return res;
}

inline SuiteResult suite_stabcover(const SuiteParams& p) {
  SuiteResult res{"stabcover", {}};
  const PathGraph g = PathGraph::line();
  {
    CaseResult cr{"cover pairs (" + std::to_string(p.pairs) + ")", true, ""};
    for (std::int64_t i = 0; i < p.pairs && cr.pass; ++i) {
      Rng rng(stream_seed(p.master_seed, 40000 + static_cast<std::uint64_t>(i)));
      const UnlabeledConfig c = random_config(rng, 30, -50, 50);
      // Pick an occupied vertex and move one of its chips right.
      auto it = c.counts().begin();
      std::advance(it, static_cast<std::ptrdiff_t>(rng.below(c.counts().size())));
      const UnlabeledConfig d = c.plus(it->first, -1).plus(it->first + 1, 1);
      const UnlabeledConfig sc = stabilize_fast(g, c).final_config;
      const UnlabeledConfig sd = stabilize_fast(g, d).final_config;
      const CompareResult cmp = compare(sc, sd);
      if (cmp.order != Order::less || !cmp.is_cover) {
        cr.pass = false;
        std::ostringstream out;
        out << "pair " << i << ": stab " << describe(sc) << " vs " << describe(sd) << " not a cover";
        cr.detail = out.str();
      }
    }
    res.cases.push_back(cr);
  }
  {
    CaseResult cr{"rightward walks (" + std::to_string(p.walks) + ")", true, ""};
    for (std::int64_t i = 0; i < p.walks && cr.pass; ++i) {
      Rng rng(stream_seed(p.master_seed, 50000 + static_cast<std::uint64_t>(i)));
      const UnlabeledConfig c = random_config(rng, 20, -30, 30);
      const std::int64_t steps = static_cast<std::int64_t>(rng.below(201));
      const UnlabeledConfig d =
          random_rightward_walk(c, steps, stream_seed(p.master_seed, 60000 + static_cast<std::uint64_t>(i)));
      const UnlabeledConfig sc = stabilize_fast(g, c).final_config;
      const UnlabeledConfig sd = stabilize_fast(g, d).final_config;
      const Order ord = compare(sc, sd).order;
      if (ord != Order::less && ord != Order::equal) {
        cr.pass = false;
        std::ostringstream out;
        out << "walk " << i << " (" << steps << " steps): stab " << describe(sc) << " vs " << describe(sd)
            << " not below";
        cr.detail = out.str();
      }
    }
    res.cases.push_back(cr);
  }
  return res;
}

inline SuiteResult suite_bounds(const SuiteParams& p) {
  SuiteResult res{"bounds", {}};
  const PathGraph g = PathGraph::line();
  for (int n = 1; n <= std::min(p.max_n, 64); ++n) {
    CaseResult cr{"trajectory bounds n=" + std::to_string(n), true, ""};
    for (int s = 0; s < std::max(1, p.seeds) && cr.pass; ++s) {
      const std::uint64_t seed = stream_seed(p.master_seed, 70000 + 64 * static_cast<std::uint64_t>(n) +
                                                                static_cast<std::uint64_t>(s));
      StabilizeOptions opt;
      opt.trace = true;
      const StabilizationReport rep =
          stabilize(g, LabeledConfig::stacked_at_origin(n), Strategy::uniform_move(seed), opt);
      walk_script(g, LabeledConfig::stacked_at_origin(n), rep.trace,
                  [&](std::size_t step, const FiringMove& mv, const LabeledConfig& state) {
                    const BoundsCheck bc = check_label_bounds(state, n);
                    if (!bc.ok && cr.pass) {
                      cr.pass = false;
                      std::ostringstream out;
                      out << "seed " << seed << " step " << step << " (vertex " << mv.vertex << "): chip ("
                          << *bc.first_violating_label << ") out of range in " << describe(state);
                      cr.detail = out.str();
                    }
                  });
    }
    res.cases.push_back(cr);
  }
  return res;
}

inline SuiteResult suite_typeb(const SuiteParams& p) {
  SuiteResult res{"typeb", {}};
  for (int n = 1; n <= p.max_n; ++n) {
    CaseResult cr{"terminal (1.." + std::to_string(n) + ")", true, ""};
    VectorState expected(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) expected[static_cast<std::size_t>(i)] = i + 1;
    std::vector<std::pair<VectorStrategy, std::uint64_t>> runs;
    runs.emplace_back(VectorStrategy::canonical_first, 0);
    for (int s = 0; s < p.seeds; ++s) {
      runs.emplace_back(VectorStrategy::uniform_random,
                        stream_seed(p.master_seed, 80000 + 64 * static_cast<std::uint64_t>(n) +
                                                       static_cast<std::uint64_t>(s)));
    }
    for (const auto& [strat, seed] : runs) {
      const VectorRun vr = vector_stabilize(RootType::B, n, strat, seed);
      if (vr.final != expected) {
        cr.pass = false;
        std::ostringstream out;
        out << "seed " << seed << ": terminal (";
        for (std::size_t i = 0; i < vr.final.size(); ++i) out << (i ? "," : "") << vr.final[i];
        out << ")";
        cr.detail = out.str();
        break;
      }
    }
    res.cases.push_back(cr);
  }
  return res;
}

inline SuiteResult suite_loops(const SuiteParams& p) {
  SuiteResult res{"loops", {}};
  // Half-line variants: exact labeled terminals.
  for (int n = 1; n <= std::min(p.max_n, 30); ++n) {
    const auto battery = strategy_battery(p.seeds, p.master_seed, 90000 + static_cast<std::uint64_t>(n));
    res.cases.push_back(expect_terminal(PathGraph::half_line(), n, half_line_sorted_terminal(n), battery,
                                        "half-line terminal n=" + std::to_string(n)));
    res.cases.push_back(expect_terminal(PathGraph::half_line_directed(), n,
                                        directed_half_line_sorted_terminal(n), battery,
                                        "directed half-line terminal n=" + std::to_string(n)));
  }
  // Loops at the origin: seeded runs at matching parity.
  for (int ell = 1; ell <= 3; ++ell) {
    const PathGraph g = PathGraph::line().with_loops({{0, ell}});
    for (int n = ell % 2 == 0 ? 2 : 1; n <= std::min(p.max_n, 20); n += 2) {
      const auto battery =
          strategy_battery(p.seeds, p.master_seed, 100000 + 64 * static_cast<std::uint64_t>(ell) +
                                                       static_cast<std::uint64_t>(n));
      res.cases.push_back(expect_terminal(g, n, loops_sorted_terminal(n, ell), battery,
                                          "loops ell=" + std::to_string(ell) + " n=" + std::to_string(n)));
    }
    // Exhaustive at small n: every reachable stable state is the sorted one.
    for (int n = ell % 2 == 0 ? 2 : 1; n <= std::min(p.max_n, 8); n += 2) {
      CaseResult cr{"loops exhaustive ell=" + std::to_string(ell) + " n=" + std::to_string(n), true, ""};
      const StableSet set = enumerate_stables(g, LabeledConfig::stacked_at_origin(n));
      if (!set.exact) {
        cr.pass = false;
        cr.detail = "enumeration truncated";
      } else {
        const LabeledConfig expected = loops_sorted_terminal(n, ell);
        for (const LabeledConfig& d : set.stables) {
          if (d != expected) {
            cr.pass = false;
            cr.detail = "stable state " + describe(d) + " differs from " + describe(expected);
            break;
          }
        }
        if (set.stables.empty()) {
          cr.pass = false;
          cr.detail = "no stable states found";
        }
      }
      res.cases.push_back(cr);
    }
  }
  return res;
}

inline SuiteResult suite_closedforms(const SuiteParams& p) {
  SuiteResult res{"closedforms", {}};
  const PathGraph z = PathGraph::line();
  {
    // Direct simulation against the origin-stack formula.
    const int direct_cap = std::min(p.max_n, 300);
    CaseResult cr{"origin stack direct n<=" + std::to_string(direct_cap), true, ""};
    for (int n = 0; n <= direct_cap && cr.pass; ++n) {
      const UnlabeledConfig sim = stabilize_fast(z, n_delta0(n)).final_config;
      if (sim != closed_form_stabilization(z, n)) {
        cr.pass = false;
        cr.detail = "n=" + std::to_string(n) + ": " + describe(sim);
      }
    }
    res.cases.push_back(cr);
  }
  if (p.max_n > 300) {
    // Incremental chain: each stabilization seeds the next stack size. Every
    // link is itself a legal stabilization, so the closed form is still
    // checked exactly at every n; only the starting point is reused.
    CaseResult cr{"origin stack chain n<=" + std::to_string(p.max_n), true, ""};
    UnlabeledConfig prev;
    for (int n = 1; n <= p.max_n && cr.pass; ++n) {
      const UnlabeledConfig cur = stabilize_fast(z, prev.plus(0, 1)).final_config;
      if (cur != closed_form_stabilization(z, n)) {
        cr.pass = false;
        cr.detail = "n=" + std::to_string(n) + ": " + describe(cur);
      }
      prev = cur;
    }
    res.cases.push_back(cr);
    CaseResult spot{"origin stack direct spot checks", true, ""};
    for (int n : {p.max_n - 1, p.max_n}) {
      const UnlabeledConfig sim = stabilize_fast(z, n_delta0(n)).final_config;
      if (sim != closed_form_stabilization(z, n)) {
        spot.pass = false;
        spot.detail = "n=" + std::to_string(n);
        break;
      }
    }
    res.cases.push_back(spot);
  }
  {
    const Vertex window = std::min<Vertex>(60, std::max(p.max_n, 10));
    CaseResult cr{"interval plus chip, windows up to " + std::to_string(window), true, ""};
    for (Vertex a = -window; a <= window && cr.pass; ++a) {
      for (Vertex b = a + 1; b <= window && b - a <= window && cr.pass; ++b) {
        for (Vertex i = a; i <= b && cr.pass; ++i) {
          const UnlabeledConfig start = delta_interval(a + 1, b - 1).plus(i, 1);
          const UnlabeledConfig sim = stabilize_fast(z, start).final_config;
          if (sim != linestab(a, b, i)) {
            cr.pass = false;
            cr.detail = "a=" + std::to_string(a) + " b=" + std::to_string(b) + " i=" + std::to_string(i);
          }
        }
      }
    }
    // Far-offset spot checks: the formula is translation covariant.
    for (Vertex off : {Vertex{1000000}, Vertex{-999983}}) {
      for (Vertex w : {Vertex{1}, Vertex{7}, Vertex{33}}) {
        const Vertex a = off, b = off + w;
        for (Vertex i = a; i <= b && cr.pass; ++i) {
          const UnlabeledConfig start = delta_interval(a + 1, b - 1).plus(i, 1);
          if (stabilize_fast(z, start).final_config != linestab(a, b, i)) {
            cr.pass = false;
            cr.detail = "offset window a=" + std::to_string(a) + " b=" + std::to_string(b);
          }
        }
      }
    }
    res.cases.push_back(cr);
  }
  {
    const int cap = std::min(p.max_n, 200);
    CaseResult cr{"half-line formulas n<=" + std::to_string(cap), true, ""};
    const PathGraph nn = PathGraph::half_line();
    const PathGraph nd = PathGraph::half_line_directed();
    for (int n = 0; n <= cap && cr.pass; ++n) {
      if (stabilize_fast(nn, n_delta0(n)).final_config != closed_form_stabilization(nn, n) ||
          stabilize_fast(nd, n_delta0(n)).final_config != closed_form_stabilization(nd, n)) {
        cr.pass = false;
        cr.detail = "n=" + std::to_string(n);
      }
    }
    res.cases.push_back(cr);
  }
  {
    const int cap = std::min(p.max_n, 120);
    CaseResult cr{"origin loops formulas n<=" + std::to_string(cap), true, ""};
    for (int ell = 1; ell <= 4 && cr.pass; ++ell) {
      const PathGraph g = PathGraph::line().with_loops({{0, ell}});
      for (int n = 0; n <= cap && cr.pass; ++n) {
        if (stabilize_fast(g, n_delta0(n)).final_config != closed_form_stabilization(g, n)) {
          cr.pass = false;
          cr.detail = "ell=" + std::to_string(ell) + " n=" + std::to_string(n);
        }
      }
    }
    res.cases.push_back(cr);
  }
  return res;
}

}  // namespace detail

inline SuiteResult run_suite(const std::string& suite, const SuiteParams& p = {}) {
  if (suite == "main") return detail::suite_main(p);
  if (suite == "runtime") return detail::suite_runtime(p);
  if (suite == "stabcover") return detail::suite_stabcover(p);
  if (suite == "bounds") return detail::suite_bounds(p);
  if (suite == "typeb") return detail::suite_typeb(p);
  if (suite == "loops") return detail::suite_loops(p);
  if (suite == "closedforms") return detail::suite_closedforms(p);
  throw std::invalid_argument("unknown suite '" + suite +
                              "' (expected main, runtime, stabcover, bounds, typeb, loops, closedforms)");
}

inline const std::vector<std::string>& all_suites() {
  static const std::vector<std::string> names = {"main",  "runtime", "stabcover", "bounds",
                                                 "typeb", "loops",   "closedforms"};
  return names;
}

}  // namespace chipfire
