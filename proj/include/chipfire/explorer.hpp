#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "chipfire/config.hpp"
#include "chipfire/engine.hpp"
#include "chipfire/graph.hpp"

namespace chipfire {

struct EnumLimits {
  std::uint64_t max_states = 5'000'000;
  double max_seconds = 300.0;
};

// All stable labeled configurations reachable from one start. Complete runs
// share a single underlying unlabeled configuration (stabilization is
// unique); `exact` is false when the limits truncated the search.
struct StableSet {
  int n = 0;
  PathGraph graph;
  std::vector<LabeledConfig> stables;
  std::uint64_t reachable_states = 0;
  bool exact = true;
};

enum class ExploreOrder { dfs, bfs };

namespace detail {

// States are packed as one byte per label (position as a signed byte), up
// to 16 labels. The label list is fixed by the start configuration, so the
// byte vector is a faithful state key.
struct PackedState {
  std::array<std::int8_t, 16> bytes{};
  bool operator==(const PackedState&) const = default;
};

struct PackedStateHash {
  std::size_t operator()(const PackedState& s) const {
    std::uint64_t a, b;
    static_assert(sizeof(s.bytes) == 16);
    __builtin_memcpy(&a, s.bytes.data(), 8);
    __builtin_memcpy(&b, s.bytes.data() + 8, 8);
    return static_cast<std::size_t>(splitmix64_mix(a ^ (b * 0x9E3779B97F4A7C15ull)));
  }
};

inline PackedState pack_positions(const std::vector<Vertex>& pos) {
  PackedState s;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (pos[i] < -120 || pos[i] > 120) throw std::runtime_error("state escaped packing range");
    s.bytes[i] = static_cast<std::int8_t>(pos[i]);
  }
  return s;
}

}  // namespace detail

// Exhaustive reachable-state search from `start` on `g`, collecting every
// stable labeled configuration. Memoized on the full positions map; the
// result set is independent of exploration order.
inline StableSet enumerate_stables(const PathGraph& g, const LabeledConfig& start,
                                   const EnumLimits& limits = {},
                                   ExploreOrder order = ExploreOrder::dfs) {
  const int n = start.size();
  if (n > 16) throw std::invalid_argument("enumeration supports at most 16 chips");
  StableSet out;
  out.n = n;
  out.graph = g;
  if (n == 0) {
    out.reachable_states = 1;
    out.stables.push_back(start);
    return out;
  }

  std::vector<int> labels;
  std::vector<Vertex> start_pos;
  for (const auto& [label, v] : start.positions()) {
    if (!g.contains(v)) throw std::domain_error("chips placed outside graph domain");
    labels.push_back(label);
    start_pos.push_back(v);
  }

  std::unordered_set<detail::PackedState, detail::PackedStateHash> seen;
  std::deque<detail::PackedState> frontier;
  const detail::PackedState s0 = detail::pack_positions(start_pos);
  seen.insert(s0);
  frontier.push_back(s0);

  const auto t0 = std::chrono::steady_clock::now();
  std::uint64_t expanded = 0;
  std::vector<detail::PackedState> stable_states;

  std::vector<Vertex> pos(static_cast<std::size_t>(n));
  while (!frontier.empty()) {
    detail::PackedState cur;
    if (order == ExploreOrder::dfs) {
      cur = frontier.back();
      frontier.pop_back();
    } else {
      cur = frontier.front();
      frontier.pop_front();
    }
    for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = cur.bytes[i];

    // Group label slots by vertex; slots are in ascending label order
    // already, so each group lists its labels ascending.
    std::map<Vertex, std::vector<int>> at;
    for (int slot = 0; slot < n; ++slot) at[pos[static_cast<std::size_t>(slot)]].push_back(slot);

    bool any_move = false;
    for (const auto& [v, slots] : at) {
      const LocalStructure ls = g.local_structure(v);
      const std::int64_t k = ls.outdeg();
      const std::int64_t c = static_cast<std::int64_t>(slots.size());
      if (c < k) continue;
      any_move = true;
      const std::int64_t count = binomial(c, k);
      for (std::int64_t rank = 0; rank < count; ++rank) {
        // Indices into `slots` of the fired chips, lexicographic by rank.
        std::vector<int> chosen;
        chosen.reserve(static_cast<std::size_t>(k));
        {
          std::int64_t rk = rank, from = 0;
          for (std::int64_t t = 0; t < k; ++t) {
            for (std::int64_t x = from;; ++x) {
              const std::int64_t cnt = binomial(c - 1 - x, k - 1 - t);
              if (rk < cnt) {
                chosen.push_back(slots[static_cast<std::size_t>(x)]);
                from = x + 1;
                break;
              }
              rk -= cnt;
            }
          }
        }
        std::vector<Vertex> next = pos;
        for (std::int64_t t = 0; t < ls.left; ++t) next[static_cast<std::size_t>(chosen[static_cast<std::size_t>(t)])] -= 1;
        for (std::int64_t t = 0; t < ls.right; ++t) {
          next[static_cast<std::size_t>(chosen[chosen.size() - 1 - static_cast<std::size_t>(t)])] += 1;
        }
        const detail::PackedState key = detail::pack_positions(next);
        if (seen.insert(key).second) frontier.push_back(key);
      }
    }
    if (!any_move) stable_states.push_back(cur);

    ++expanded;
    if (seen.size() > limits.max_states) {
      out.exact = false;
      break;
    }
    if ((expanded & 1023) == 0) {
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
      if (dt.count() > limits.max_seconds) {
        out.exact = false;
        break;
      }
    }
  }

  out.reachable_states = seen.size();
  for (const auto& st : stable_states) {
    std::map<int, Vertex> m;
    for (int slot = 0; slot < n; ++slot) m.emplace(labels[static_cast<std::size_t>(slot)], st.bytes[slot]);
    out.stables.push_back(LabeledConfig::from_positions(std::move(m)));
  }
  std::sort(out.stables.begin(), out.stables.end(), [](const LabeledConfig& a, const LabeledConfig& b) {
    return std::lexicographical_compare(
        a.positions().begin(), a.positions().end(), b.positions().begin(), b.positions().end());
  });
  return out;
}

// Left-to-right reading of a stable configuration whose support has exactly
// one chip per vertex; only then does the configuration name a permutation.
struct PermView {
  std::vector<int> perm;
  std::int64_t inversions = 0;
  Vertex support_min = 0;
};

inline std::optional<PermView> perm_view(const LabeledConfig& c) {
  const int n = c.size();
  if (n == 0) return std::nullopt;
  if (!c.has_standard_labels(n)) return std::nullopt;
  std::map<Vertex, int> by_vertex;
  for (const auto& [label, v] : c.positions()) {
    if (!by_vertex.emplace(v, label).second) return std::nullopt;  // stacked
  }
  const Vertex lo = by_vertex.begin()->first;
  const Vertex hi = by_vertex.rbegin()->first;
  if (hi - lo + 1 != n) return std::nullopt;  // gapped support
  PermView out;
  out.support_min = lo;
  out.perm.reserve(static_cast<std::size_t>(n));
  for (const auto& [v, label] : by_vertex) {
    (void)v;
    out.perm.push_back(label);
  }
  for (std::size_t a = 0; a < out.perm.size(); ++a) {
    for (std::size_t b = a + 1; b < out.perm.size(); ++b) {
      if (out.perm[a] > out.perm[b]) ++out.inversions;
    }
  }
  return out;
}

// Chips perm[t] placed left to right from `base`; the centered overload
// puts an odd-length permutation on [-m, m].
inline LabeledConfig config_from_permutation(const std::vector<int>& perm, Vertex base) {
  std::map<int, Vertex> m;
  for (std::size_t t = 0; t < perm.size(); ++t) {
    if (!m.emplace(perm[t], base + static_cast<Vertex>(t)).second) {
      throw std::invalid_argument("permutation has repeated labels");
    }
  }
  return LabeledConfig::from_positions(std::move(m));
}

inline LabeledConfig config_from_permutation(const std::vector<int>& perm) {
  if (perm.size() % 2 == 0) throw std::invalid_argument("centered placement needs odd length");
  return config_from_permutation(perm, -static_cast<Vertex>(perm.size() / 2));
}

// The add-a-chip necessary condition for membership in the stable set of
// the origin stack: for every order-preserving relabeling [n] -> [n+1],
// adding the missing label at the origin and stabilizing must sort. All
// stabilizations of the augmented configuration are enumerated, so the
// verdict does not lean on any confluence assumption.
inline bool add_chip_condition(const PathGraph& g, const LabeledConfig& c,
                               const EnumLimits& limits = {}) {
  const int n = c.size();
  if (!c.has_standard_labels(n)) throw std::invalid_argument("add-chip condition needs labels 1..n");
  for (int j = 1; j <= n + 1; ++j) {
    std::map<int, Vertex> m;
    for (const auto& [label, v] : c.positions()) m.emplace(label < j ? label : label + 1, v);
    m.emplace(j, 0);
    const LabeledConfig augmented = LabeledConfig::from_positions(std::move(m));
    const StableSet set = enumerate_stables(g, augmented, limits);
    if (!set.exact) throw std::runtime_error("add-chip enumeration truncated by limits");
    for (const LabeledConfig& d : set.stables) {
      if (!check_sorted(g, d, n + 1).sorted) return false;
    }
  }
  return true;
}

struct PermReport {
  std::vector<int> perm;
  std::int64_t inversions = 0;
  bool bounds_ok = false;
  std::optional<bool> add_chip_ok;
};

struct AnalyzeOptions {
  bool check_add_chip = false;
  EnumLimits add_chip_limits{};
};

struct AnalyzeReport {
  std::int64_t max_inversions = 0;
  std::vector<PermReport> per_perm;
};

inline AnalyzeReport analyze(const StableSet& set, const AnalyzeOptions& opt = {}) {
  AnalyzeReport out;
  for (const LabeledConfig& d : set.stables) {
    const auto pv = perm_view(d);
    if (!pv) throw std::invalid_argument("stable set is not permutation-identifiable");
    PermReport pr;
    pr.perm = pv->perm;
    pr.inversions = pv->inversions;
    pr.bounds_ok = check_label_bounds(d, set.n).ok;
    if (opt.check_add_chip) pr.add_chip_ok = add_chip_condition(set.graph, d, opt.add_chip_limits);
    out.max_inversions = std::max(out.max_inversions, pr.inversions);
    out.per_perm.push_back(std::move(pr));
  }
  return out;
}

// Conjecture harness. Hypotheses are evaluated by unlabeled simulation;
// sorting verdicts come from exhaustive enumeration when the limits allow
// it and stay unset otherwise. Reports never extrapolate.
struct ConjectureParams {
  std::vector<Vertex> s;   // loop vertices for the single-loop family
  std::int64_t r = 1;      // edge multiplicity
  std::int64_t n = 0;      // chips at the origin
};

struct ConjectureReport {
  std::string id;
  bool applicable = false;                  // the conjecture's hypotheses hold
  std::optional<bool> hyp_min_drop;         // min(stab(n)) < min(stab(n-1))
  std::optional<bool> hyp_max_rise;         // max(stab(n)) > max(stab(n-1))
  std::optional<bool> balanced_sum;         // sum of S inside the open support = 0
  bool triple_consistent = true;            // the three above never hold exactly two at a time
  std::optional<bool> sorts;                // exhaustive sorting verdict, when computed
  std::optional<bool> conclusion_holds;     // the conjecture's conclusion, when decidable here
  bool exhaustive = false;
  std::uint64_t reachable_states = 0;
  std::uint64_t stable_count = 0;
  std::optional<std::int64_t> max_inversions;
  std::optional<std::int64_t> expected_max_inversions;
  std::string note;
};

namespace detail {

inline PathGraph single_loop_graph(const std::vector<Vertex>& s) {
  std::map<Vertex, std::int64_t> loops;
  for (Vertex v : s) loops[v] = 1;
  return PathGraph::line().with_loops(std::move(loops));
}

// Evaluates the min-drop / max-rise / balanced-sum triple on the
// single-loop graph for chip count n. min/max of an empty stabilization
// act as +inf / -inf.
inline void eval_loop_hypotheses(const PathGraph& g, const std::vector<Vertex>& s, std::int64_t n,
                                 ConjectureReport& rep) {
  const UnlabeledConfig big = stabilize_fast(g, n_delta0(n)).final_config;
  const UnlabeledConfig small = stabilize_fast(g, n_delta0(n - 1)).final_config;
  const auto big_min = big.min_vertex();
  const auto big_max = big.max_vertex();
  const auto small_min = small.min_vertex();
  const auto small_max = small.max_vertex();
  rep.hyp_min_drop = big_min.has_value() && (!small_min.has_value() || *big_min < *small_min);
  rep.hyp_max_rise = big_max.has_value() && (!small_max.has_value() || *big_max > *small_max);
  bool balanced = true;
  if (big_min.has_value()) {
    std::int64_t sum = 0;
    for (Vertex v : s) {
      if (v >= *big_min + 1 && v <= *big_max - 1) sum = checked_add(sum, v);
    }
    balanced = sum == 0;
  }
  rep.balanced_sum = balanced;
  const int trues = int(*rep.hyp_min_drop) + int(*rep.hyp_max_rise) + int(balanced);
  rep.triple_consistent = trues != 2;
}

inline void attach_sorting_verdict(const PathGraph& g, std::int64_t chips, const EnumLimits& limits,
                                   ConjectureReport& rep) {
  if (chips > 16) {
    rep.note = "enumeration skipped: chip count above packing limit";
    return;
  }
  const StableSet set = enumerate_stables(g, LabeledConfig::stacked_at_origin(static_cast<int>(chips)), limits);
  rep.reachable_states = set.reachable_states;
  rep.stable_count = set.stables.size();
  rep.exhaustive = set.exact;
  if (!set.exact) {
    rep.note = "enumeration truncated by limits";
    return;
  }
  bool all_sorted = true;
  for (const LabeledConfig& d : set.stables) {
    if (!check_sorted(g, d, static_cast<int>(chips)).sorted) {
      all_sorted = false;
      break;
    }
  }
  rep.sorts = all_sorted;
}

}  // namespace detail

inline ConjectureReport check_conjecture(const std::string& id, const ConjectureParams& p,
                                         const EnumLimits& limits = {}) {
  ConjectureReport rep;
  rep.id = id;
  if (p.n < 1) throw std::invalid_argument("conjecture check needs n >= 1");
  if (id == "loops") {
    const PathGraph g = detail::single_loop_graph(p.s);
    detail::eval_loop_hypotheses(g, p.s, p.n, rep);
    rep.applicable = *rep.hyp_min_drop && *rep.hyp_max_rise;
    detail::attach_sorting_verdict(g, p.n, limits, rep);
    rep.conclusion_holds = rep.sorts;
    return rep;
  }
  if (id == "parallel") {
    if (p.r < 1) throw std::invalid_argument("parallel conjecture needs r >= 1");
    rep.applicable = p.n % (2 * p.r) == 0;
    detail::attach_sorting_verdict(PathGraph::line().with_multiplicity(p.r), p.n, limits, rep);
    rep.conclusion_holds = rep.sorts;
    return rep;
  }
  if (id == "combined") {
    if (p.r < 1) throw std::invalid_argument("combined conjecture needs r >= 1");
    const PathGraph base = detail::single_loop_graph(p.s);
    detail::eval_loop_hypotheses(base, p.s, p.n, rep);
    rep.applicable = *rep.hyp_min_drop && *rep.hyp_max_rise;
    // The conclusion lives on the r-fold graph with r * n chips.
    detail::attach_sorting_verdict(base.with_multiplicity(p.r), checked_mul(p.r, p.n), limits, rep);
    rep.conclusion_holds = rep.sorts;
    return rep;
  }
  if (id == "inversions") {
    if (p.n % 2 == 0) throw std::invalid_argument("inversion conjecture concerns odd chip counts");
    rep.applicable = true;
    const PathGraph g = PathGraph::line();
    const StableSet set = enumerate_stables(g, LabeledConfig::stacked_at_origin(static_cast<int>(p.n)), limits);
    rep.reachable_states = set.reachable_states;
    rep.stable_count = set.stables.size();
    rep.exhaustive = set.exact;
    if (set.exact) {
      const AnalyzeReport ar = analyze(set);
      rep.max_inversions = ar.max_inversions;
      rep.expected_max_inversions = (p.n - 1) / 2;
      rep.conclusion_holds = ar.max_inversions == *rep.expected_max_inversions;
    } else {
      rep.note = "enumeration truncated by limits";
    }
    return rep;
  }
  throw std::invalid_argument("unknown conjecture id '" + id + "'");
}

}  // namespace chipfire
