#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "chipfire/config.hpp"
#include "chipfire/engine.hpp"
#include "chipfire/graph.hpp"
#include "chipfire/rng.hpp"

namespace chipfire {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// The three random protocols for stabilizing the origin stack on the line:
// (1) a uniformly random legal move each step, (2) a uniformly random
// unstable vertex followed by a uniformly random pair there, (3) a maximal
// firing sequence drawn uniformly among all of them. The third has no
// feasible sampler, so it lives in exact_sort_probability only.
enum class Protocol { uniform_move, uniform_vertex_then_pair, uniform_sequence };

inline const char* protocol_name(Protocol p) {
  switch (p) {
    case Protocol::uniform_move: return "uniform_move";
    case Protocol::uniform_vertex_then_pair: return "uniform_vertex_then_pair";
    case Protocol::uniform_sequence: return "uniform_sequence";
  }
  return "?";
}

inline std::optional<Protocol> protocol_from_name(std::string_view name) {
  if (name == "uniform_move") return Protocol::uniform_move;
  if (name == "uniform_vertex_then_pair") return Protocol::uniform_vertex_then_pair;
  if (name == "uniform_sequence") return Protocol::uniform_sequence;
  return std::nullopt;
}

struct ProtocolRun {
  Protocol protocol = Protocol::uniform_move;
  int n = 0;
  std::int64_t trials = 0;
  std::uint64_t master_seed = 0;
  std::int64_t sorted_count = 0;
  double ci_lo = 0.0;  // reporting only; dynamics never touch floating point
  double ci_hi = 0.0;

  double estimate() const {
    return trials == 0 ? 0.0 : static_cast<double>(sorted_count) / static_cast<double>(trials);
  }
};

// Sampled sorting probability for the origin stack of n chips on the plain
// line. Per-trial seeds are derived from (master_seed, trial index), so the
// run is reproducible bit for bit and independent of how trials are split
// across threads.
inline ProtocolRun estimate_sort_probability(int n, Protocol protocol, std::int64_t trials,
                                             std::uint64_t master_seed, int threads = 1) {
  if (protocol == Protocol::uniform_sequence) {
    throw std::invalid_argument("uniform_sequence has no sampler; use exact_sort_probability");
  }
  if (n < 1) throw std::invalid_argument("sampling needs n >= 1");
  if (trials < 1) throw std::invalid_argument("sampling needs at least one trial");

  const PathGraph g = PathGraph::line();
  const LabeledConfig start = LabeledConfig::stacked_at_origin(n);

  auto run_range = [&](std::int64_t from, std::int64_t to) -> std::int64_t {
    std::int64_t sorted = 0;
    for (std::int64_t t = from; t < to; ++t) {
      const std::uint64_t seed = stream_seed(master_seed, static_cast<std::uint64_t>(t));
      const Strategy strat = protocol == Protocol::uniform_move
                                 ? Strategy::uniform_move(seed)
                                 : Strategy::uniform_vertex_then_chips(seed);
      const StabilizationReport rep = stabilize(g, start, strat);
      if (check_sorted(g, *rep.final_labeled, n).sorted) ++sorted;
    }
    return sorted;
  };

  ProtocolRun run;
  run.protocol = protocol;
  run.n = n;
  run.trials = trials;
  run.master_seed = master_seed;

  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(std::min<std::int64_t>(trials, 64))));
  if (workers == 1) {
    run.sorted_count = run_range(0, trials);
  } else {
    std::vector<std::int64_t> partial(static_cast<std::size_t>(workers), 0);
    std::vector<std::thread> pool;
    const std::int64_t chunk = (trials + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::int64_t from = std::min<std::int64_t>(trials, w * chunk);
      const std::int64_t to = std::min<std::int64_t>(trials, from + chunk);
      pool.emplace_back([&, w, from, to] { partial[static_cast<std::size_t>(w)] = run_range(from, to); });
    }
    for (auto& th : pool) th.join();
    for (std::int64_t c : partial) run.sorted_count += c;
  }

  // Normal-approximation interval, clamped by a rule-of-three bound at the
  // extremes.
  const double p = run.estimate();
  const double t = static_cast<double>(trials);
  if (run.sorted_count == 0) {
    run.ci_lo = 0.0;
    run.ci_hi = std::min(1.0, 3.0 / t);
  } else if (run.sorted_count == trials) {
    run.ci_lo = std::max(0.0, 1.0 - 3.0 / t);
    run.ci_hi = 1.0;
  } else {
    const double se = std::sqrt(p * (1.0 - p) / t);
    run.ci_lo = std::max(0.0, p - 1.96 * se);
    run.ci_hi = std::min(1.0, p + 1.96 * se);
  }
  return run;
}

namespace detail {

// Reachable labeled states of the origin stack on the plain line, with the
// move lists needed for exact probability propagation. Pair firings raise
// the squared-position sum by exactly 2, so grouping states by that sum
// gives a topological order for free.
struct ExactStateSpace {
  std::vector<std::vector<Vertex>> states;             // positions by label 1..n
  std::vector<std::vector<std::size_t>> successors;    // per state, one entry per legal move
  std::vector<std::int64_t> move_weights;              // protocol (2): per-state denominator helper
  std::vector<std::vector<std::pair<std::size_t, Rational>>> move_probs;  // per state: (succ, prob)
  std::vector<bool> sorted_terminal;
  std::vector<bool> terminal;
  std::vector<std::size_t> topo;                       // indices in ascending level
  std::size_t start = 0;
};

inline ExactStateSpace build_exact_space(int n, Protocol protocol) {
  ExactStateSpace space;
  std::map<std::vector<Vertex>, std::size_t> index;
  std::vector<Vertex> origin(static_cast<std::size_t>(n), 0);
  auto intern = [&](const std::vector<Vertex>& pos) -> std::size_t {
    auto [it, inserted] = index.emplace(pos, space.states.size());
    if (inserted) space.states.push_back(pos);
    return it->second;
  };
  space.start = intern(origin);

  for (std::size_t at = 0; at < space.states.size(); ++at) {
    const std::vector<Vertex> pos = space.states[at];  // copy: states grows below
    std::map<Vertex, std::vector<int>> cells;
    for (int slot = 0; slot < n; ++slot) cells[pos[static_cast<std::size_t>(slot)]].push_back(slot);

    std::vector<std::size_t> succs;
    std::vector<Rational> probs;
    std::int64_t unstable_vertices = 0;
    for (const auto& [v, slots] : cells) {
      if (slots.size() >= 2) ++unstable_vertices;
    }
    for (const auto& [v, slots] : cells) {
      (void)v;
      const std::size_t c = slots.size();
      if (c < 2) continue;
      const std::int64_t pairs_here = binomial(static_cast<std::int64_t>(c), 2);
      for (std::size_t a = 0; a < c; ++a) {
        for (std::size_t b = a + 1; b < c; ++b) {
          std::vector<Vertex> next = pos;
          next[static_cast<std::size_t>(slots[a])] -= 1;  // smaller label left
          next[static_cast<std::size_t>(slots[b])] += 1;  // larger label right
          succs.push_back(intern(next));
          if (protocol == Protocol::uniform_vertex_then_pair) {
            probs.emplace_back(Rational(1) / (Rational(unstable_vertices) * pairs_here));
          }
        }
      }
    }
    if (protocol == Protocol::uniform_move && !succs.empty()) {
      const Rational each = Rational(1) / Rational(static_cast<std::int64_t>(succs.size()));
      probs.assign(succs.size(), each);
    }
    space.terminal.push_back(succs.empty());
    bool sorted = true;
    for (int slot = 0; slot + 1 < n; ++slot) {
      if (pos[static_cast<std::size_t>(slot)] > pos[static_cast<std::size_t>(slot) + 1]) {
        sorted = false;
        break;
      }
    }
    space.sorted_terminal.push_back(succs.empty() && sorted);
    space.successors.push_back(std::move(succs));
    std::vector<std::pair<std::size_t, Rational>> mp;
    for (std::size_t e = 0; e < space.successors.back().size(); ++e) {
      if (!probs.empty()) mp.emplace_back(space.successors.back()[e], probs[e]);
    }
    space.move_probs.push_back(std::move(mp));
  }

  // Topological order by squared-position level.
  space.topo.resize(space.states.size());
  for (std::size_t i = 0; i < space.topo.size(); ++i) space.topo[i] = i;
  auto level = [&](std::size_t idx) {
    std::int64_t s = 0;
    for (Vertex p : space.states[idx]) s += p * p;
    return s;
  };
  std::sort(space.topo.begin(), space.topo.end(),
            [&](std::size_t a, std::size_t b) { return level(a) < level(b); });
  return space;
}

}  // namespace detail

// Exact sorting probability under any of the three protocols, as a
// rational number. Protocols (1) and (2) propagate probability mass
// forward through the reachable-state graph; protocol (3) counts maximal
// firing sequences with big-integer dynamic programming. Guarded because
// the state space grows quickly; override the guard knowingly.
inline Rational exact_sort_probability(int n, Protocol protocol, int feasibility_guard = 7) {
  if (n < 1) throw std::invalid_argument("exact probability needs n >= 1");
  if (n > feasibility_guard) {
    throw std::invalid_argument("n exceeds the exact-computation guard (" +
                                std::to_string(feasibility_guard) + "); raise the guard explicitly");
  }
  const detail::ExactStateSpace space = detail::build_exact_space(n, protocol);

  if (protocol == Protocol::uniform_sequence) {
    // N(s) = number of maximal sequences from s; NS(s) = those ending sorted.
    std::vector<BigInt> total(space.states.size(), 0), sorted(space.states.size(), 0);
    for (auto it = space.topo.rbegin(); it != space.topo.rend(); ++it) {
      const std::size_t s = *it;
      if (space.terminal[s]) {
        total[s] = 1;
        sorted[s] = space.sorted_terminal[s] ? 1 : 0;
        continue;
      }
      for (std::size_t succ : space.successors[s]) {
        total[s] += total[succ];
        sorted[s] += sorted[succ];
      }
    }
    return Rational(sorted[space.start], total[space.start]);
  }

  std::vector<Rational> mass(space.states.size(), Rational(0));
  mass[space.start] = 1;
  Rational hit = 0;
  for (std::size_t s : space.topo) {
    if (mass[s] == 0) continue;
    if (space.terminal[s]) {
      if (space.sorted_terminal[s]) hit += mass[s];
      continue;
    }
    for (const auto& [succ, p] : space.move_probs[s]) mass[succ] += mass[s] * p;
  }
  return hit;
}

}  // namespace chipfire
