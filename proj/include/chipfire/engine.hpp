#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "chipfire/config.hpp"
#include "chipfire/graph.hpp"
#include "chipfire/rng.hpp"
#include "chipfire/util.hpp"

namespace chipfire {

// One firing step: `chips` are the labels removed at `vertex`, strictly
// ascending. The graph's local structure decides where they go: the
// smallest `left` of them step left, the largest `right` step right, the
// middle ones ride loop edges and stay. Unlabeled moves leave `chips` empty.
struct FiringMove {
  Vertex vertex = 0;
  std::vector<int> chips;
  bool operator==(const FiringMove&) const = default;
};

struct Strategy {
  enum class Kind {
    leftmost_vertex,
    rightmost_vertex,
    uniform_move,
    uniform_vertex_then_chips,
    scripted,
  };

  Kind kind = Kind::leftmost_vertex;
  std::uint64_t seed = 0;
  std::vector<FiringMove> script;

  static Strategy leftmost() { return {Kind::leftmost_vertex, 0, {}}; }
  static Strategy rightmost() { return {Kind::rightmost_vertex, 0, {}}; }
  static Strategy uniform_move(std::uint64_t seed) { return {Kind::uniform_move, seed, {}}; }
  static Strategy uniform_vertex_then_chips(std::uint64_t seed) {
    return {Kind::uniform_vertex_then_chips, seed, {}};
  }
  static Strategy scripted(std::vector<FiringMove> moves) {
    return {Kind::scripted, 0, std::move(moves)};
  }
};

inline const char* strategy_name(Strategy::Kind k) {
  switch (k) {
    case Strategy::Kind::leftmost_vertex: return "leftmost_vertex";
    case Strategy::Kind::rightmost_vertex: return "rightmost_vertex";
    case Strategy::Kind::uniform_move: return "uniform_move";
    case Strategy::Kind::uniform_vertex_then_chips: return "uniform_vertex_then_chips";
    case Strategy::Kind::scripted: return "scripted";
  }
  return "?";
}

inline std::optional<Strategy::Kind> strategy_kind_from_name(std::string_view name) {
  using K = Strategy::Kind;
  if (name == "leftmost_vertex") return K::leftmost_vertex;
  if (name == "rightmost_vertex") return K::rightmost_vertex;
  if (name == "uniform_move") return K::uniform_move;
  if (name == "uniform_vertex_then_chips") return K::uniform_vertex_then_chips;
  if (name == "scripted") return K::scripted;
  return std::nullopt;
}

struct StabilizeOptions {
  std::optional<std::int64_t> step_budget;  // individual firings; default cubic in chips
  bool trace = false;
  std::int64_t trace_limit = 1 << 20;
};

struct StabilizationReport {
  UnlabeledConfig final_config;
  std::optional<LabeledConfig> final_labeled;
  std::int64_t total_firings = 0;
  std::map<Vertex, std::int64_t> odometer;       // vertices that fired at least once
  std::map<int, std::int64_t> cross_firings;     // k -> firings pairing labels <= k with > k;
                                                 // tracked on the plain line with labels 1..n
  std::vector<FiringMove> trace;                 // filled when options.trace
  bool trace_truncated = false;
};

namespace detail {

// Lexicographic rank -> k-subset of the sorted label list `cell`.
inline std::vector<int> unrank_subset(const std::vector<int>& cell, std::int64_t k, std::int64_t rank) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(k));
  const std::int64_t c = static_cast<std::int64_t>(cell.size());
  std::int64_t start = 0;
  for (std::int64_t t = 0; t < k; ++t) {
    for (std::int64_t x = start;; ++x) {
      std::int64_t count = binomial(c - 1 - x, k - 1 - t);
      if (rank < count) {
        out.push_back(cell[static_cast<std::size_t>(x)]);
        start = x + 1;
        break;
      }
      rank -= count;
    }
  }
  return out;
}

// Dense sliding-window state for labeled runs. Cells hold sorted label
// values; the window grows on demand so trajectories are unrestricted.
class LabeledEngine {
 public:
  LabeledEngine(const PathGraph& g, const LabeledConfig& start, int cross_n = 0)
      : g_(&g) {
    for (const auto& [label, v] : start.positions()) {
      if (!g.contains(v)) {
        throw std::domain_error("chip " + std::to_string(label) + " placed outside graph domain");
      }
    }
    track_cross_ = g.is_plain_line() && cross_n > 0 && start.has_standard_labels(cross_n);
    if (track_cross_) cross_diff_.assign(static_cast<std::size_t>(cross_n) + 2, 0);
    cross_n_ = cross_n;
    for (const auto& [label, v] : start.positions()) {
      ensure(v);
      auto& cell = cells_[idx(v)];
      cell.insert(std::lower_bound(cell.begin(), cell.end(), label), label);
    }
    for (const auto& [label, v] : start.positions()) {
      (void)label;
      refresh(v);
    }
  }

  bool stable() const { return unstable_.empty(); }
  std::int64_t total_firings() const { return steps_; }

  const std::set<Vertex>& unstable() const { return unstable_; }

  LabeledConfig current() const {
    std::map<int, Vertex> m;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      for (int label : cells_[i]) m.emplace(label, lo_ + static_cast<Vertex>(i));
    }
    return LabeledConfig::from_positions(std::move(m));
  }

  std::vector<FiringMove> legal_moves() const {
    std::vector<FiringMove> out;
    for (Vertex v : unstable_) {
      const auto& cell = cells_[idx(v)];
      const std::int64_t k = g_->outdeg(v);
      const std::int64_t count = binomial(static_cast<std::int64_t>(cell.size()), k);
      for (std::int64_t r = 0; r < count; ++r) out.push_back({v, unrank_subset(cell, k, r)});
    }
    return out;
  }

  void apply(const FiringMove& mv) {
    if (!g_->contains(mv.vertex)) throw std::invalid_argument("illegal move: vertex outside graph");
    ensure(mv.vertex);
    auto& cell = cells_[idx(mv.vertex)];
    const LocalStructure ls = g_->local_structure(mv.vertex);
    const std::int64_t k = ls.outdeg();
    if (static_cast<std::int64_t>(mv.chips.size()) != k) {
      throw std::invalid_argument("illegal move: expected " + std::to_string(k) + " chips");
    }
    for (std::size_t i = 0; i + 1 < mv.chips.size(); ++i) {
      if (mv.chips[i] >= mv.chips[i + 1]) throw std::invalid_argument("illegal move: chips not ascending");
    }
    if (!std::includes(cell.begin(), cell.end(), mv.chips.begin(), mv.chips.end())) {
      throw std::invalid_argument("illegal move: chips not all present at vertex");
    }
    // Remove the fired chips, then reinsert movers at their targets.
    std::vector<int> rest;
    rest.reserve(cell.size() - mv.chips.size());
    std::set_difference(cell.begin(), cell.end(), mv.chips.begin(), mv.chips.end(), std::back_inserter(rest));
    const std::size_t nl = static_cast<std::size_t>(ls.left);
    const std::size_t nr = static_cast<std::size_t>(ls.right);
    const std::size_t nm = mv.chips.size() - nl - nr;
    // Loop riders return to the vertex.
    for (std::size_t i = 0; i < nm; ++i) {
      int label = mv.chips[nl + i];
      rest.insert(std::lower_bound(rest.begin(), rest.end(), label), label);
    }
    cells_[idx(mv.vertex)] = std::move(rest);
    if (nl > 0) {
      ensure(mv.vertex - 1);
      auto& lcell = cells_[idx(mv.vertex - 1)];
      for (std::size_t i = 0; i < nl; ++i) {
        int label = mv.chips[i];
        lcell.insert(std::lower_bound(lcell.begin(), lcell.end(), label), label);
      }
      refresh(mv.vertex - 1);
    }
    if (nr > 0) {
      ensure(mv.vertex + 1);
      auto& rcell = cells_[idx(mv.vertex + 1)];
      for (std::size_t i = 0; i < nr; ++i) {
        int label = mv.chips[mv.chips.size() - nr + i];
        rcell.insert(std::lower_bound(rcell.begin(), rcell.end(), label), label);
      }
      refresh(mv.vertex + 1);
    }
    refresh(mv.vertex);
    odo_[idx(mv.vertex)] += 1;
    ++steps_;
    if (track_cross_ && nl == 1 && nr == 1 && mv.chips.size() == 2) {
      cross_diff_[static_cast<std::size_t>(mv.chips[0])] += 1;
      cross_diff_[static_cast<std::size_t>(mv.chips[1])] -= 1;
    }
  }

  FiringMove choose(const Strategy& strat, Rng& rng) const {
    switch (strat.kind) {
      case Strategy::Kind::leftmost_vertex:
        return canonical_at(*unstable_.begin());
      case Strategy::Kind::rightmost_vertex:
        return canonical_at(*unstable_.rbegin());
      case Strategy::Kind::uniform_move: {
        std::int64_t total = 0;
        for (Vertex v : unstable_) {
          total = checked_add(total, binomial(cell_size(v), g_->outdeg(v)));
        }
        std::int64_t r = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(total)));
        for (Vertex v : unstable_) {
          std::int64_t w = binomial(cell_size(v), g_->outdeg(v));
          if (r < w) return {v, unrank_subset(cells_[idx(v)], g_->outdeg(v), r)};
          r -= w;
        }
        throw std::logic_error("uniform_move: weight walk fell through");
      }
      case Strategy::Kind::uniform_vertex_then_chips: {
        std::uint64_t pick = rng.below(unstable_.size());
        auto it = unstable_.begin();
        std::advance(it, static_cast<std::ptrdiff_t>(pick));
        const Vertex v = *it;
        const std::int64_t k = g_->outdeg(v);
        const std::int64_t count = binomial(cell_size(v), k);
        std::int64_t r = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(count)));
        return {v, unrank_subset(cells_[idx(v)], k, r)};
      }
      case Strategy::Kind::scripted:
        throw std::logic_error("scripted strategy is driven by the stabilize loop");
    }
    throw std::logic_error("unknown strategy");
  }

  std::map<Vertex, std::int64_t> odometer() const {
    std::map<Vertex, std::int64_t> m;
    for (std::size_t i = 0; i < odo_.size(); ++i) {
      if (odo_[i] != 0) m.emplace(lo_ + static_cast<Vertex>(i), odo_[i]);
    }
    return m;
  }

  std::map<int, std::int64_t> cross_firings() const {
    std::map<int, std::int64_t> m;
    if (!track_cross_) return m;
    std::int64_t run = 0;
    for (int k = 1; k <= cross_n_; ++k) {
      run += cross_diff_[static_cast<std::size_t>(k)];
      m.emplace(k, run);
    }
    return m;
  }

 private:
  std::size_t idx(Vertex v) const { return static_cast<std::size_t>(v - lo_); }

  std::int64_t cell_size(Vertex v) const {
    return static_cast<std::int64_t>(cells_[idx(v)].size());
  }

  FiringMove canonical_at(Vertex v) const {
    const auto& cell = cells_[idx(v)];
    const std::size_t k = static_cast<std::size_t>(g_->outdeg(v));
    return {v, std::vector<int>(cell.begin(), cell.begin() + static_cast<std::ptrdiff_t>(k))};
  }

  void ensure(Vertex v) {
    if (cells_.empty()) {
      lo_ = v - 4;
      cells_.resize(9);
      odo_.resize(9, 0);
      return;
    }
    if (v >= lo_ && v < lo_ + static_cast<Vertex>(cells_.size())) return;
    Vertex new_lo = std::min(lo_, v);
    Vertex new_hi = std::max(lo_ + static_cast<Vertex>(cells_.size()) - 1, v);
    const Vertex margin = (new_hi - new_lo + 1) / 2 + 4;
    new_lo -= margin;
    new_hi += margin;
    std::vector<std::vector<int>> nc(static_cast<std::size_t>(new_hi - new_lo + 1));
    std::vector<std::int64_t> no(nc.size(), 0);
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      nc[static_cast<std::size_t>(lo_ - new_lo) + i] = std::move(cells_[i]);
      no[static_cast<std::size_t>(lo_ - new_lo) + i] = odo_[i];
    }
    cells_ = std::move(nc);
    odo_ = std::move(no);
    lo_ = new_lo;
  }

  void refresh(Vertex v) {
    // Outdegrees are always >= 1 in this family, so empty cells stay stable.
    if (cell_size(v) >= g_->outdeg(v)) {
      unstable_.insert(v);
    } else {
      unstable_.erase(v);
    }
  }

  const PathGraph* g_;
  Vertex lo_ = 0;
  std::vector<std::vector<int>> cells_;
  std::vector<std::int64_t> odo_;
  std::set<Vertex> unstable_;
  std::int64_t steps_ = 0;
  bool track_cross_ = false;
  int cross_n_ = 0;
  std::vector<std::int64_t> cross_diff_;
};

// Dense counts for unlabeled runs, plus a batched worklist stabilizer for
// the closed-form sweeps where single-step strategies would be wasteful.
class UnlabeledEngine {
 public:
  UnlabeledEngine(const PathGraph& g, const UnlabeledConfig& start) : g_(&g) {
    for (const auto& [v, k] : start.counts()) {
      if (!g.contains(v)) throw std::domain_error("chips placed outside graph domain");
      ensure(v);
      cnt_[idx(v)] = k;
    }
    for (const auto& [v, k] : start.counts()) {
      (void)k;
      refresh(v);
    }
  }

  bool stable() const { return unstable_.empty(); }
  std::int64_t total_firings() const { return steps_; }
  const std::set<Vertex>& unstable() const { return unstable_; }

  UnlabeledConfig current() const {
    std::map<Vertex, std::int64_t> m;
    for (std::size_t i = 0; i < cnt_.size(); ++i) {
      if (cnt_[i] > 0) m.emplace(lo_ + static_cast<Vertex>(i), cnt_[i]);
    }
    return UnlabeledConfig::from_counts(std::move(m));
  }

  void fire(Vertex v) {
    if (!g_->contains(v)) throw std::invalid_argument("illegal firing: vertex outside graph");
    ensure(v);
    const LocalStructure ls = g_->local_structure(v);
    if (cnt_[idx(v)] < ls.outdeg()) throw std::invalid_argument("illegal firing: not enough chips");
    apply_bulk(v, ls, 1);
  }

  // All firings at v that are legal back to back, in one update.
  void fire_bulk(Vertex v) {
    const LocalStructure ls = g_->local_structure(v);
    const std::int64_t c = cnt_[idx(v)];
    if (c < ls.outdeg()) return;
    const std::int64_t moved = ls.left + ls.right;
    const std::int64_t t = (c - ls.outdeg()) / moved + 1;
    apply_bulk(v, ls, t);
  }

  // One chip at v steps to v + 1: a rightward move, not a firing. Used by
  // the order-theory walks.
  void move_chip_right(Vertex v) {
    ensure(v);
    if (cnt_[idx(v)] < 1) throw std::invalid_argument("no chip to move at vertex");
    ensure(v + 1);
    cnt_[idx(v)] -= 1;
    cnt_[idx(v + 1)] += 1;
    refresh(v);
    refresh(v + 1);
  }

  Vertex choose(const Strategy& strat, Rng& rng) const {
    switch (strat.kind) {
      case Strategy::Kind::leftmost_vertex:
        return *unstable_.begin();
      case Strategy::Kind::rightmost_vertex:
        return *unstable_.rbegin();
      case Strategy::Kind::uniform_move:
      case Strategy::Kind::uniform_vertex_then_chips: {
        // Unlabeled moves are just vertices, so both random strategies
        // collapse to a uniform unstable-vertex choice.
        std::uint64_t pick = rng.below(unstable_.size());
        auto it = unstable_.begin();
        std::advance(it, static_cast<std::ptrdiff_t>(pick));
        return *it;
      }
      case Strategy::Kind::scripted:
        throw std::logic_error("scripted strategy is driven by the stabilize loop");
    }
    throw std::logic_error("unknown strategy");
  }

  // Order-free stabilization with batched firings. The abelian property
  // makes the result, the odometer, and the total agree with every
  // single-step strategy; tests pin that equality. The hot loop works on
  // the dense arrays only; the unstable set is rebuilt at the end.
  void run_bulk(std::int64_t budget) {
    std::deque<Vertex> queue(unstable_.begin(), unstable_.end());
    inq_.assign(cnt_.size(), 0);
    for (Vertex v : queue) inq_[idx(v)] = 1;
    const auto enqueue = [&](Vertex v) {
      if (!inq_[idx(v)] && cnt_[idx(v)] >= g_->outdeg(v)) {
        inq_[idx(v)] = 1;
        queue.push_back(v);
      }
    };
    try {
      while (!queue.empty()) {
        const Vertex v = queue.front();
        queue.pop_front();
        inq_[idx(v)] = 0;
        const LocalStructure ls = g_->local_structure(v);
        const std::int64_t c = cnt_[idx(v)];
        if (c < ls.outdeg()) continue;
        const std::int64_t moved = ls.left + ls.right;
        const std::int64_t t = (c - ls.outdeg()) / moved + 1;
        ensure(v - 1);
        ensure(v + 1);
        cnt_[idx(v)] -= checked_mul(t, moved);
        odo_[idx(v)] += t;
        steps_ = checked_add(steps_, t);
        if (steps_ > budget) throw StepBudgetExceeded("firing budget exhausted");
        if (ls.left > 0) {
          cnt_[idx(v - 1)] = checked_add(cnt_[idx(v - 1)], checked_mul(t, ls.left));
          enqueue(v - 1);
        }
        if (ls.right > 0) {
          cnt_[idx(v + 1)] = checked_add(cnt_[idx(v + 1)], checked_mul(t, ls.right));
          enqueue(v + 1);
        }
        enqueue(v);
      }
    } catch (...) {
      rebuild_unstable();
      throw;
    }
    rebuild_unstable();
  }

  std::map<Vertex, std::int64_t> odometer() const {
    std::map<Vertex, std::int64_t> m;
    for (std::size_t i = 0; i < odo_.size(); ++i) {
      if (odo_[i] != 0) m.emplace(lo_ + static_cast<Vertex>(i), odo_[i]);
    }
    return m;
  }

 private:
  std::size_t idx(Vertex v) const { return static_cast<std::size_t>(v - lo_); }

  void apply_bulk(Vertex v, const LocalStructure& ls, std::int64_t t) {
    ensure(v - 1);
    ensure(v + 1);
    cnt_[idx(v)] -= checked_mul(t, ls.left + ls.right);
    if (ls.left > 0) {
      cnt_[idx(v - 1)] = checked_add(cnt_[idx(v - 1)], checked_mul(t, ls.left));
      refresh(v - 1);
    }
    if (ls.right > 0) {
      cnt_[idx(v + 1)] = checked_add(cnt_[idx(v + 1)], checked_mul(t, ls.right));
      refresh(v + 1);
    }
    refresh(v);
    odo_[idx(v)] += t;
    steps_ += t;
  }

  void ensure(Vertex v) {
    if (g_->base() != GraphBase::line && v < 0) return;  // structurally unreachable
    if (cnt_.empty()) {
      lo_ = v - 4;
      cnt_.assign(9, 0);
      odo_.assign(9, 0);
      inq_.assign(9, 0);
      return;
    }
    if (v >= lo_ && v < lo_ + static_cast<Vertex>(cnt_.size())) return;
    Vertex new_lo = std::min(lo_, v);
    Vertex new_hi = std::max(lo_ + static_cast<Vertex>(cnt_.size()) - 1, v);
    const Vertex margin = (new_hi - new_lo + 1) / 2 + 4;
    new_lo -= margin;
    new_hi += margin;
    std::vector<std::int64_t> nc(static_cast<std::size_t>(new_hi - new_lo + 1), 0);
    std::vector<std::int64_t> no(nc.size(), 0);
    std::vector<std::uint8_t> ni(nc.size(), 0);
    for (std::size_t i = 0; i < cnt_.size(); ++i) {
      const std::size_t at = static_cast<std::size_t>(lo_ - new_lo) + i;
      nc[at] = cnt_[i];
      no[at] = odo_[i];
      ni[at] = i < inq_.size() ? inq_[i] : 0;
    }
    cnt_ = std::move(nc);
    odo_ = std::move(no);
    inq_ = std::move(ni);
    lo_ = new_lo;
  }

  void rebuild_unstable() {
    unstable_.clear();
    for (std::size_t i = 0; i < cnt_.size(); ++i) {
      const Vertex v = lo_ + static_cast<Vertex>(i);
      if (cnt_[i] > 0 && g_->contains(v) && cnt_[i] >= g_->outdeg(v)) unstable_.insert(v);
    }
  }

  void refresh(Vertex v) {
    if (!g_->contains(v)) return;
    if (cnt_[idx(v)] >= g_->outdeg(v)) {
      unstable_.insert(v);
    } else {
      unstable_.erase(v);
    }
  }

  const PathGraph* g_;
  Vertex lo_ = 0;
  std::vector<std::int64_t> cnt_;
  std::vector<std::int64_t> odo_;
  std::vector<std::uint8_t> inq_;  // run_bulk queue membership
  std::set<Vertex> unstable_;
  std::int64_t steps_ = 0;
};

}  // namespace detail

inline bool is_stable(const PathGraph& g, const UnlabeledConfig& c) {
  for (const auto& [v, k] : c.counts()) {
    if (k >= g.outdeg(v)) return false;
  }
  return true;
}

inline bool is_stable(const PathGraph& g, const LabeledConfig& c) {
  return is_stable(g, c.underlying());
}

inline std::vector<FiringMove> legal_moves(const PathGraph& g, const LabeledConfig& c) {
  detail::LabeledEngine eng(g, c);
  return eng.legal_moves();
}

inline LabeledConfig fire(const PathGraph& g, const LabeledConfig& c, const FiringMove& mv) {
  detail::LabeledEngine eng(g, c);
  eng.apply(mv);
  return eng.current();
}

inline UnlabeledConfig fire_unlabeled(const PathGraph& g, const UnlabeledConfig& c, Vertex v) {
  detail::UnlabeledEngine eng(g, c);
  eng.fire(v);
  return eng.current();
}

// Runs the labeled dynamics to stabilization under the given strategy.
// Scripted runs must supply exactly the moves that reach stability; partial
// application is apply_script's job.
inline StabilizationReport stabilize(const PathGraph& g, const LabeledConfig& start,
                                     const Strategy& strat, const StabilizeOptions& opt = {}) {
  detail::LabeledEngine eng(g, start, start.size());
  Rng rng(strat.seed);
  const std::int64_t budget = opt.step_budget.value_or(default_step_budget(start.size()));
  std::size_t script_at = 0;
  StabilizationReport rep;
  while (!eng.stable()) {
    FiringMove mv;
    if (strat.kind == Strategy::Kind::scripted) {
      if (script_at >= strat.script.size()) {
        throw std::invalid_argument("script ends before stabilization");
      }
      mv = strat.script[script_at++];
    } else {
      mv = eng.choose(strat, rng);
    }
    eng.apply(mv);
    if (opt.trace) {
      if (static_cast<std::int64_t>(rep.trace.size()) < opt.trace_limit) {
        rep.trace.push_back(mv);
      } else {
        rep.trace_truncated = true;
      }
    }
    if (eng.total_firings() > budget) throw StepBudgetExceeded("firing budget exhausted");
  }
  if (strat.kind == Strategy::Kind::scripted && script_at != strat.script.size()) {
    throw std::invalid_argument("script continues past stabilization");
  }
  rep.final_labeled = eng.current();
  rep.final_config = rep.final_labeled->underlying();
  rep.total_firings = eng.total_firings();
  rep.odometer = eng.odometer();
  rep.cross_firings = eng.cross_firings();
  return rep;
}

inline StabilizationReport stabilize(const PathGraph& g, const UnlabeledConfig& start,
                                     const Strategy& strat, const StabilizeOptions& opt = {}) {
  detail::UnlabeledEngine eng(g, start);
  Rng rng(strat.seed);
  const std::int64_t budget = opt.step_budget.value_or(default_step_budget(start.total()));
  std::size_t script_at = 0;
  StabilizationReport rep;
  while (!eng.stable()) {
    Vertex v;
    if (strat.kind == Strategy::Kind::scripted) {
      if (script_at >= strat.script.size()) {
        throw std::invalid_argument("script ends before stabilization");
      }
      const FiringMove& mv = strat.script[script_at++];
      if (!mv.chips.empty()) throw std::invalid_argument("unlabeled script moves carry no chip labels");
      v = mv.vertex;
    } else {
      v = eng.choose(strat, rng);
    }
    eng.fire(v);
    if (opt.trace) {
      if (static_cast<std::int64_t>(rep.trace.size()) < opt.trace_limit) {
        rep.trace.push_back({v, {}});
      } else {
        rep.trace_truncated = true;
      }
    }
    if (eng.total_firings() > budget) throw StepBudgetExceeded("firing budget exhausted");
  }
  if (strat.kind == Strategy::Kind::scripted && script_at != strat.script.size()) {
    throw std::invalid_argument("script continues past stabilization");
  }
  rep.final_config = eng.current();
  rep.total_firings = eng.total_firings();
  rep.odometer = eng.odometer();
  return rep;
}

// Batched, order-free unlabeled stabilization. Same final configuration,
// odometer, and total as any strategy run (abelian property); much faster
// on tall stacks.
inline StabilizationReport stabilize_fast(const PathGraph& g, const UnlabeledConfig& start,
                                          std::optional<std::int64_t> step_budget = {}) {
  detail::UnlabeledEngine eng(g, start);
  eng.run_bulk(step_budget.value_or(default_step_budget(start.total())));
  StabilizationReport rep;
  rep.final_config = eng.current();
  rep.total_firings = eng.total_firings();
  rep.odometer = eng.odometer();
  return rep;
}

// Stabilization of the interval configuration delta_[a+1, b-1] plus one
// extra chip anywhere inside [a, b]: the interval splits around a gap at
// a + b - i, mirroring the extra chip's offset.
inline UnlabeledConfig linestab(Vertex a, Vertex b, Vertex i) {
  if (a >= b) throw std::invalid_argument("linestab needs a < b");
  if (i < a || i > b) throw std::invalid_argument("linestab needs a <= i <= b");
  const Vertex gap = checked_sub(checked_add(a, b), i);
  return delta_interval(a, gap - 1).plus(delta_interval(gap + 1, b));
}

// Stabilization of n chips stacked at the origin, for every graph in the
// family with a proven formula. Throws invalid_argument when no closed
// form covers the graph.
inline UnlabeledConfig closed_form_stabilization(const PathGraph& g, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("negative chip count");
  if (g.multiplicity() != 1) throw std::invalid_argument("no closed form for edge multiplicities");
  switch (g.base()) {
    case GraphBase::line: {
      if (g.loops().empty()) {
        const std::int64_t m = n / 2;
        if (n % 2 == 0) return delta_interval(-m, -1).plus(delta_interval(1, m));
        return delta_interval(-m, m);
      }
      if (g.loops().size() == 1 && g.loops().begin()->first == 0) {
        const std::int64_t ell = g.loops().begin()->second;
        if (n < ell) return n_delta0(n);  // already stable: outdeg exceeds the stack
        const std::int64_t k = (n - ell) / 2;
        const std::int64_t at_origin = (n - ell) % 2 == 0 ? ell : ell + 1;
        return delta_interval(-k, -1).plus(delta_interval(1, k)).plus(n_delta0(at_origin));
      }
      throw std::invalid_argument("no closed form for loops away from the origin");
    }
    case GraphBase::half_line:
      if (!g.loops().empty()) throw std::invalid_argument("no closed form for half-line with loops");
      return delta_interval(1, n);
    case GraphBase::half_line_directed:
      if (!g.loops().empty()) throw std::invalid_argument("no closed form for directed half-line with loops");
      return delta_interval(0, n - 1);
  }
  throw std::invalid_argument("unknown graph base");
}

// Firing-count formulas for n chips stacked at the origin on the plain
// line, with m = floor(n / 2): the run fires m(m+1)(2m+1)/6 times in
// total, vertex j fires (m+1-|j|)(m-|j|)/2 times, and for even n the cut
// between labels k and k+1 is crossed (m-|k-m|)(m+|k-m|+1)/2 times.
struct FiringCountFormulas {
  std::int64_t n = 0;
  std::int64_t m = 0;

  std::int64_t total() const {
    return checked_mul(checked_mul(m, m + 1), 2 * m + 1) / 6;
  }

  std::int64_t at_vertex(Vertex j) const {
    const std::int64_t a = j < 0 ? -j : j;
    if (a >= m) return 0;
    return checked_mul(m + 1 - a, m - a) / 2;
  }

  std::int64_t crossings(int k) const {
    if (n % 2 != 0) throw std::domain_error("crossing counts are for even chip counts");
    if (k < 1 || k > n) throw std::invalid_argument("crossing cut out of range");
    const std::int64_t t = std::llabs(static_cast<std::int64_t>(k) - m);
    return checked_mul(m - t, m + t + 1) / 2;
  }
};

inline FiringCountFormulas predicted_counts(std::int64_t n) {
  if (n < 0) throw std::invalid_argument("negative chip count");
  return {n, n / 2};
}

// Exact terminal of the sorting theorem: n = 2m chips stacked at the
// origin on the plain line end with chip (k) at k - m - 1 for k <= m and
// at k - m for k > m.
inline LabeledConfig sorted_line_terminal(int n) {
  if (n <= 0 || n % 2 != 0) throw std::invalid_argument("sorted terminal needs positive even n");
  const int m = n / 2;
  std::map<int, Vertex> pos;
  for (int k = 1; k <= n; ++k) pos.emplace(k, k <= m ? k - m - 1 : k - m);
  return LabeledConfig::from_positions(std::move(pos));
}

// Terminal of the sorting run on the line with ell loops at the origin,
// for n with the right parity (n = 2m + ell): the first m chips line up
// left of the origin, ell chips rest on it, the remaining m line up right.
// Small stacks (n <= ell + 1) never fire at all.
inline LabeledConfig loops_sorted_terminal(int n, int ell) {
  if (n <= 0 || ell < 0) throw std::invalid_argument("loops terminal needs n >= 1, ell >= 0");
  std::map<int, Vertex> pos;
  if (n <= ell + 1) {
    for (int k = 1; k <= n; ++k) pos.emplace(k, 0);
    return LabeledConfig::from_positions(std::move(pos));
  }
  if ((n - ell) % 2 != 0) throw std::invalid_argument("loops terminal needs n = ell mod 2");
  const int m = (n - ell) / 2;
  for (int k = 1; k <= n; ++k) {
    Vertex v;
    if (k <= m) {
      v = k - (m + 1);
    } else if (k <= m + ell) {
      v = 0;
    } else {
      v = k - (m + ell);
    }
    pos.emplace(k, v);
  }
  return LabeledConfig::from_positions(std::move(pos));
}

// Terminals of the half-line variants: the undirected half-line parks chip
// (i) on vertex i, the loop-decorated directed one on vertex i - 1.
inline LabeledConfig half_line_sorted_terminal(int n) {
  if (n <= 0) throw std::invalid_argument("terminal needs n >= 1");
  std::map<int, Vertex> pos;
  for (int k = 1; k <= n; ++k) pos.emplace(k, k);
  return LabeledConfig::from_positions(std::move(pos));
}

inline LabeledConfig directed_half_line_sorted_terminal(int n) {
  if (n <= 0) throw std::invalid_argument("terminal needs n >= 1");
  std::map<int, Vertex> pos;
  for (int k = 1; k <= n; ++k) pos.emplace(k, k - 1);
  return LabeledConfig::from_positions(std::move(pos));
}

struct SortCheck {
  bool sorted = false;
  std::optional<std::pair<int, int>> violation;    // first adjacent label pair out of order
  std::optional<bool> matches_closed_form;         // plain line, standard even labels only
};

inline SortCheck check_sorted(const PathGraph& g, const LabeledConfig& c, int n) {
  if (!is_stable(g, c)) throw std::invalid_argument("check_sorted expects a stable configuration");
  SortCheck out;
  out.sorted = true;
  const auto& pos = c.positions();
  for (auto it = pos.begin(); it != pos.end(); ++it) {
    auto next = std::next(it);
    if (next == pos.end()) break;
    if (it->second > next->second) {
      out.sorted = false;
      out.violation = {it->first, next->first};
      break;
    }
  }
  if (g.is_plain_line() && n > 0 && n % 2 == 0 && c.has_standard_labels(n)) {
    out.matches_closed_form = (c == sorted_line_terminal(n));
  }
  return out;
}

struct BoundsCheck {
  bool ok = false;
  std::optional<int> first_violating_label;
};

// Trajectory bounds on the plain line from n chips stacked at the origin:
// chip (k) never leaves [-floor((n+1-k)/2), floor(k/2)].
inline BoundsCheck check_label_bounds(const LabeledConfig& c, int n) {
  if (!c.has_standard_labels(n)) throw std::invalid_argument("label bounds need labels exactly 1..n");
  BoundsCheck out;
  out.ok = true;
  for (const auto& [k, v] : c.positions()) {
    const Vertex lo = -((static_cast<Vertex>(n) + 1 - k) / 2);
    const Vertex hi = k / 2;
    if (v < lo || v > hi) {
      out.ok = false;
      out.first_violating_label = k;
      return out;
    }
  }
  return out;
}

// Applies a move list without requiring it to reach stability.
inline LabeledConfig apply_script(const PathGraph& g, const LabeledConfig& start,
                                  const std::vector<FiringMove>& moves) {
  detail::LabeledEngine eng(g, start);
  for (const auto& mv : moves) eng.apply(mv);
  return eng.current();
}

// Same, invoking observe(step_index, move, state_after) after every move.
template <typename Observer>
LabeledConfig walk_script(const PathGraph& g, const LabeledConfig& start,
                          const std::vector<FiringMove>& moves, Observer&& observe) {
  detail::LabeledEngine eng(g, start);
  std::size_t at = 0;
  for (const auto& mv : moves) {
    eng.apply(mv);
    observe(at++, mv, eng.current());
  }
  return eng.current();
}

// Image of a move under reflection through the origin with labels 1..n
// reversed; conjugating a whole script by this turns a run from the stack
// at the origin into another legal run whose states are the duals.
inline FiringMove dual_move(const FiringMove& mv, int n) {
  FiringMove out;
  out.vertex = -mv.vertex;
  out.chips.reserve(mv.chips.size());
  for (auto it = mv.chips.rbegin(); it != mv.chips.rend(); ++it) out.chips.push_back(n + 1 - *it);
  return out;
}

inline std::vector<FiringMove> dual_script(const std::vector<FiringMove>& script, int n) {
  std::vector<FiringMove> out;
  out.reserve(script.size());
  for (const auto& mv : script) out.push_back(dual_move(mv, n));
  return out;
}

// Random interleaving of legal firings and single chips stepping right,
// on the plain line. Stabilization is monotone along such walks, which is
// what the order-theory checks exercise.
inline UnlabeledConfig random_rightward_walk(const UnlabeledConfig& start, std::int64_t steps,
                                             std::uint64_t seed) {
  const PathGraph g = PathGraph::line();
  detail::UnlabeledEngine eng(g, start);
  Rng rng(seed);
  for (std::int64_t s = 0; s < steps; ++s) {
    const UnlabeledConfig cur = eng.current();
    if (cur.empty()) break;
    const auto& counts = cur.counts();
    const std::uint64_t fire_options = eng.unstable().size();
    const std::uint64_t move_options = counts.size();
    std::uint64_t pick = rng.below(fire_options + move_options);
    if (pick < fire_options) {
      auto it = eng.unstable().begin();
      std::advance(it, static_cast<std::ptrdiff_t>(pick));
      eng.fire(*it);
    } else {
      auto it = counts.begin();
      std::advance(it, static_cast<std::ptrdiff_t>(pick - fire_options));
      eng.move_chip_right(it->first);
    }
  }
  return eng.current();
}

}  // namespace chipfire
