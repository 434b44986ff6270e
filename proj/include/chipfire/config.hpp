#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chipfire/util.hpp"

namespace chipfire {

using Vertex = std::int64_t;

// Unlabeled chip configuration on the integer line: finitely many chips,
// stored sparsely as vertex -> count with counts >= 1. Value semantics;
// the firing engine keeps its own dense working copies.
class UnlabeledConfig {
 public:
  UnlabeledConfig() = default;

  static UnlabeledConfig from_counts(std::map<Vertex, std::int64_t> counts) {
    UnlabeledConfig c;
    for (const auto& [v, k] : counts) {
      if (k < 0) throw std::invalid_argument("chip count must be nonnegative");
      if (k == 0) continue;
      c.counts_.emplace(v, k);
      c.total_ = checked_add(c.total_, k);
    }
    return c;
  }

  std::int64_t count(Vertex v) const {
    auto it = counts_.find(v);
    return it == counts_.end() ? 0 : it->second;
  }

  std::int64_t total() const { return total_; }
  bool empty() const { return counts_.empty(); }
  const std::map<Vertex, std::int64_t>& counts() const { return counts_; }

  std::optional<Vertex> min_vertex() const {
    if (counts_.empty()) return std::nullopt;
    return counts_.begin()->first;
  }
  std::optional<Vertex> max_vertex() const {
    if (counts_.empty()) return std::nullopt;
    return counts_.rbegin()->first;
  }

  // c + k chips at v (k may be negative when removing; never below zero).
  UnlabeledConfig plus(Vertex v, std::int64_t k = 1) const {
    UnlabeledConfig c = *this;
    c.add_in_place(v, k);
    return c;
  }

  UnlabeledConfig plus(const UnlabeledConfig& other) const {
    UnlabeledConfig c = *this;
    for (const auto& [v, k] : other.counts_) c.add_in_place(v, k);
    return c;
  }

  bool operator==(const UnlabeledConfig& o) const { return counts_ == o.counts_; }
  bool operator!=(const UnlabeledConfig& o) const { return !(*this == o); }

 private:
  void add_in_place(Vertex v, std::int64_t k) {
    if (k == 0) return;
    auto [it, inserted] = counts_.try_emplace(v, 0);
    it->second = checked_add(it->second, k);
    if (it->second < 0) throw std::invalid_argument("chip count driven below zero");
    if (it->second == 0) counts_.erase(it);
    total_ = checked_add(total_, k);
  }

  std::map<Vertex, std::int64_t> counts_;
  std::int64_t total_ = 0;
};

inline UnlabeledConfig delta(Vertex v) { return UnlabeledConfig::from_counts({{v, 1}}); }

// One chip on each vertex of [a, b]; empty when a > b.
inline UnlabeledConfig delta_interval(Vertex a, Vertex b) {
  std::map<Vertex, std::int64_t> m;
  for (Vertex v = a; v <= b; ++v) m.emplace(v, 1);
  return UnlabeledConfig::from_counts(std::move(m));
}

inline UnlabeledConfig n_delta0(std::int64_t n) {
  if (n < 0) throw std::invalid_argument("negative chip count");
  if (n == 0) return {};
  return UnlabeledConfig::from_counts({{0, n}});
}

// Labeled configuration: distinct positive labels, each at one vertex.
// Stacking is unconstrained; ordering of colocated chips is immaterial to
// the state (moves choose labels explicitly).
class LabeledConfig {
 public:
  LabeledConfig() = default;

  static LabeledConfig from_positions(std::map<int, Vertex> positions) {
    for (const auto& [label, v] : positions) {
      (void)v;
      if (label <= 0) throw std::invalid_argument("labels must be positive");
    }
    LabeledConfig c;
    c.positions_ = std::move(positions);
    return c;
  }

  // Chips (1), ..., (n) all at the origin.
  static LabeledConfig stacked_at_origin(int n) {
    if (n < 0) throw std::invalid_argument("negative chip count");
    std::map<int, Vertex> m;
    for (int i = 1; i <= n; ++i) m.emplace(i, 0);
    return from_positions(std::move(m));
  }

  int size() const { return static_cast<int>(positions_.size()); }
  bool empty() const { return positions_.empty(); }

  bool has_label(int label) const { return positions_.count(label) != 0; }

  Vertex position(int label) const {
    auto it = positions_.find(label);
    if (it == positions_.end()) throw std::invalid_argument("no chip with label " + std::to_string(label));
    return it->second;
  }

  const std::map<int, Vertex>& positions() const { return positions_; }

  LabeledConfig with_position(int label, Vertex v) const {
    LabeledConfig c = *this;
    c.positions_[label] = v;
    return c;
  }

  // True when the label set is exactly {1, ..., n}.
  bool has_standard_labels(int n) const {
    if (size() != n) return false;
    int expect = 1;
    for (const auto& [label, v] : positions_) {
      (void)v;
      if (label != expect++) return false;
    }
    return true;
  }

  UnlabeledConfig underlying() const {
    std::map<Vertex, std::int64_t> m;
    for (const auto& [label, v] : positions_) {
      (void)label;
      ++m[v];
    }
    return UnlabeledConfig::from_counts(std::move(m));
  }

  bool operator==(const LabeledConfig& o) const { return positions_ == o.positions_; }
  bool operator!=(const LabeledConfig& o) const { return !(*this == o); }

 private:
  std::map<int, Vertex> positions_;
};

// The four line statistics that control stabilization. phi_ell is the
// left-weighted count sum_{i <= ell} (i - ell - 1) c(i): it changes by
// exactly -1 when vertex ell + 1 fires and is untouched by firings
// elsewhere. phi_inf and phi2_inf are first and second moments; a firing
// preserves the first and adds 2 to the second, which is what bounds and
// counts total firings. gamma counts internal gaps of width >= 2 (vertices i
// in [min, max] with neither i nor i + 1 occupied); it never increases
// along a firing, which pins the support shape of stabilizations.
struct StatisticsBundle {
  std::int64_t phi_ell = 0;
  std::int64_t phi_inf = 0;
  std::int64_t phi2_inf = 0;
  std::int64_t gamma = 0;
};

inline StatisticsBundle statistics(const UnlabeledConfig& c, std::int64_t ell) {
  StatisticsBundle s;
  for (const auto& [v, k] : c.counts()) {
    if (v <= ell) s.phi_ell = checked_add(s.phi_ell, checked_mul(checked_sub(v, ell + 1), k));
    s.phi_inf = checked_add(s.phi_inf, checked_mul(v, k));
    s.phi2_inf = checked_add(s.phi2_inf, checked_mul(checked_mul(v, v), k));
  }
  // Gap count from consecutive support vertices: the run s < i < t
  // contributes the i with i + 1 < t.
  const auto& m = c.counts();
  for (auto it = m.begin(); it != m.end(); ++it) {
    auto next = std::next(it);
    if (next == m.end()) break;
    std::int64_t gap = checked_sub(next->first, it->first);
    if (gap > 2) s.gamma = checked_add(s.gamma, gap - 2);
  }
  return s;
}

// psi_k: sum of the positions of the chips labeled 1..k. A firing that
// pairs labels i <= k < j moves (i) left and (j) right, dropping psi_k by
// exactly 1; a pair on one side of k leaves it fixed. That makes psi_k the
// bookkeeping device for counting crossings of the label cut at k.
inline std::int64_t psi(const LabeledConfig& c, int k) {
  std::int64_t s = 0;
  for (const auto& [label, v] : c.positions()) {
    if (label <= k) s = checked_add(s, v);
  }
  return s;
}

// Dominance order on equal-size configurations: c <= d iff every prefix sum
// of c is <= the matching prefix sum of d (chips of d sit weakly to the
// right). Covers are single chips moved right by one.
enum class Order { equal, less, greater, incomparable };

struct CompareResult {
  Order order = Order::incomparable;
  bool is_cover = false;  // d covers c: d = c - delta_v + delta_{v+1}
};

inline CompareResult compare(const UnlabeledConfig& c, const UnlabeledConfig& d) {
  if (c.total() != d.total()) throw std::invalid_argument("compare: configurations have different chip totals");
  bool all_le = true, all_ge = true;
  std::int64_t pc = 0, pd = 0;
  auto ic = c.counts().begin();
  auto id = d.counts().begin();
  while (ic != c.counts().end() || id != d.counts().end()) {
    Vertex v;
    if (id == d.counts().end() || (ic != c.counts().end() && ic->first < id->first)) {
      v = ic->first;
    } else if (ic == c.counts().end() || id->first < ic->first) {
      v = id->first;
    } else {
      v = ic->first;
    }
    if (ic != c.counts().end() && ic->first == v) pc = checked_add(pc, (ic++)->second);
    if (id != d.counts().end() && id->first == v) pd = checked_add(pd, (id++)->second);
    // Chips further right mean smaller prefix sums: c <= d iff every
    // prefix of c holds at least as much mass as the same prefix of d.
    if (pc < pd) all_le = false;
    if (pc > pd) all_ge = false;
  }
  CompareResult r;
  if (all_le && all_ge) {
    r.order = Order::equal;
  } else if (all_le) {
    r.order = Order::less;
  } else if (all_ge) {
    r.order = Order::greater;
  } else {
    r.order = Order::incomparable;
    return r;
  }
  if (r.order != Order::equal) {
    // Cover test: the difference d - c must be -1 at some v and +1 at v+1.
    std::map<Vertex, std::int64_t> diff;
    for (const auto& [v, k] : d.counts()) diff[v] += k;
    for (const auto& [v, k] : c.counts()) {
      diff[v] -= k;
      if (diff[v] == 0) diff.erase(v);
    }
    if (diff.size() == 2) {
      auto lo = diff.begin();
      auto hi = std::next(lo);
      if (hi->first == lo->first + 1) {
        if (r.order == Order::less) {
          r.is_cover = lo->second == -1 && hi->second == 1;  // d covers c
        } else {
          r.is_cover = lo->second == 1 && hi->second == -1;  // c covers d
        }
      }
    }
  }
  return r;
}

// Reflection through the origin combined with label reversal i -> n + 1 - i.
// An involution on configurations with labels {1..n} that intertwines the
// labeled firing rule: left-movers and right-movers trade places.
inline LabeledConfig dual(const LabeledConfig& c, int n) {
  if (!c.has_standard_labels(n)) throw std::invalid_argument("dual: labels must be exactly 1..n");
  std::map<int, Vertex> m;
  for (const auto& [label, v] : c.positions()) m.emplace(n + 1 - label, -v);
  return LabeledConfig::from_positions(std::move(m));
}

// Underlying configuration of the chips with label >= k.
inline UnlabeledConfig restrict_geq(const LabeledConfig& c, int k) {
  std::map<Vertex, std::int64_t> m;
  for (const auto& [label, v] : c.positions()) {
    if (label >= k) ++m[v];
  }
  return UnlabeledConfig::from_counts(std::move(m));
}

}  // namespace chipfire
