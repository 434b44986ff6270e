#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "chipfire/rng.hpp"
#include "chipfire/util.hpp"

namespace chipfire {

// Vector reformulation of labeled firing: the state is the position vector
// v = (C(1), ..., C(n)) and a move adds a positive root alpha whenever
// (v, alpha) = 0. Type A roots e_j - e_i are the pair firings; type B adds
// e_a + e_b (chips at mirror positions both step right) and e_a (a chip at
// the origin steps right).
enum class RootType { A, B };

enum class RootKind { diff, sum, single };

struct Root {
  RootKind kind = RootKind::diff;
  int i = 0;  // 1-based coordinate indices, i < j for diff/sum
  int j = 0;  // unused for single roots

  std::vector<std::int64_t> to_vector(int n) const {
    std::vector<std::int64_t> out(static_cast<std::size_t>(n), 0);
    switch (kind) {
      case RootKind::diff:
        out[static_cast<std::size_t>(i - 1)] = -1;
        out[static_cast<std::size_t>(j - 1)] = 1;
        break;
      case RootKind::sum:
        out[static_cast<std::size_t>(i - 1)] = 1;
        out[static_cast<std::size_t>(j - 1)] = 1;
        break;
      case RootKind::single:
        out[static_cast<std::size_t>(i - 1)] = 1;
        break;
    }
    return out;
  }

  bool operator==(const Root&) const = default;
};

struct RootSet {
  RootType type = RootType::A;
  int n = 1;
  std::vector<Root> roots;
};

using VectorState = std::vector<std::int64_t>;

// Canonical order: differences e_j - e_i by (i, j), then pair sums
// e_a + e_b by (a, b), then singles e_a by a.
inline RootSet positive_roots(RootType type, int n) {
  if (n < 1) throw std::invalid_argument("root system needs n >= 1");
  RootSet rs;
  rs.type = type;
  rs.n = n;
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) rs.roots.push_back({RootKind::diff, i, j});
  }
  if (type == RootType::B) {
    for (int i = 1; i <= n; ++i) {
      for (int j = i + 1; j <= n; ++j) rs.roots.push_back({RootKind::sum, i, j});
    }
    for (int i = 1; i <= n; ++i) rs.roots.push_back({RootKind::single, i, 0});
  }
  return rs;
}

inline std::int64_t inner(const VectorState& v, const Root& alpha) {
  switch (alpha.kind) {
    case RootKind::diff:
      return checked_sub(v[static_cast<std::size_t>(alpha.j - 1)], v[static_cast<std::size_t>(alpha.i - 1)]);
    case RootKind::sum:
      return checked_add(v[static_cast<std::size_t>(alpha.i - 1)], v[static_cast<std::size_t>(alpha.j - 1)]);
    case RootKind::single:
      return v[static_cast<std::size_t>(alpha.i - 1)];
  }
  throw std::logic_error("unknown root kind");
}

inline VectorState vector_fire(const VectorState& v, const Root& alpha) {
  if (inner(v, alpha) != 0) throw std::invalid_argument("firing condition violated: (v, alpha) != 0");
  VectorState out = v;
  switch (alpha.kind) {
    case RootKind::diff:
      out[static_cast<std::size_t>(alpha.i - 1)] -= 1;
      out[static_cast<std::size_t>(alpha.j - 1)] += 1;
      break;
    case RootKind::sum:
      out[static_cast<std::size_t>(alpha.i - 1)] += 1;
      out[static_cast<std::size_t>(alpha.j - 1)] += 1;
      break;
    case RootKind::single:
      out[static_cast<std::size_t>(alpha.i - 1)] += 1;
      break;
  }
  return out;
}

inline std::vector<Root> applicable_roots(const RootSet& rs, const VectorState& v) {
  std::vector<Root> out;
  for (const Root& r : rs.roots) {
    if (inner(v, r) == 0) out.push_back(r);
  }
  return out;
}

enum class VectorStrategy { canonical_first, uniform_random };

struct VectorRun {
  VectorState final;
  std::int64_t steps = 0;
};

// Runs root firing from the origin until no root applies. Inner products
// are maintained incrementally: firing alpha shifts (v, beta) by
// (alpha, beta), which touches only the roots sharing a coordinate with
// alpha, so each step costs O(n) instead of O(n^2).
inline VectorRun vector_stabilize(RootType type, int n, VectorStrategy strat, std::uint64_t seed,
                                  std::optional<std::int64_t> step_budget = {}) {
  const RootSet rs = positive_roots(type, n);
  const std::size_t rcount = rs.roots.size();
  VectorState v(static_cast<std::size_t>(n), 0);

  // Displacement entries per coordinate: (root index, coefficient).
  std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> by_coord(static_cast<std::size_t>(n));
  auto add_term = [&](std::size_t ridx, int coord, std::int64_t coeff) {
    by_coord[static_cast<std::size_t>(coord - 1)].push_back({ridx, coeff});
  };
  for (std::size_t ridx = 0; ridx < rcount; ++ridx) {
    const Root& r = rs.roots[ridx];
    switch (r.kind) {
      case RootKind::diff:
        add_term(ridx, r.i, -1);
        add_term(ridx, r.j, 1);
        break;
      case RootKind::sum:
        add_term(ridx, r.i, 1);
        add_term(ridx, r.j, 1);
        break;
      case RootKind::single:
        add_term(ridx, r.i, 1);
        break;
    }
  }

  std::vector<std::int64_t> ip(rcount, 0);  // (v, root); all zero at the origin
  std::vector<std::size_t> applicable(rcount);
  std::vector<std::ptrdiff_t> slot(rcount);
  for (std::size_t r = 0; r < rcount; ++r) {
    applicable[r] = r;
    slot[r] = static_cast<std::ptrdiff_t>(r);
  }
  auto drop = [&](std::size_t ridx) {
    const std::ptrdiff_t s = slot[ridx];
    if (s < 0) return;
    const std::size_t last = applicable.back();
    applicable[static_cast<std::size_t>(s)] = last;
    slot[last] = s;
    applicable.pop_back();
    slot[ridx] = -1;
  };
  auto put = [&](std::size_t ridx) {
    if (slot[ridx] >= 0) return;
    slot[ridx] = static_cast<std::ptrdiff_t>(applicable.size());
    applicable.push_back(ridx);
  };

  Rng rng(seed);
  const std::int64_t budget = step_budget.value_or(default_step_budget(n));
  std::int64_t steps = 0;
  while (!applicable.empty()) {
    std::size_t chosen;
    if (strat == VectorStrategy::canonical_first) {
      chosen = applicable[0];
      for (std::size_t idx : applicable) chosen = std::min(chosen, idx);
    } else {
      chosen = applicable[rng.below(applicable.size())];
    }
    const Root& alpha = rs.roots[chosen];
    // Apply the displacement and refresh the affected inner products.
    auto bump = [&](int coord, std::int64_t d) {
      v[static_cast<std::size_t>(coord - 1)] += d;
      for (const auto& [ridx, coeff] : by_coord[static_cast<std::size_t>(coord - 1)]) {
        ip[ridx] += coeff * d;
        if (ip[ridx] == 0) {
          put(ridx);
        } else {
          drop(ridx);
        }
      }
    };
    switch (alpha.kind) {
      case RootKind::diff:
        bump(alpha.i, -1);
        bump(alpha.j, 1);
        break;
      case RootKind::sum:
        bump(alpha.i, 1);
        bump(alpha.j, 1);
        break;
      case RootKind::single:
        bump(alpha.i, 1);
        break;
    }
    ++steps;
    if (steps > budget) throw StepBudgetExceeded("root firing budget exhausted");
  }
  return {std::move(v), steps};
}

}  // namespace chipfire
