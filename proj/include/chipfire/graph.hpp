#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "chipfire/config.hpp"
#include "chipfire/util.hpp"

namespace chipfire {

// Path-like host graphs. Three bases:
//   Z     the two-way infinite line,
//   N     the half-line 0 -- 1 -- 2 -- ... (undirected: vertex 0 has a
//         single incident edge, so one chip there already fires),
//   Ndir  the half-line with edges directed rightward, each vertex carrying
//         a loop so every outdegree is 2 and single chips are stable.
// Decorations: `loops=v:k,...` adds k loops at vertex v, and `r=N` replaces
// every edge bundle (loops included) by N parallel copies.
enum class GraphBase { line, half_line, half_line_directed };

// Outdegree of a vertex split by where the fired chips go. A firing at v
// removes exactly left + mid + right chips: `left` go to v-1, `right` to
// v+1, and `mid` stay put (loop edges return to their endpoint).
struct LocalStructure {
  std::int64_t left = 0;
  std::int64_t mid = 0;
  std::int64_t right = 0;
  std::int64_t outdeg() const { return left + mid + right; }
};

class PathGraph {
 public:
  PathGraph() = default;

  static PathGraph line() { return PathGraph(GraphBase::line); }
  static PathGraph half_line() { return PathGraph(GraphBase::half_line); }
  static PathGraph half_line_directed() { return PathGraph(GraphBase::half_line_directed); }

  PathGraph with_loops(std::map<Vertex, std::int64_t> loops) const {
    PathGraph g = *this;
    for (const auto& [v, k] : loops) {
      if (k < 0) throw std::invalid_argument("loop count must be nonnegative");
      if (!g.contains(v)) throw std::invalid_argument("loop vertex outside graph domain");
      if (k > 0) g.loops_[v] = k;
    }
    return g;
  }

  PathGraph with_multiplicity(std::int64_t r) const {
    if (r < 1) throw std::invalid_argument("edge multiplicity must be >= 1");
    PathGraph g = *this;
    g.multiplicity_ = r;
    return g;
  }

  // Grammar: base [loops=v:k,...] [r=N], e.g. "Z", "Z loops=0:2",
  // "N r=3", "Z loops=-1:1,1:1 r=2". Tokens may be separated by spaces.
  static PathGraph parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string tok;
    if (!(in >> tok)) throw std::invalid_argument("empty graph spec");
    PathGraph g;
    if (tok == "Z") {
      g = line();
    } else if (tok == "N") {
      g = half_line();
    } else if (tok == "Ndir") {
      g = half_line_directed();
    } else {
      throw std::invalid_argument("unknown graph base '" + tok + "' (expected Z, N, or Ndir)");
    }
    std::map<Vertex, std::int64_t> loops;
    std::int64_t r = 1;
    while (in >> tok) {
      if (tok.rfind("loops=", 0) == 0) {
        std::string body = tok.substr(6);
        if (body.empty()) throw std::invalid_argument("loops= needs v:k entries");
        std::istringstream items(body);
        std::string item;
        while (std::getline(items, item, ',')) {
          auto colon = item.find(':');
          if (colon == std::string::npos) throw std::invalid_argument("loop entry '" + item + "' is not v:k");
          Vertex v = parse_int(item.substr(0, colon), "loop vertex");
          std::int64_t k = parse_int(item.substr(colon + 1), "loop count");
          if (k < 0) throw std::invalid_argument("loop count must be nonnegative");
          if (k > 0) loops[v] = checked_add(loops.count(v) ? loops[v] : 0, k);
        }
      } else if (tok.rfind("r=", 0) == 0) {
        r = parse_int(tok.substr(2), "edge multiplicity");
      } else {
        throw std::invalid_argument("unknown graph decoration '" + tok + "'");
      }
    }
    return g.with_loops(std::move(loops)).with_multiplicity(r);
  }

  std::string spec() const {
    std::ostringstream out;
    switch (base_) {
      case GraphBase::line: out << "Z"; break;
      case GraphBase::half_line: out << "N"; break;
      case GraphBase::half_line_directed: out << "Ndir"; break;
    }
    if (!loops_.empty()) {
      out << " loops=";
      bool first = true;
      for (const auto& [v, k] : loops_) {
        if (!first) out << ',';
        first = false;
        out << v << ':' << k;
      }
    }
    if (multiplicity_ != 1) out << " r=" << multiplicity_;
    return out.str();
  }

  GraphBase base() const { return base_; }
  std::int64_t multiplicity() const { return multiplicity_; }
  const std::map<Vertex, std::int64_t>& loops() const { return loops_; }
  bool has_loops() const { return !loops_.empty(); }

  bool contains(Vertex v) const { return base_ == GraphBase::line || v >= 0; }

  std::int64_t loops_at(Vertex v) const {
    auto it = loops_.find(v);
    return it == loops_.end() ? 0 : it->second;
  }

  LocalStructure local_structure(Vertex v) const {
    if (!contains(v)) throw std::domain_error("vertex outside graph domain");
    const std::int64_t r = multiplicity_;
    LocalStructure ls;
    switch (base_) {
      case GraphBase::line:
        ls.left = r;
        ls.right = r;
        ls.mid = checked_mul(r, loops_at(v));
        break;
      case GraphBase::half_line:
        ls.left = v == 0 ? 0 : r;
        ls.right = r;
        ls.mid = checked_mul(r, loops_at(v));
        break;
      case GraphBase::half_line_directed:
        ls.left = 0;
        ls.right = r;
        ls.mid = checked_mul(r, checked_add(1, loops_at(v)));
        break;
    }
    return ls;
  }

  std::int64_t outdeg(Vertex v) const { return local_structure(v).outdeg(); }

  // Plain two-way line: the setting where the sorting theorem, the firing
  // count formulas, and the psi bookkeeping all apply exactly.
  bool is_plain_line() const {
    return base_ == GraphBase::line && loops_.empty() && multiplicity_ == 1;
  }

  bool operator==(const PathGraph& o) const {
    return base_ == o.base_ && loops_ == o.loops_ && multiplicity_ == o.multiplicity_;
  }

 private:
  explicit PathGraph(GraphBase b) : base_(b) {}

  static std::int64_t parse_int(const std::string& s, const char* what) {
    try {
      std::size_t used = 0;
      std::int64_t v = std::stoll(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("bad integer for ") + what + ": '" + s + "'");
    }
  }

  GraphBase base_ = GraphBase::line;
  std::map<Vertex, std::int64_t> loops_;
  std::int64_t multiplicity_ = 1;
};

}  // namespace chipfire
