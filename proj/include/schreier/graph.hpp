#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "schreier/errors.hpp"

namespace schreier {

using vertex_t = std::uint32_t;
using color_t = std::uint32_t;
using gen_t = std::uint32_t;

/// Marker for an absent edge in a partial generator map.
inline constexpr vertex_t no_vertex = std::numeric_limits<vertex_t>::max();

/// A symmetric generating system: `count` symbols with an involutive
/// inverse pairing. Self-paired symbols are involutive generators.
class GeneratorSet {
 public:
  explicit GeneratorSet(std::vector<gen_t> inverse) : inverse_(std::move(inverse)) {
    if (inverse_.empty()) throw std::invalid_argument("generator set must be nonempty");
    for (gen_t i = 0; i < inverse_.size(); ++i) {
      const gen_t j = inverse_[i];
      if (j >= inverse_.size() || inverse_[j] != i)
        throw std::invalid_argument("inverse pairing is not an involution at generator " +
                                    std::to_string(i));
    }
  }

  /// Generators (0,1), (2,3), ... each paired with its neighbour.
  static GeneratorSet paired(std::size_t pairs) {
    std::vector<gen_t> inv(2 * pairs);
    for (gen_t i = 0; i < inv.size(); ++i) inv[i] = i ^ 1u;
    return GeneratorSet(std::move(inv));
  }

  std::size_t count() const noexcept { return inverse_.size(); }
  gen_t inverse(gen_t i) const { return inverse_.at(i); }
  bool is_involutive(gen_t i) const { return inverse_.at(i) == i; }
  const std::vector<gen_t>& inverses() const noexcept { return inverse_; }

  friend bool operator==(const GeneratorSet&, const GeneratorSet&) = default;

 private:
  std::vector<gen_t> inverse_;
};

/// A finite Schreier graph: one partial map vertex -> vertex per generator.
/// Truncated balls of infinite graphs carry absent entries.
class SchreierGraph {
 public:
  SchreierGraph(GeneratorSet gens, std::size_t n, bool complete = false)
      : gens_(std::move(gens)),
        n_(n),
        maps_(gens_.count(), std::vector<vertex_t>(n, no_vertex)),
        complete_(complete) {}

  /// Takes raw maps; only shape is checked here, use validate() for the rest.
  SchreierGraph(GeneratorSet gens, std::vector<std::vector<vertex_t>> maps, bool complete)
      : gens_(std::move(gens)), n_(0), maps_(std::move(maps)), complete_(complete) {
    if (maps_.size() != gens_.count())
      throw std::invalid_argument("expected one map per generator");
    n_ = maps_.front().size();
    for (const auto& m : maps_)
      if (m.size() != n_) throw std::invalid_argument("generator maps differ in length");
  }

  const GeneratorSet& generators() const noexcept { return gens_; }
  std::size_t size() const noexcept { return n_; }
  std::size_t generator_count() const noexcept { return gens_.count(); }
  bool complete() const noexcept { return complete_; }
  void set_complete(bool c) noexcept { complete_ = c; }

  vertex_t target(gen_t i, vertex_t u) const { return maps_[i][u]; }
  std::optional<vertex_t> step(gen_t i, vertex_t u) const {
    const vertex_t v = maps_[i][u];
    if (v == no_vertex) return std::nullopt;
    return v;
  }
  const std::vector<std::vector<vertex_t>>& maps() const noexcept { return maps_; }

  /// Sets i(u) = v together with inv(i)(v) = u.
  void connect(gen_t i, vertex_t u, vertex_t v) {
    maps_.at(i).at(u) = v;
    maps_.at(gens_.inverse(i)).at(v) = u;
  }

  bool all_maps_total() const {
    for (const auto& m : maps_)
      if (std::find(m.begin(), m.end(), no_vertex) != m.end()) return false;
    return true;
  }

  /// Neighbours in the underlying undirected simple graph, ascending.
  std::vector<vertex_t> neighbors(vertex_t u) const {
    std::vector<vertex_t> out;
    for (const auto& m : maps_)
      if (m[u] != no_vertex && m[u] != u) out.push_back(m[u]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  friend bool operator==(const SchreierGraph&, const SchreierGraph&) = default;

 private:
  GeneratorSet gens_;
  std::size_t n_;
  std::vector<std::vector<vertex_t>> maps_;
  bool complete_;
};

/// Vertex colouring over the alphabet {0, ..., alphabet_size-1}.
struct Coloring {
  std::size_t alphabet_size = 1;
  std::vector<color_t> colors;

  static Coloring monochrome(std::size_t n) { return Coloring{1, std::vector<color_t>(n, 0)}; }

  friend bool operator==(const Coloring&, const Coloring&) = default;
};

/// A rooted, optionally coloured Schreier graph. No colouring means monochrome.
struct Rooted {
  SchreierGraph graph;
  vertex_t root = 0;
  std::optional<Coloring> coloring;

  std::size_t alphabet_size() const { return coloring ? coloring->alphabet_size : 1; }
  /// Empty span for uncoloured graphs.
  std::span<const color_t> colors() const {
    return coloring ? std::span<const color_t>(coloring->colors) : std::span<const color_t>();
  }

  friend bool operator==(const Rooted&, const Rooted&) = default;
};

/// Canonical byte encoding of a rooted coloured labelled r-ball.
struct BallPattern {
  std::size_t radius = 0;
  std::string encoding;

  friend auto operator<=>(const BallPattern&, const BallPattern&) = default;
};

inline std::vector<std::string> validate(const SchreierGraph& g) {
  std::vector<std::string> out;
  const auto& gens = g.generators();
  for (gen_t i = 0; i < g.generator_count(); ++i) {
    for (vertex_t u = 0; u < g.size(); ++u) {
      const vertex_t v = g.target(i, u);
      if (v == no_vertex) {
        if (g.complete())
          out.push_back("incompleteness at (" + std::to_string(i) + "," + std::to_string(u) + ")");
        continue;
      }
      if (v >= g.size()) {
        out.push_back("target out of range at (" + std::to_string(i) + "," + std::to_string(u) + ")");
        continue;
      }
      if (g.target(gens.inverse(i), v) != u)
        out.push_back("inverse inconsistency at (" + std::to_string(i) + "," + std::to_string(u) + ")");
    }
  }
  return out;
}

inline std::vector<std::string> validate(const Rooted& x) {
  auto out = validate(x.graph);
  if (x.graph.size() > 0 && x.root >= x.graph.size()) out.push_back("root out of range");
  if (x.coloring) {
    const auto& c = *x.coloring;
    if (c.alphabet_size == 0) out.push_back("alphabet_size must be positive");
    if (c.colors.size() != x.graph.size())
      out.push_back("colors length " + std::to_string(c.colors.size()) + " differs from n = " +
                    std::to_string(x.graph.size()));
    for (std::size_t v = 0; v < c.colors.size(); ++v)
      if (c.colors[v] >= c.alphabet_size)
        out.push_back("color out of alphabet at vertex " + std::to_string(v));
  }
  return out;
}

namespace detail {

/// Vertices within undirected distance r of root, in canonical BFS order
/// (queue order, generators scanned by index). Also returns each vertex's
/// position in that order, no_vertex outside the ball.
struct BallOrder {
  std::vector<vertex_t> order;
  std::vector<std::size_t> depth;
  std::vector<vertex_t> index;
};

inline BallOrder ball_order(const SchreierGraph& g, vertex_t root, std::size_t r) {
  BallOrder b;
  b.index.assign(g.size(), no_vertex);
  b.order.push_back(root);
  b.depth.push_back(0);
  b.index[root] = 0;
  for (std::size_t head = 0; head < b.order.size(); ++head) {
    const vertex_t u = b.order[head];
    const std::size_t du = b.depth[head];
    if (du == r) continue;
    for (gen_t i = 0; i < g.generator_count(); ++i) {
      const vertex_t v = g.target(i, u);
      if (v == no_vertex || b.index[v] != no_vertex) continue;
      b.index[v] = static_cast<vertex_t>(b.order.size());
      b.order.push_back(v);
      b.depth.push_back(du + 1);
    }
  }
  return b;
}

inline void put_u32(std::string& s, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) s.push_back(static_cast<char>((v >> (8 * k)) & 0xFFu));
}

inline void require_comparable(const Rooted& x, const Rooted& y) {
  if (!(x.graph.generators() == y.graph.generators()))
    throw incomparable_error("generator sets differ");
  if (x.alphabet_size() != y.alphabet_size()) throw incomparable_error("alphabet sizes differ");
}

}  // namespace detail

/// Canonical pattern of the r-ball around `root`. Since every generator is a
/// deterministic partial map, BFS in generator order numbers the ball
/// canonically. `colors` empty means monochrome.
inline BallPattern canonical_pattern(const SchreierGraph& g, vertex_t root,
                                     std::span<const color_t> colors, std::size_t r) {
  const auto b = detail::ball_order(g, root, r);
  BallPattern p;
  p.radius = r;
  p.encoding.reserve(12 + b.order.size() * 4 * (1 + g.generator_count()));
  detail::put_u32(p.encoding, static_cast<std::uint32_t>(std::min<std::size_t>(r, UINT32_MAX)));
  detail::put_u32(p.encoding, static_cast<std::uint32_t>(g.generator_count()));
  detail::put_u32(p.encoding, static_cast<std::uint32_t>(b.order.size()));
  for (const vertex_t u : b.order) {
    detail::put_u32(p.encoding, colors.empty() ? 0u : colors[u]);
    for (gen_t i = 0; i < g.generator_count(); ++i) {
      const vertex_t v = g.target(i, u);
      detail::put_u32(p.encoding, v == no_vertex ? no_vertex : b.index[v]);
    }
  }
  return p;
}

inline BallPattern canonical_pattern(const Rooted& x, std::size_t r) {
  return canonical_pattern(x.graph, x.root, x.colors(), r);
}

/// The r-ball around `root` as a standalone rooted graph, renumbered in
/// canonical BFS order (root becomes 0). Edges leaving the ball become absent.
inline Rooted ball(const SchreierGraph& g, vertex_t root, const std::optional<Coloring>& coloring,
                   std::size_t r) {
  const auto b = detail::ball_order(g, root, r);
  SchreierGraph out(g.generators(), b.order.size());
  for (std::size_t k = 0; k < b.order.size(); ++k)
    for (gen_t i = 0; i < g.generator_count(); ++i) {
      const vertex_t v = g.target(i, b.order[k]);
      if (v != no_vertex && b.index[v] != no_vertex)
        out.connect(i, static_cast<vertex_t>(k), b.index[v]);
    }
  out.set_complete(out.all_maps_total());
  std::optional<Coloring> c;
  if (coloring) {
    c = Coloring{coloring->alphabet_size, {}};
    for (const vertex_t u : b.order) c->colors.push_back(coloring->colors[u]);
  }
  return Rooted{std::move(out), 0, std::move(c)};
}

inline Rooted ball(const Rooted& x, std::size_t r) { return ball(x.graph, x.root, x.coloring, r); }

inline bool rooted_isomorphic(const Rooted& x, const Rooted& y, std::size_t r) {
  detail::require_comparable(x, y);
  return canonical_pattern(x, r) == canonical_pattern(y, r);
}

/// Ball-agreement ultrametric capped at resolution r_max: 2 if the roots'
/// colours differ, 2^-r for the largest agreeing radius r < r_max, and 0 if
/// the r_max-balls already agree.
inline double distance(const Rooted& x, const Rooted& y, std::size_t r_max) {
  detail::require_comparable(x, y);
  if (canonical_pattern(x, 0) != canonical_pattern(y, 0)) return 2.0;
  for (std::size_t r = 1; r <= r_max; ++r)
    if (canonical_pattern(x, r) != canonical_pattern(y, r))
      return std::ldexp(1.0, -static_cast<int>(r - 1));
  return 0.0;
}

inline Rooted forget_colors(const Rooted& x) { return Rooted{x.graph, x.root, std::nullopt}; }

/// Undirected BFS distances from `source`; no_vertex marks unreachable.
inline std::vector<vertex_t> distances_from(const SchreierGraph& g, vertex_t source) {
  std::vector<vertex_t> dist(g.size(), no_vertex);
  std::vector<vertex_t> queue{source};
  dist[source] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const vertex_t u = queue[head];
    for (gen_t i = 0; i < g.generator_count(); ++i) {
      const vertex_t v = g.target(i, u);
      if (v != no_vertex && dist[v] == no_vertex) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

inline bool is_connected(const SchreierGraph& g) {
  if (g.size() == 0) return true;
  const auto d = distances_from(g, 0);
  return std::find(d.begin(), d.end(), no_vertex) == d.end();
}

}  // namespace schreier
