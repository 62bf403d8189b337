#pragma once

#include <algorithm>
#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "schreier/coloring.hpp"
#include "schreier/errors.hpp"
#include "schreier/graph.hpp"

namespace schreier {

/// A word in the generators, read left to right: the first letter is
/// applied first when moving a root.
struct Word {
  std::vector<gen_t> letters;

  std::size_t size() const noexcept { return letters.size(); }
  bool empty() const noexcept { return letters.empty(); }

  friend Word operator*(const Word& a, const Word& b) {
    Word w = a;
    w.letters.insert(w.letters.end(), b.letters.begin(), b.letters.end());
    return w;
  }
  friend auto operator<=>(const Word&, const Word&) = default;
};

/// Free reduction: cancels adjacent letters that are mutually inverse.
inline Word reduce(const Word& w, const GeneratorSet& gens) {
  Word out;
  for (const gen_t a : w.letters) {
    if (!out.letters.empty() && gens.inverse(out.letters.back()) == a)
      out.letters.pop_back();
    else
      out.letters.push_back(a);
  }
  return out;
}

inline bool is_reduced(const Word& w, const GeneratorSet& gens) {
  for (std::size_t k = 1; k < w.size(); ++k)
    if (gens.inverse(w.letters[k - 1]) == w.letters[k]) return false;
  return true;
}

inline void check_word(const Word& w, const GeneratorSet& gens) {
  for (const gen_t a : w.letters)
    if (a >= gens.count()) throw std::invalid_argument("letter " + std::to_string(a) + " out of range");
}

/// Endpoint of the walk from v along w; none if a partial map is absent.
inline std::optional<vertex_t> walk(const SchreierGraph& g, vertex_t v, const Word& w) {
  for (const gen_t a : w.letters) {
    const vertex_t next = g.target(a, v);
    if (next == no_vertex) return std::nullopt;
    v = next;
  }
  return v;
}

/// Root change along w. None is the boundary-truncation outcome.
inline std::optional<Rooted> apply_word(const Rooted& x, const Word& w) {
  check_word(w, x.graph.generators());
  const auto v = walk(x.graph, x.root, w);
  if (!v) return std::nullopt;
  Rooted out = x;
  out.root = *v;
  return out;
}

enum class RootOutcome { fixed, moved, left_graph };

inline RootOutcome fixes_root(const Rooted& x, const Word& w) {
  check_word(w, x.graph.generators());
  const auto v = walk(x.graph, x.root, w);
  if (!v) return RootOutcome::left_graph;
  return *v == x.root ? RootOutcome::fixed : RootOutcome::moved;
}

/// Every word of length <= max_len (unreduced words included) that returns
/// the root to itself, in length-then-lex order. Throws boundary_error if
/// some word of that length leaves a truncated graph.
inline std::vector<Word> stabilizer_words(const Rooted& x, std::size_t max_len) {
  const auto& g = x.graph;
  std::vector<std::pair<Word, vertex_t>> layer{{Word{}, x.root}};
  std::vector<Word> out{Word{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::pair<Word, vertex_t>> next;
    next.reserve(layer.size() * g.generator_count());
    for (const auto& [w, v] : layer)
      for (gen_t a = 0; a < g.generator_count(); ++a) {
        const vertex_t u = g.target(a, v);
        Word wa = w;
        wa.letters.push_back(a);
        if (u == no_vertex)
          throw boundary_error("word of length " + std::to_string(len) + " leaves the graph");
        if (u == x.root) out.push_back(wa);
        next.emplace_back(std::move(wa), u);
      }
    layer = std::move(next);
  }
  return out;
}

/// A vertex permutation commuting with every generator map.
struct Automorphism {
  std::vector<vertex_t> image;

  bool is_identity() const {
    for (vertex_t v = 0; v < image.size(); ++v)
      if (image[v] != v) return false;
    return true;
  }
  friend bool operator==(const Automorphism&, const Automorphism&) = default;
};

namespace detail {

inline void require_connected_complete(const SchreierGraph& g) {
  if (!g.all_maps_total()) throw validation_error({"graph is incomplete"});
  if (!is_connected(g)) throw validation_error({"graph is disconnected"});
}

/// Extends 0 -> v along the generator maps; none if inconsistent, not
/// injective, or not colour-preserving.
inline std::optional<Automorphism> propagate(const SchreierGraph& g, std::span<const color_t> colors,
                                             vertex_t v) {
  const auto color = [&](vertex_t u) { return colors.empty() ? color_t{0} : colors[u]; };
  std::vector<vertex_t> image(g.size(), no_vertex);
  std::vector<vertex_t> queue{0};
  image[0] = v;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const vertex_t u = queue[head];
    for (gen_t i = 0; i < g.generator_count(); ++i) {
      const vertex_t w = g.target(i, u);
      const vertex_t iw = g.target(i, image[u]);
      if (image[w] == no_vertex) {
        image[w] = iw;
        queue.push_back(w);
      } else if (image[w] != iw) {
        return std::nullopt;
      }
    }
  }
  std::vector<bool> hit(g.size(), false);
  for (vertex_t u = 0; u < g.size(); ++u) {
    if (hit[image[u]] || color(u) != color(image[u])) return std::nullopt;
    hit[image[u]] = true;
  }
  return Automorphism{std::move(image)};
}

}  // namespace detail

/// All colour-preserving labelled automorphisms of a connected complete
/// graph. Determinism means the image of vertex 0 fixes the whole map, so
/// there is at most one candidate per vertex. Identity comes first.
inline std::vector<Automorphism> colored_automorphisms(const SchreierGraph& g,
                                                       std::span<const color_t> colors = {}) {
  detail::require_connected_complete(g);
  std::vector<Automorphism> out;
  if (g.size() == 0) return out;
  for (vertex_t v = 0; v < g.size(); ++v)
    if (auto a = detail::propagate(g, colors, v)) out.push_back(std::move(*a));
  return out;
}

inline std::vector<Automorphism> colored_automorphisms(const Rooted& x) {
  return colored_automorphisms(x.graph, x.colors());
}

inline bool is_z_proper(const Rooted& x) { return colored_automorphisms(x).size() == 1; }

/// True iff `theta` is a colour-preserving labelled automorphism of g.
inline bool is_automorphism(const SchreierGraph& g, std::span<const color_t> colors,
                            const Automorphism& theta) {
  if (theta.image.size() != g.size()) return false;
  std::vector<bool> hit(g.size(), false);
  for (vertex_t u = 0; u < g.size(); ++u) {
    const vertex_t t = theta.image[u];
    if (t >= g.size() || hit[t]) return false;
    hit[t] = true;
    if (!colors.empty() && colors[u] != colors[t]) return false;
  }
  for (gen_t i = 0; i < g.generator_count(); ++i)
    for (vertex_t u = 0; u < g.size(); ++u) {
      const vertex_t v = g.target(i, u);
      const vertex_t tv = g.target(i, theta.image[u]);
      if ((v == no_vertex) != (tv == no_vertex)) return false;
      if (v != no_vertex && theta.image[v] != tv) return false;
    }
  return true;
}

/// Smallest distance from a vertex to its image, with the lowest such vertex.
struct Displacement {
  vertex_t vertex = 0;
  std::size_t distance = 0;
};

inline Displacement minimal_displacement(const SchreierGraph& g, const Automorphism& theta) {
  Displacement best{0, no_vertex};
  for (vertex_t a = 0; a < g.size(); ++a) {
    const vertex_t d = distances_from(g, a)[theta.image[a]];
    if (d < best.distance) best = {a, d};
  }
  return best;
}

/// Turns a nontrivial colour-preserving automorphism into a repetitive path.
///
/// Take a vertex a of minimal displacement n, a geodesic a = a_1, ..., a_{n+1}
/// = theta(a) with letters k_1..k_n, and continue a_{n+1+i} = k_i(a_{n+i})
/// for i < n. Then a_{n+i} = theta(a_i), so the two halves carry the same
/// colours, and minimality of n forces the 2n vertices to be distinct.
inline PathWitness extract_repetition(const SchreierGraph& g, std::span<const color_t> colors,
                                      const Automorphism& theta) {
  if (!is_automorphism(g, colors, theta))
    throw std::invalid_argument("theta is not a colour-preserving labelled automorphism");
  if (theta.is_identity()) throw std::invalid_argument("theta is the identity");
  const auto [a, n] = minimal_displacement(g, theta);
  if (n == no_vertex) throw validation_error({"theta moves a vertex to another component"});

  // BFS tree from a, generators scanned by index.
  std::vector<vertex_t> parent(g.size(), no_vertex);
  std::vector<gen_t> letter(g.size(), 0);
  std::vector<vertex_t> queue{a};
  parent[a] = a;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const vertex_t u = queue[head];
    for (gen_t i = 0; i < g.generator_count(); ++i) {
      const vertex_t v = g.target(i, u);
      if (v != no_vertex && parent[v] == no_vertex) {
        parent[v] = u;
        letter[v] = i;
        queue.push_back(v);
      }
    }
  }
  std::vector<vertex_t> geodesic;
  std::vector<gen_t> letters;
  for (vertex_t v = theta.image[a]; v != a; v = parent[v]) {
    geodesic.push_back(v);
    letters.push_back(letter[v]);
  }
  geodesic.push_back(a);
  std::reverse(geodesic.begin(), geodesic.end());
  std::reverse(letters.begin(), letters.end());

  PathWitness p{geodesic};
  for (std::size_t i = 0; i + 1 < n; ++i) p.vertices.push_back(g.target(letters[i], p.vertices.back()));

  const bool repetitive = colors.empty() || is_repetitive_path(colors, p);
  if (!is_valid_path(g, p) || !repetitive)
    throw std::logic_error("extracted walk is not a repetitive path");
  return p;
}

inline PathWitness extract_repetition(const Rooted& x, const Automorphism& theta) {
  return extract_repetition(x.graph, x.colors(), theta);
}

}  // namespace schreier
