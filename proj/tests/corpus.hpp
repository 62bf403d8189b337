#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "schreier/schreier.hpp"

namespace corpus {

using namespace schreier;

struct Named {
  std::string name;
  Rooted graph;
};

/// C4 plus one or two diagonals carried by an involutive generator.
inline Rooted cycle4_with_chords(bool both) {
  SchreierGraph g(GeneratorSet({1, 0, 2}), 4, true);
  for (vertex_t i = 0; i < 4; ++i) g.connect(0, i, (i + 1) % 4);
  g.connect(2, 0, 2);
  if (both)
    g.connect(2, 1, 3);
  else {
    g.connect(2, 1, 1);
    g.connect(2, 3, 3);
  }
  return Rooted{std::move(g), 0, std::nullopt};
}

/// Connected graphs on at most 8 vertices.
inline std::vector<Named> small_connected_graphs() {
  std::vector<Named> out;
  for (std::size_t n = 1; n <= 8; ++n) out.push_back({"P" + std::to_string(n), path_graph(n)});
  for (std::size_t n = 3; n <= 8; ++n) out.push_back({"C" + std::to_string(n), cycle_graph(n)});
  out.push_back({"C4+chord", cycle4_with_chords(false)});
  out.push_back({"C4+2chords", cycle4_with_chords(true)});
  for (std::uint64_t seed = 1; out.size() < 60 && seed < 500; ++seed) {
    const std::size_t n = 2 + seed % 7;
    auto g = random_schreier(n, 2, seed);
    if (is_connected(g))
      out.push_back({"rs(" + std::to_string(n) + ",2," + std::to_string(seed) + ")", Rooted{std::move(g), 0, {}}});
  }
  return out;
}

inline Coloring random_coloring(std::size_t n, std::size_t k, Rng& rng) {
  Coloring c{k, std::vector<color_t>(n)};
  for (auto& x : c.colors) x = static_cast<color_t>(rng.below(k));
  return c;
}

}  // namespace corpus
