#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "schreier/graph.hpp"
#include "schreier/random.hpp"

namespace schreier {

/// Test families of groups with their standard symmetric generators.
/// Generator layout: integers (t, t^-1); lattice(d) (e_1, -e_1, ..., e_d, -e_d);
/// free(k) (a_1, a_1^-1, ..., a_k, a_k^-1).
struct GroupFamily {
  enum class Kind { cyclic, integers, integer_lattice, free, permutation_group };

  Kind kind = Kind::integers;
  std::size_t param = 0;
  std::vector<std::vector<vertex_t>> permutations;
  std::vector<gen_t> pairing;

  static GroupFamily cyclic(std::size_t n) { return {Kind::cyclic, n, {}, {}}; }
  static GroupFamily integers() { return {Kind::integers, 1, {}, {}}; }
  static GroupFamily integer_lattice(std::size_t d) { return {Kind::integer_lattice, d, {}, {}}; }
  static GroupFamily free(std::size_t k) { return {Kind::free, k, {}, {}}; }
  static GroupFamily permutation_group(std::vector<std::vector<vertex_t>> perms,
                                       std::vector<gen_t> pairing) {
    return {Kind::permutation_group, perms.empty() ? 0 : perms.front().size(), std::move(perms),
            std::move(pairing)};
  }

  GeneratorSet generators() const {
    switch (kind) {
      case Kind::cyclic:
      case Kind::integers:
        return GeneratorSet::paired(1);
      case Kind::integer_lattice:
      case Kind::free:
        if (param == 0) throw std::invalid_argument("family rank must be positive");
        return GeneratorSet::paired(param);
      case Kind::permutation_group:
        return GeneratorSet(pairing);
    }
    throw std::logic_error("unknown family");
  }
};

/// Z/n as a cycle: t maps i to i+1 mod n. Complete, rooted at 0.
inline Rooted cycle_graph(std::size_t n) {
  if (n == 0) throw std::invalid_argument("cycle_graph needs n >= 1");
  SchreierGraph g(GeneratorSet::paired(1), n, true);
  for (vertex_t i = 0; i < n; ++i) g.connect(0, i, static_cast<vertex_t>((i + 1) % n));
  return Rooted{std::move(g), 0, std::nullopt};
}

/// Segment 0 - 1 - ... - (n-1) with t: i -> i+1; the ends are truncated.
inline Rooted path_graph(std::size_t n, vertex_t root = 0) {
  if (n == 0) throw std::invalid_argument("path_graph needs n >= 1");
  SchreierGraph g(GeneratorSet::paired(1), n);
  for (vertex_t i = 0; i + 1 < n; ++i) g.connect(0, i, i + 1);
  g.set_complete(g.all_maps_total());
  return Rooted{std::move(g), root, std::nullopt};
}

namespace detail {

// Group elements as integer keys: coordinates for abelian families, the
// reduced word (letters) for free groups.
inline std::vector<int> left_multiply(const GroupFamily& f, gen_t s, const std::vector<int>& g) {
  std::vector<int> out = g;
  if (f.kind == GroupFamily::Kind::free) {
    const int inv = static_cast<int>(s ^ 1u);
    if (!out.empty() && out.front() == inv)
      out.erase(out.begin());
    else
      out.insert(out.begin(), static_cast<int>(s));
    return out;
  }
  out[s / 2] += (s % 2 == 0) ? 1 : -1;
  return out;
}

}  // namespace detail

/// Radius-r ball of the Cayley graph rooted at the identity. Vertices are
/// numbered by shortlex words (reduced words in length-then-lex order for
/// free groups); maps leaving the ball are absent.
inline Rooted cayley_ball(const GroupFamily& family, std::size_t r) {
  using K = GroupFamily::Kind;
  if (family.kind != K::integers && family.kind != K::integer_lattice && family.kind != K::free)
    throw std::invalid_argument("cayley_ball: unsupported family");
  const GeneratorSet gens = family.generators();
  const std::vector<int> identity =
      family.kind == K::free ? std::vector<int>{} : std::vector<int>(family.param, 0);

  std::map<std::vector<int>, vertex_t> index{{identity, 0}};
  std::vector<std::vector<int>> elements{identity};
  std::vector<std::size_t> depth{0};
  for (std::size_t head = 0; head < elements.size(); ++head) {
    if (depth[head] == r) continue;
    for (gen_t s = 0; s < gens.count(); ++s) {
      auto next = detail::left_multiply(family, s, elements[head]);
      if (index.emplace(next, static_cast<vertex_t>(elements.size())).second) {
        elements.push_back(std::move(next));
        depth.push_back(depth[head] + 1);
      }
    }
  }

  SchreierGraph g(gens, elements.size());
  for (vertex_t u = 0; u < elements.size(); ++u)
    for (gen_t s = 0; s < gens.count(); ++s) {
      auto it = index.find(detail::left_multiply(family, s, elements[u]));
      if (it != index.end()) g.connect(s, u, it->second);
    }
  g.set_complete(g.all_maps_total());
  return Rooted{std::move(g), 0, std::nullopt};
}

/// Pairs each permutation with its inverse in the list (involutions with
/// themselves). Throws if some generator's inverse is missing.
inline std::vector<gen_t> pair_permutations(const std::vector<std::vector<vertex_t>>& perms) {
  const std::size_t k = perms.size();
  std::vector<gen_t> pairing(k, static_cast<gen_t>(k));
  for (gen_t i = 0; i < k; ++i) {
    if (pairing[i] != k) continue;
    for (gen_t j = i; j < k; ++j) {
      if (pairing[j] != k && j != i) continue;
      bool inverse = perms[j].size() == perms[i].size();
      for (vertex_t p = 0; inverse && p < perms[i].size(); ++p)
        inverse = perms[i][p] < perms[j].size() && perms[j][perms[i][p]] == p;
      if (inverse) {
        pairing[i] = j;
        pairing[j] = i;
        break;
      }
    }
    if (pairing[i] == k)
      throw std::invalid_argument("generator " + std::to_string(i) + " has no inverse in the list");
  }
  return pairing;
}

namespace detail {

inline void check_permutations(const std::vector<std::vector<vertex_t>>& perms,
                               const GeneratorSet& gens) {
  if (perms.size() != gens.count())
    throw std::invalid_argument("one permutation per generator expected");
  const std::size_t m = perms.front().size();
  for (gen_t i = 0; i < perms.size(); ++i) {
    if (perms[i].size() != m) throw std::invalid_argument("permutations act on different sets");
    std::vector<bool> hit(m, false);
    for (const vertex_t p : perms[i]) {
      if (p >= m || hit[p])
        throw std::invalid_argument("generator " + std::to_string(i) + " is not a bijection");
      hit[p] = true;
    }
  }
  for (gen_t i = 0; i < perms.size(); ++i) {
    const auto& inv = perms[gens.inverse(i)];
    for (vertex_t p = 0; p < m; ++p)
      if (inv[perms[i][p]] != p)
        throw std::invalid_argument("inconsistent pairing: generator " + std::to_string(i) +
                                    " is not inverse to its partner");
  }
}

}  // namespace detail

/// Points of the orbit of `base`, in the order they become vertices.
inline std::vector<vertex_t> orbit_points(const std::vector<std::vector<vertex_t>>& perms,
                                          vertex_t base) {
  const std::size_t m = perms.front().size();
  if (base >= m) throw std::invalid_argument("base point out of range");
  std::vector<vertex_t> order{base};
  std::vector<bool> seen(m, false);
  seen[base] = true;
  for (std::size_t head = 0; head < order.size(); ++head)
    for (const auto& perm : perms) {
      const vertex_t q = perm[order[head]];
      if (!seen[q]) {
        seen[q] = true;
        order.push_back(q);
      }
    }
  return order;
}

/// Schreier graph of Stab(base) realised on the orbit of `base`. Vertex k is
/// orbit_points(perms, base)[k]; the root (vertex 0) is the base point.
inline Rooted schreier_from_permutations(const std::vector<std::vector<vertex_t>>& perms,
                                         const GeneratorSet& gens, vertex_t base) {
  if (perms.empty()) throw std::invalid_argument("no generators");
  detail::check_permutations(perms, gens);
  const auto order = orbit_points(perms, base);
  std::vector<vertex_t> index(perms.front().size(), no_vertex);
  for (vertex_t k = 0; k < order.size(); ++k) index[order[k]] = k;
  SchreierGraph g(gens, order.size(), true);
  for (gen_t i = 0; i < perms.size(); ++i)
    for (vertex_t k = 0; k < order.size(); ++k) g.connect(i, k, index[perms[i][order[k]]]);
  return Rooted{std::move(g), 0, std::nullopt};
}

inline Rooted schreier_from_permutations(const std::vector<std::vector<vertex_t>>& perms,
                                         vertex_t base) {
  if (perms.empty()) throw std::invalid_argument("no generators");
  return schreier_from_permutations(perms, GeneratorSet(pair_permutations(perms)), base);
}

/// Random complete Schreier graph on n vertices: a uniform permutation for
/// each inverse pair and a uniform matching (one fixed point if n is odd)
/// for each involutive generator. Seeded Fisher-Yates throughout.
inline SchreierGraph random_schreier(const GeneratorSet& gens, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("random_schreier needs n >= 1");
  Rng rng(seed);
  SchreierGraph g(gens, n, true);
  for (gen_t i = 0; i < gens.count(); ++i) {
    if (gens.inverse(i) < i) continue;
    std::vector<vertex_t> perm(n);
    for (vertex_t v = 0; v < n; ++v) perm[v] = v;
    rng.shuffle(perm);
    if (gens.is_involutive(i)) {
      for (std::size_t k = 0; k + 1 < n; k += 2) g.connect(i, perm[k], perm[k + 1]);
      if (n % 2 == 1) g.connect(i, perm[n - 1], perm[n - 1]);
    } else {
      for (vertex_t v = 0; v < n; ++v) g.connect(i, v, perm[v]);
    }
  }
  return g;
}

/// k independent uniform permutations; a finite stage for the free group F_k.
inline SchreierGraph random_schreier(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw std::invalid_argument("random_schreier needs k >= 1");
  return random_schreier(GeneratorSet::paired(k), n, seed);
}

/// Generators (t, t^-1, s) with s an involution: a 3-regular stage when n is even.
inline SchreierGraph random_cubic_schreier(std::size_t n, std::uint64_t seed) {
  return random_schreier(GeneratorSet({1, 0, 2}), n, seed);
}

/// Undirected edges, counting a generator and its inverse once.
inline std::size_t edge_count(const SchreierGraph& g) {
  std::size_t edges = 0;
  const auto& gens = g.generators();
  for (gen_t i = 0; i < g.generator_count(); ++i) {
    const gen_t j = gens.inverse(i);
    if (j < i) continue;
    for (vertex_t u = 0; u < g.size(); ++u) {
      const vertex_t v = g.target(i, u);
      if (v == no_vertex) continue;
      if (i != j || u <= v) ++edges;
    }
  }
  return edges;
}

}  // namespace schreier
