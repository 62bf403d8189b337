#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "schreier/errors.hpp"
#include "schreier/graph.hpp"
#include "schreier/random.hpp"

namespace schreier {

/// A path of 2n distinct vertices, consecutive ones adjacent.
struct PathWitness {
  std::vector<vertex_t> vertices;

  std::size_t half_length() const noexcept { return vertices.size() / 2; }
  friend bool operator==(const PathWitness&, const PathWitness&) = default;
};

/// Adjacency lists of the underlying undirected simple graph (labels,
/// directions, multiplicities and loops dropped).
using Adjacency = std::vector<std::vector<vertex_t>>;

inline Adjacency underlying_simple_graph(const SchreierGraph& g) {
  Adjacency adj(g.size());
  for (vertex_t u = 0; u < g.size(); ++u)
    for (gen_t i = 0; i < g.generator_count(); ++i) {
      const vertex_t v = g.target(i, u);
      if (v == no_vertex || v == u) continue;
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return adj;
}

/// Checks the PathWitness invariants against g.
inline bool is_valid_path(const SchreierGraph& g, const PathWitness& p) {
  const auto& v = p.vertices;
  if (v.size() < 2 || v.size() % 2 != 0) return false;
  std::set<vertex_t> seen;
  for (const vertex_t x : v)
    if (x >= g.size() || !seen.insert(x).second) return false;
  const auto adj = underlying_simple_graph(g);
  for (std::size_t k = 0; k + 1 < v.size(); ++k)
    if (!std::binary_search(adj[v[k]].begin(), adj[v[k]].end(), v[k + 1])) return false;
  return true;
}

inline bool is_repetitive_path(std::span<const color_t> colors, const PathWitness& p) {
  const std::size_t n = p.half_length();
  for (std::size_t i = 0; i < n; ++i)
    if (colors[p.vertices[i]] != colors[p.vertices[n + i]]) return false;
  return true;
}

inline bool is_repetitive_path(const Coloring& c, const PathWitness& p) {
  return is_repetitive_path(std::span<const color_t>(c.colors), p);
}

inline constexpr std::size_t default_search_budget = 50'000'000;

namespace detail {

/// Depth-first search for repetitive paths of a fixed half-length. Colours
/// are compared while the second half is laid down, so branches die as soon
/// as a mismatch appears.
class RepetitionSearch {
 public:
  RepetitionSearch(const Adjacency& adj, std::span<const color_t> colors, std::size_t budget)
      : adj_(adj), colors_(colors), budget_(budget), on_path_(adj.size(), false) {}

  /// Restricts paths to vertices with index <= limit.
  void set_vertex_limit(vertex_t limit) { limit_ = limit; }

  std::optional<PathWitness> find(vertex_t start, std::size_t half,
                                  std::optional<vertex_t> must_contain = std::nullopt) {
    if (start > limit_) return std::nullopt;
    half_ = half;
    must_contain_ = must_contain;
    path_.assign(1, start);
    on_path_[start] = true;
    const bool found = extend();
    for (const vertex_t v : path_) on_path_[v] = false;
    if (!found) return std::nullopt;
    return PathWitness{path_};
  }

  std::size_t expansions() const noexcept { return expansions_; }
  void reset_expansions() noexcept { expansions_ = 0; }

 private:
  bool extend() {
    const std::size_t len = path_.size();
    if (len == 2 * half_) {
      if (!must_contain_) return true;
      return std::find(path_.begin(), path_.end(), *must_contain_) != path_.end();
    }
    for (const vertex_t w : adj_[path_.back()]) {
      if (w > limit_ || on_path_[w]) continue;
      if (len >= half_ && colors_[w] != colors_[path_[len - half_]]) continue;
      if (++expansions_ > budget_)
        throw budget_exceeded("path search budget exceeded", expansions_, half_ - 1);
      path_.push_back(w);
      on_path_[w] = true;
      if (extend()) return true;
      on_path_[w] = false;
      path_.pop_back();
    }
    return false;
  }

  const Adjacency& adj_;
  std::span<const color_t> colors_;
  std::size_t budget_;
  std::size_t expansions_ = 0;
  vertex_t limit_ = no_vertex;
  std::size_t half_ = 1;
  std::optional<vertex_t> must_contain_;
  std::vector<vertex_t> path_;
  std::vector<bool> on_path_;
};

inline void check_coloring(const SchreierGraph& g, const Coloring& c) {
  if (c.colors.size() != g.size())
    throw validation_error({"colors length " + std::to_string(c.colors.size()) +
                            " differs from n = " + std::to_string(g.size())});
}

}  // namespace detail

/// Shortest repetitive path with half-length <= max_half, or none if the
/// colouring is max_half-nonrepetitive. Half-lengths are tried in increasing
/// order and start vertices ascending, so the witness is deterministic.
inline std::optional<PathWitness> find_repetitive_path(const SchreierGraph& g, const Coloring& c,
                                                       std::size_t max_half,
                                                       std::size_t budget = default_search_budget) {
  if (max_half == 0) throw std::invalid_argument("half-length cap must be >= 1");
  detail::check_coloring(g, c);
  const auto adj = underlying_simple_graph(g);
  detail::RepetitionSearch search(adj, c.colors, budget);
  for (std::size_t h = 1; h <= max_half && 2 * h <= g.size(); ++h)
    for (vertex_t s = 0; s < g.size(); ++s)
      if (auto w = search.find(s, h)) return w;
  return std::nullopt;
}

inline bool is_nonrepetitive(const SchreierGraph& g, const Coloring& c, std::size_t max_half,
                             std::size_t budget = default_search_budget) {
  return !find_repetitive_path(g, c, max_half, budget).has_value();
}

// ---------------------------------------------------------------------------
// Local Lemma constants

/// Weights and dependency bounds for the Local Lemma check with
/// p_i = C^-i. Indices are 1-based in `a` (a[0] unused).
struct LllParameters {
  std::size_t d = 1;
  std::vector<long double> a;
  std::function<long double(std::size_t, std::size_t)> delta;
  std::size_t r_cut = 64;

  /// Number of paths of half-length j meeting a fixed one of half-length i.
  static std::function<long double(std::size_t, std::size_t)> path_dependency(std::size_t d) {
    return [d](std::size_t i, std::size_t j) {
      return 4.0L * static_cast<long double>(i) * static_cast<long double>(j) *
             std::pow(static_cast<long double>(d), 2.0L * static_cast<long double>(j));
    };
  }

  /// a_i = (2d^2)^-i.
  static LllParameters geometric(std::size_t d, std::size_t r_cut = 64) {
    LllParameters p{d, std::vector<long double>(r_cut + 1, 0.0L), path_dependency(d), r_cut};
    const long double base = 2.0L * static_cast<long double>(d * d);
    for (std::size_t i = 1; i <= r_cut; ++i) p.a[i] = std::pow(base, -static_cast<long double>(i));
    return p;
  }

  /// a_i = 1/(2d^2) for every i.
  static LllParameters constant(std::size_t d, std::size_t r_cut = 64) {
    LllParameters p{d, std::vector<long double>(r_cut + 1, 0.0L), path_dependency(d), r_cut};
    for (std::size_t i = 1; i <= r_cut; ++i) p.a[i] = 1.0L / (2.0L * static_cast<long double>(d * d));
    return p;
  }
};

namespace detail {

/// Smallest ln C satisfying the condition at index i:
/// (-ln a_i - sum_j delta_ij ln(1 - a_j)) / i.
inline long double lll_log_bound(const LllParameters& p, std::size_t i) {
  long double rhs = std::log(p.a[i]);
  for (std::size_t j = 1; j <= p.r_cut; ++j) rhs += p.delta(i, j) * std::log1p(-p.a[j]);
  return -rhs / static_cast<long double>(i);
}

}  // namespace detail

/// C^-i <= a_i prod_j (1-a_j)^delta_ij for every 1 <= i <= r_cut, in log space.
inline bool lll_condition_holds(const LllParameters& p, std::uint64_t C) {
  const long double lnC = std::log(static_cast<long double>(C));
  for (std::size_t i = 1; i <= p.r_cut; ++i) {
    const long double bound = detail::lll_log_bound(p, i);
    if (!std::isfinite(bound) || lnC < bound) return false;
  }
  return true;
}

/// Smallest integer C >= 2 passing lll_condition_holds, or none when no
/// C below 2^62 does.
inline std::optional<std::uint64_t> lll_threshold(const LllParameters& p) {
  if (p.d == 0 || p.r_cut == 0) throw std::invalid_argument("d and r_cut must be >= 1");
  for (std::size_t i = 1; i <= p.r_cut; ++i)
    if (!(p.a[i] > 0.0L && p.a[i] < 1.0L)) throw std::invalid_argument("a_i must lie in (0,1)");
  long double worst = 0.0L;
  for (std::size_t i = 1; i <= p.r_cut; ++i) {
    const long double b = detail::lll_log_bound(p, i);
    if (!std::isfinite(b)) return std::nullopt;
    worst = std::max(worst, b);
  }
  constexpr long double cap = 62.0L * 0.693147180559945309417L;
  if (worst > cap) return std::nullopt;
  std::uint64_t c = std::max<std::uint64_t>(2, static_cast<std::uint64_t>(std::ceil(std::exp(worst))));
  while (c > 2 && lll_condition_holds(p, c - 1)) --c;
  while (!lll_condition_holds(p, c)) ++c;
  return c;
}

inline std::optional<std::uint64_t> lll_threshold(std::size_t d, std::size_t r_cut = 64) {
  return lll_threshold(LllParameters::geometric(d, r_cut));
}

/// ceil(2 d^2 e^16), the closed-form alphabet bound.
inline std::uint64_t paper_constant(std::size_t d) {
  if (d == 0) throw std::invalid_argument("d must be >= 1");
  using boost::multiprecision::cpp_bin_float_100;
  const cpp_bin_float_100 v =
      2 * cpp_bin_float_100(d) * cpp_bin_float_100(d) * boost::multiprecision::exp(cpp_bin_float_100(16));
  return static_cast<std::uint64_t>(boost::multiprecision::ceil(v));
}

// ---------------------------------------------------------------------------
// Resampling engine

/// The resampling engine gave up; carries the last violated path found.
class resample_cap_exceeded : public error {
 public:
  resample_cap_exceeded(std::size_t resamples, PathWitness last)
      : error("resample cap exceeded after " + std::to_string(resamples) + " resamples"),
        resamples_(resamples),
        last_(std::move(last)) {}

  std::size_t resamples() const noexcept { return resamples_; }
  const PathWitness& last_witness() const noexcept { return last_; }

 private:
  std::size_t resamples_;
  PathWitness last_;
};

struct EngineResult {
  Coloring coloring;
  std::size_t resamples = 0;
};

/// Moser-Tardos resampling against repetitive paths of half-length <= L.
///
/// A set of dirty vertices is kept with the invariant that every violated
/// event contains a dirty vertex. The smallest dirty vertex is examined: if
/// no repetitive path runs through it, it is cleaned; otherwise the shortest
/// such path is resampled uniformly and its vertices become dirty. An empty
/// dirty set certifies the colouring.
inline EngineResult moser_tardos_color(const SchreierGraph& g, std::size_t C, std::size_t L,
                                       std::uint64_t seed, std::size_t max_resamples,
                                       std::size_t budget = default_search_budget) {
  if (C == 0) throw std::invalid_argument("alphabet size must be >= 1");
  if (L == 0) throw std::invalid_argument("half-length cap must be >= 1");
  Rng rng(seed);
  EngineResult out{Coloring{C, std::vector<color_t>(g.size())}, 0};
  auto& colors = out.coloring.colors;
  for (auto& c : colors) c = static_cast<color_t>(rng.below(C));

  const auto adj = underlying_simple_graph(g);
  detail::RepetitionSearch search(adj, colors, budget);
  std::set<vertex_t> dirty;
  for (vertex_t v = 0; v < g.size(); ++v) dirty.insert(v);

  std::vector<vertex_t> dist(g.size(), no_vertex);
  std::vector<vertex_t> reached;
  const auto violated_through = [&](vertex_t v) -> std::optional<PathWitness> {
    // Paths of 2h vertices through v start within distance 2h-1 of v.
    reached.assign(1, v);
    dist[v] = 0;
    for (std::size_t head = 0; head < reached.size(); ++head) {
      const vertex_t u = reached[head];
      if (dist[u] + 1 > 2 * L - 1) continue;
      for (const vertex_t w : adj[u])
        if (dist[w] == no_vertex) {
          dist[w] = dist[u] + 1;
          reached.push_back(w);
        }
    }
    std::vector<std::pair<vertex_t, vertex_t>> starts;
    for (const vertex_t u : reached) starts.emplace_back(u, dist[u]);
    for (const vertex_t u : reached) dist[u] = no_vertex;
    std::sort(starts.begin(), starts.end());
    for (std::size_t h = 1; h <= L; ++h)
      for (const auto& [s, d] : starts)
        if (d <= 2 * h - 1)
          if (auto w = search.find(s, h, v)) return w;
    return std::nullopt;
  };

  while (!dirty.empty()) {
    const vertex_t v = *dirty.begin();
    search.reset_expansions();
    auto witness = violated_through(v);
    if (!witness) {
      dirty.erase(dirty.begin());
      continue;
    }
    if (out.resamples >= max_resamples) throw resample_cap_exceeded(out.resamples, *witness);
    ++out.resamples;
    for (const vertex_t u : witness->vertices) {
      colors[u] = static_cast<color_t>(rng.below(C));
      dirty.insert(u);
    }
  }
  return out;
}

struct AdaptiveResult {
  Coloring coloring;
  std::size_t resamples = 0;        // in the successful attempt
  std::size_t total_resamples = 0;  // across all attempts
  std::size_t attempts = 0;
};

/// Runs the engine with C = start, 2*start, ... until one succeeds. Each
/// attempt may use at most attempt_cap resamples (default max(1000, 50|V|))
/// and all attempts together at most max_resamples.
inline AdaptiveResult moser_tardos_adaptive(const SchreierGraph& g, std::size_t L, std::uint64_t seed,
                                            std::size_t max_resamples, std::size_t start = 4,
                                            std::optional<std::size_t> attempt_cap = std::nullopt,
                                            std::size_t budget = default_search_budget) {
  if (start == 0) throw std::invalid_argument("alphabet size must be >= 1");
  const std::size_t per_attempt = attempt_cap.value_or(std::max<std::size_t>(1000, 50 * g.size()));
  AdaptiveResult out;
  for (std::size_t C = start;; C *= 2) {
    const std::size_t remaining = max_resamples - out.total_resamples;
    const std::size_t cap = std::min(per_attempt, remaining);
    ++out.attempts;
    try {
      auto r = moser_tardos_color(g, C, L, seed, cap, budget);
      out.coloring = std::move(r.coloring);
      out.resamples = r.resamples;
      out.total_resamples += r.resamples;
      return out;
    } catch (const resample_cap_exceeded& e) {
      out.total_resamples += e.resamples();
      if (out.total_resamples >= max_resamples) throw resample_cap_exceeded(out.total_resamples, e.last_witness());
    }
  }
}

// ---------------------------------------------------------------------------
// Brute-force minimum alphabet

inline constexpr std::size_t default_exhaustive_cap = 12;

/// Smallest alphabet admitting a colouring with no repetitive path of
/// half-length <= max_half (default: every length). Backtracks over vertices
/// in index order; colour classes are interchangeable, so vertex k may only
/// open colour max_used + 1.
inline std::size_t exhaustive_min_alphabet(const SchreierGraph& g,
                                           std::optional<std::size_t> max_half = std::nullopt,
                                           std::size_t vertex_cap = default_exhaustive_cap) {
  const std::size_t n = g.size();
  if (n > vertex_cap)
    throw budget_exceeded("exhaustive_min_alphabet: " + std::to_string(n) + " vertices exceeds cap " +
                              std::to_string(vertex_cap),
                          0, 0);
  if (n == 0) return 1;
  const std::size_t L = max_half.value_or(n / 2);
  const auto adj = underlying_simple_graph(g);
  std::vector<color_t> colors(n, 0);

  for (std::size_t C = 1;; ++C) {
    detail::RepetitionSearch search(adj, colors, std::numeric_limits<std::size_t>::max());
    const auto clean_through = [&](vertex_t k) {
      search.set_vertex_limit(k);
      for (std::size_t h = 1; h <= L && 2 * h <= k + 1; ++h)
        for (vertex_t s = 0; s <= k; ++s)
          if (search.find(s, h, k)) return false;
      return true;
    };
    const std::function<bool(vertex_t, color_t)> assign = [&](vertex_t k, color_t used) -> bool {
      if (k == n) return true;
      const color_t top = std::min<color_t>(static_cast<color_t>(C) - 1, used);
      for (color_t c = 0; c <= top; ++c) {
        colors[k] = c;
        if (clean_through(k) && assign(k + 1, std::max<color_t>(used, c + 1))) return true;
      }
      return false;
    };
    if (assign(0, 0)) return C;
  }
}

}  // namespace schreier
