#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "schreier/coloring.hpp"
#include "schreier/dynamics.hpp"
#include "schreier/errors.hpp"
#include "schreier/graph.hpp"

namespace schreier {

using Rational = boost::rational<std::int64_t>;

/// Empirical law of r-ball types under a uniform root; exact weights.
struct BallDistribution {
  std::size_t radius = 0;
  std::map<BallPattern, Rational> weights;

  Rational total() const {
    Rational s = 0;
    for (const auto& [p, w] : weights) s += w;
    return s;
  }
  friend bool operator==(const BallDistribution&, const BallDistribution&) = default;
};

/// Pattern of the r-ball at every root, indexed by root.
inline std::vector<BallPattern> pattern_census(const SchreierGraph& g, std::span<const color_t> colors,
                                               std::size_t r) {
  std::vector<BallPattern> out;
  out.reserve(g.size());
  for (vertex_t p = 0; p < g.size(); ++p) out.push_back(canonical_pattern(g, p, colors, r));
  return out;
}

namespace detail {

inline void require_reference(const SchreierGraph& g, const Rooted& ref, std::size_t r) {
  if (!(g.generators() == ref.graph.generators()))
    throw incomparable_error("stage and reference use different generator sets");
  // A Cayley ball of radius >= r has every map defined below depth r.
  const auto dist = distances_from(ref.graph, ref.root);
  for (vertex_t u = 0; u < ref.graph.size(); ++u)
    if (dist[u] < r)
      for (gen_t i = 0; i < ref.graph.generator_count(); ++i)
        if (ref.graph.target(i, u) == no_vertex)
          throw std::invalid_argument("reference ball is shallower than radius " + std::to_string(r));
}

inline Rational fraction(std::size_t count, std::size_t total) {
  if (total == 0) return Rational(0);
  return Rational(static_cast<std::int64_t>(count), static_cast<std::int64_t>(total));
}

}  // namespace detail

/// Fraction of vertices p whose uncoloured r-ball is rooted-labelled
/// isomorphic to the reference ball.
inline Rational gamma_r_vertex_fraction(const SchreierGraph& g, const Rooted& ref, std::size_t r) {
  detail::require_reference(g, ref, r);
  const auto target = canonical_pattern(ref.graph, ref.root, {}, r);
  std::size_t hits = 0;
  for (vertex_t p = 0; p < g.size(); ++p)
    if (canonical_pattern(g, p, {}, r) == target) ++hits;
  return detail::fraction(hits, g.size());
}

inline bool is_sofic_stage(const SchreierGraph& g, const Rooted& ref, std::size_t r, const Rational& eps) {
  return gamma_r_vertex_fraction(g, ref, r) >= Rational(1) - eps;
}

inline BallDistribution empirical_measure(const SchreierGraph& g, std::span<const color_t> colors,
                                          std::size_t r) {
  std::map<BallPattern, std::size_t> counts;
  for (auto& p : pattern_census(g, colors, r)) ++counts[std::move(p)];
  BallDistribution mu{r, {}};
  for (auto& [p, c] : counts) mu.weights.emplace(p, detail::fraction(c, g.size()));
  return mu;
}

inline BallDistribution empirical_measure(const Rooted& x, std::size_t r) {
  return empirical_measure(x.graph, x.colors(), r);
}

namespace detail {

inline Rational half_l1(const std::map<BallPattern, Rational>& a, const std::map<BallPattern, Rational>& b) {
  Rational s = 0;
  for (const auto& [p, w] : a) {
    const auto it = b.find(p);
    s += boost::abs(w - (it == b.end() ? Rational(0) : it->second));
  }
  for (const auto& [p, w] : b)
    if (!a.contains(p)) s += w;
  return s / 2;
}

}  // namespace detail

inline Rational tv_distance(const BallDistribution& mu, const BallDistribution& nu) {
  if (mu.radius != nu.radius) throw incomparable_error("distributions have different radii");
  return detail::half_l1(mu.weights, nu.weights);
}

/// Invariance check of the empirical measure under moving every root along
/// one generator. Roots whose generator edge is absent are not pushed; their
/// mass is reported as `deficiency` and the defect compares the two
/// measures on the remaining roots only.
struct InvarianceReport {
  Rational defect;
  Rational deficiency;
};

inline InvarianceReport invariance_defect(const SchreierGraph& g, std::span<const color_t> colors,
                                          std::size_t r, gen_t i) {
  if (i >= g.generator_count()) throw std::invalid_argument("generator out of range");
  const auto census = pattern_census(g, colors, r);
  std::map<BallPattern, Rational> before, after;
  std::size_t missing = 0;
  for (vertex_t p = 0; p < g.size(); ++p) {
    const vertex_t q = g.target(i, p);
    if (q == no_vertex) {
      ++missing;
      continue;
    }
    before[census[p]] += detail::fraction(1, g.size());
    after[census[q]] += detail::fraction(1, g.size());
  }
  return InvarianceReport{detail::half_l1(before, after), detail::fraction(missing, g.size())};
}

/// Fraction of roots whose uncoloured r-ball differs from the reference;
/// counted directly rather than as a complement.
inline Rational clopen_U_fraction(const SchreierGraph& g, const Rooted& ref, std::size_t r) {
  detail::require_reference(g, ref, r);
  const auto target = canonical_pattern(ref.graph, ref.root, {}, r);
  std::size_t misses = 0;
  for (vertex_t p = 0; p < g.size(); ++p)
    if (canonical_pattern(g, p, {}, r) != target) ++misses;
  return detail::fraction(misses, g.size());
}

/// Some roots could not be decided within the per-root search budget.
class census_incomplete : public budget_exceeded {
 public:
  explicit census_incomplete(std::vector<vertex_t> unresolved)
      : budget_exceeded("census budget exceeded at " + std::to_string(unresolved.size()) + " roots", 0, 0),
        unresolved_(std::move(unresolved)) {}

  const std::vector<vertex_t>& unresolved_roots() const noexcept { return unresolved_; }

 private:
  std::vector<vertex_t> unresolved_;
};

/// Fraction of roots whose r-ball contains a repetitive path (half-length
/// at most r, searched inside the ball).
inline Rational clopen_V_fraction(const SchreierGraph& g, const Coloring& c, std::size_t r,
                                  std::size_t budget = default_search_budget) {
  detail::check_coloring(g, c);
  if (r == 0) return Rational(0);
  const std::optional<Coloring> coloring = c;
  std::size_t hits = 0;
  std::vector<vertex_t> unresolved;
  for (vertex_t p = 0; p < g.size(); ++p) {
    const Rooted b = ball(g, p, coloring, r);
    try {
      if (find_repetitive_path(b.graph, *b.coloring, r, budget)) ++hits;
    } catch (const budget_exceeded&) {
      unresolved.push_back(p);
    }
  }
  if (!unresolved.empty()) throw census_incomplete(std::move(unresolved));
  return detail::fraction(hits, g.size());
}

/// Colours seen along every reduced word of length <= r from the root.
struct WindowPattern {
  std::size_t radius = 0;
  std::map<Word, color_t> assignment;

  friend bool operator==(const WindowPattern&, const WindowPattern&) = default;
};

/// Reduced words of length <= r in length-then-lex order.
inline std::vector<Word> reduced_words(const GeneratorSet& gens, std::size_t r) {
  std::vector<Word> out{Word{}};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= r; ++len) {
    const std::size_t end = out.size();
    for (std::size_t k = begin; k < end; ++k)
      for (gen_t a = 0; a < gens.count(); ++a) {
        if (!out[k].empty() && gens.inverse(out[k].letters.back()) == a) continue;
        Word w = out[k];
        w.letters.push_back(a);
        out.push_back(std::move(w));
      }
    begin = end;
  }
  return out;
}

/// Finite window of the point of K^Gamma seen from the root:
/// assignment(w) = colour of the root moved along w.
inline WindowPattern subshift_window(const Rooted& x, std::size_t r) {
  WindowPattern out{r, {}};
  const auto colors = x.colors();
  for (auto& w : reduced_words(x.graph.generators(), r)) {
    const auto v = walk(x.graph, x.root, w);
    if (!v) throw boundary_error("reduced word of length " + std::to_string(w.size()) + " leaves the graph");
    out.assignment.emplace(std::move(w), colors.empty() ? color_t{0} : colors[*v]);
  }
  return out;
}

}  // namespace schreier
