// Acceptance suite: one line per criterion, "[PASS]" or "[FAIL]".
// Usage: acceptance [criterion-number]   (no argument runs all ten)

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "corpus.hpp"
#include "oracles.hpp"
#include "schreier/schreier.hpp"

using namespace schreier;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::vector<std::string> failures;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      if (failures.size() < 5) failures.push_back(what);
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string str(const Rational& q) { return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator()); }

// ---------------------------------------------------------------------------

void criterion1(Outcome& o) {
  const auto t0 = Clock::now();
  std::vector<corpus::Named> graphs;
  for (std::size_t n = 1; n <= 8; ++n) graphs.push_back({"P" + std::to_string(n), path_graph(n)});
  for (std::size_t n = 3; n <= 8; ++n) graphs.push_back({"C" + std::to_string(n), cycle_graph(n)});
  graphs.push_back({"C4+chord", corpus::cycle4_with_chords(false)});
  graphs.push_back({"C4+2chords", corpus::cycle4_with_chords(true)});
  for (std::uint64_t seed = 1; seed < 400; ++seed) {
    const std::size_t n = 2 + seed % 7;
    auto g = random_schreier(n, 2, seed);
    if (is_connected(g)) graphs.push_back({"rs" + std::to_string(seed), Rooted{std::move(g), 0, {}}});
  }
  Rng rng(101);
  std::size_t trials = 0, repetitive = 0;
  for (; trials < 12000; ++trials) {
    const auto& [name, x] = graphs[trials % graphs.size()];
    const auto& g = x.graph;
    const auto c = corpus::random_coloring(g.size(), 1 + rng.below(3), rng);
    const std::size_t L = 1 + rng.below(4);
    const auto fast = find_repetitive_path(g, c, L);
    const auto slow = oracle::naive_min_repetition(g, c.colors, L);
    bool agree = fast.has_value() == slow.has_value();
    if (agree && fast)
      agree = fast->half_length() == *slow && is_valid_path(g, *fast) && is_repetitive_path(c, *fast);
    o.require(agree, "disagreement on " + name + " trial " + std::to_string(trials));
    repetitive += slow.has_value();
  }
  const double secs = seconds_since(t0);
  o.require(secs < 60.0, "runtime over 60 s");
  o.detail << graphs.size() << " graphs, " << trials << " colourings, " << repetitive << " repetitive, " << secs
           << " s";
}

void criterion2(Outcome& o) {
  for (std::size_t n = 2; n <= 12; ++n) {
    const std::size_t want = n <= 3 ? 2 : 3;
    const auto got = exhaustive_min_alphabet(path_graph(n).graph);
    o.require(got == want, "P" + std::to_string(n) + " gave " + std::to_string(got));
  }
  o.detail << "P2,P3 -> 2; P4..P12 -> 3";
}

void criterion3(Outcome& o) {
  const auto t0 = Clock::now();
  struct Instance {
    std::string name;
    SchreierGraph graph;
  };
  std::vector<Instance> instances;
  for (std::size_t n : {10u, 100u, 500u, 1000u, 2000u}) {
    instances.push_back({"path" + std::to_string(n), path_graph(n).graph});
    instances.push_back({"cycle" + std::to_string(n), cycle_graph(n).graph});
  }
  for (std::size_t n : {50u, 100u, 250u, 500u}) instances.push_back({"cubic" + std::to_string(n), random_cubic_schreier(n, 7)});
  std::size_t max_total = 0;
  std::ostringstream alphabets;
  for (const auto& [name, g] : instances) {
    try {
      const auto out = moser_tardos_adaptive(g, 4, 7, 1'000'000);
      max_total = std::max(max_total, out.total_resamples);
      o.require(out.total_resamples <= 1'000'000, name + " exceeded 10^6 resamples");
      o.require(is_nonrepetitive(g, out.coloring, 4), name + " output is repetitive");
      if (name.starts_with("cubic") || name == "path2000") alphabets << " " << name << ":C=" << out.coloring.alphabet_size;
    } catch (const std::exception& e) {
      o.require(false, name + ": " + e.what());
    }
  }
  const double secs = seconds_since(t0);
  o.require(secs < 120.0, "runtime over 120 s");
  o.detail << instances.size() << " instances, max total resamples " << max_total << "," << alphabets.str() << ", "
           << secs << " s";
}

void criterion4(Outcome& o) {
  o.require(paper_constant(2) == 71088885u, "paper_constant(2) = " + std::to_string(paper_constant(2)));
  for (std::size_t d = 1; d <= 4; ++d)
    o.require(paper_constant(d) == oracle::ceil_2d2_e16(d), "paper_constant(" + std::to_string(d) + ") disagrees");
  for (std::size_t d : {2u, 3u, 4u}) {
    const auto c = lll_threshold(d, 64);
    if (!c) {
      o.require(false, "no threshold for d=" + std::to_string(d));
      continue;
    }
    o.require(oracle::lll_holds_direct(*c, d, 64), "threshold fails direct check, d=" + std::to_string(d));
    o.require(!oracle::lll_holds_direct(*c - 1, d, 64), "threshold not minimal, d=" + std::to_string(d));
    o.require(*c <= paper_constant(d), "threshold above paper constant, d=" + std::to_string(d));
    o.detail << "d=" << d << ": " << *c << " <= " << paper_constant(d) << "; ";
  }
}

/// Checks one coloured instance; returns the number of nontrivial automorphisms.
std::size_t rigidity_instance(Outcome& o, const std::string& name, const SchreierGraph& g, const Coloring& c) {
  const auto autos = colored_automorphisms(g, c.colors);
  const bool nonrep = !oracle::naive_min_repetition(g, c.colors, g.size() / 2);
  if (nonrep) o.require(autos.size() == 1, name + ": nonrepetitive but not rigid");
  for (std::size_t k = 1; k < autos.size(); ++k) {
    const auto p = extract_repetition(g, c.colors, autos[k]);
    o.require(is_valid_path(g, p) && is_repetitive_path(c, p), name + ": invalid witness");
    o.require(p.half_length() == minimal_displacement(g, autos[k]).distance, name + ": wrong half-length");
  }
  return autos.size() - 1;
}

void criterion5(Outcome& o) {
  std::size_t instances = 0, with_autos = 0;
  for (std::size_t n = 3; n <= 6; ++n) {
    const auto x = cycle_graph(n);
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      Coloring c{2, std::vector<color_t>(n)};
      for (std::size_t v = 0; v < n; ++v) c.colors[v] = (mask >> v) & 1;
      with_autos += rigidity_instance(o, "C" + std::to_string(n), x.graph, c) > 0;
      ++instances;
    }
  }
  Rng rng(55);
  std::size_t randomized = 0;
  for (std::uint64_t seed = 1; randomized < 150; ++seed) {
    const std::size_t n = 3 + seed % 6;
    const auto g = seed % 3 == 0 ? random_cubic_schreier(n + n % 2, seed) : random_schreier(n, 1 + seed % 2, seed);
    if (!is_connected(g)) continue;
    const auto c = corpus::random_coloring(g.size(), 1 + rng.below(3), rng);
    with_autos += rigidity_instance(o, "random seed " + std::to_string(seed), g, c) > 0;
    ++randomized;
    ++instances;
  }
  o.detail << instances << " instances (" << randomized << " randomized), " << with_autos
           << " with a nontrivial automorphism";
}

void criterion6(Outcome& o) {
  Rng rng(66);
  std::vector<Rooted> pool;
  for (std::size_t n = 3; n <= 12; ++n)
    for (int rep = 0; rep < 3; ++rep) {
      auto x = cycle_graph(n);
      x.coloring = corpus::random_coloring(n, 2, rng);
      pool.push_back(x);
      auto p = path_graph(n, static_cast<vertex_t>(rng.below(n)));
      p.coloring = corpus::random_coloring(n, 2, rng);
      pool.push_back(p);
    }
  std::size_t triples = 0;
  for (; triples < 2000; ++triples) {
    const auto& x = pool[rng.below(pool.size())];
    const auto& y = pool[rng.below(pool.size())];
    const auto& z = pool[rng.below(pool.size())];
    const double dxy = distance(x, y, 8), dyz = distance(y, z, 8), dxz = distance(x, z, 8);
    o.require(dxz <= std::max(dxy, dyz), "ultrametric inequality");
    o.require(dxy == distance(y, x, 8), "symmetry");
    o.require(distance(x, x, 8) == 0.0, "identity");
  }

  const auto graphs = corpus::small_connected_graphs();
  const auto random_word = [&](std::size_t k, std::size_t max_len) {
    Word w;
    for (std::size_t len = rng.below(max_len + 1); len > 0; --len) w.letters.push_back(static_cast<gen_t>(rng.below(k)));
    return w;
  };
  std::size_t actions = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const auto& g = graphs[rng.below(graphs.size())].graph;
    if (!g.graph.complete()) continue;
    auto x = g;
    x.coloring = corpus::random_coloring(g.graph.size(), 3, rng);
    const auto k = g.graph.generator_count();
    const Word u = random_word(k, 4), v = random_word(k, 4);
    const auto uv = apply_word(x, u * v);
    const auto u_v = apply_word(*apply_word(x, u), v);
    o.require(uv && u_v && uv->root == u_v->root, "action compatibility");
    o.require(apply_word(x, reduce(u * v, g.graph.generators()))->root == uv->root, "free reduction");
    o.require(forget_colors(*apply_word(x, u)) == *apply_word(forget_colors(x), u), "forget_colors equivariance");
    ++actions;
  }

  // Word locality: equal l-balls give equal fixes_root outcomes for |w| <= l.
  std::vector<Rooted> loc;
  for (std::size_t n = 1; n <= 12; ++n) {
    loc.push_back(cycle_graph(n));
    for (vertex_t r = 0; r < n; ++r) loc.push_back(path_graph(n, r));
  }
  for (std::uint64_t seed = 1; seed < 40; ++seed) loc.push_back(Rooted{random_schreier(2 + seed % 6, 1, seed), 0, {}});
  std::size_t local_pairs = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    const auto& a = loc[rng.below(loc.size())];
    const auto& b = loc[rng.below(loc.size())];
    const std::size_t l = rng.below(5);
    if (canonical_pattern(a, l) != canonical_pattern(b, l)) continue;
    ++local_pairs;
    for (int rep = 0; rep < 5; ++rep) {
      Word w;
      for (std::size_t len = rng.below(l + 1); len > 0; --len) w.letters.push_back(static_cast<gen_t>(rng.below(2)));
      o.require(fixes_root(a, w) == fixes_root(b, w), "word locality");
    }
  }
  o.require(local_pairs >= 1000, "too few locally equal pairs");
  o.detail << triples << " metric triples, " << actions << " action checks, " << local_pairs
           << " locally equal pairs";
}

struct PermInstance {
  std::string name;
  std::vector<oracle::Perm> perms;
};

/// Induced action on unordered pairs of points.
oracle::Perm on_pairs(const oracle::Perm& p) {
  std::vector<std::pair<vertex_t, vertex_t>> pairs;
  for (vertex_t a = 0; a < p.size(); ++a)
    for (vertex_t b = a + 1; b < p.size(); ++b) pairs.emplace_back(a, b);
  oracle::Perm out(pairs.size());
  for (vertex_t k = 0; k < pairs.size(); ++k) {
    auto [a, b] = pairs[k];
    std::pair<vertex_t, vertex_t> img{std::min(p[a], p[b]), std::max(p[a], p[b])};
    out[k] = static_cast<vertex_t>(std::find(pairs.begin(), pairs.end(), img) - pairs.begin());
  }
  return out;
}

void criterion7(Outcome& o) {
  // S3 = <(12),(123),(132)>, S4 = <(12),(1234),(1432)>; natural action and action on pairs.
  const oracle::Perm s3_swap{1, 0, 2}, s3_rot{1, 2, 0}, s3_rot_inv{2, 0, 1};
  const oracle::Perm s4_swap{1, 0, 2, 3}, s4_rot{1, 2, 3, 0}, s4_rot_inv{3, 0, 1, 2};
  std::vector<PermInstance> actions{
      {"S3", {s3_swap, s3_rot, s3_rot_inv}},
      {"S4", {s4_swap, s4_rot, s4_rot_inv}},
      {"S3 on pairs", {on_pairs(s3_swap), on_pairs(s3_rot), on_pairs(s3_rot_inv)}},
      {"S4 on pairs", {on_pairs(s4_swap), on_pairs(s4_rot), on_pairs(s4_rot_inv)}},
  };
  std::size_t checks = 0;
  for (const auto& [name, perms] : actions) {
    const GeneratorSet gens(pair_permutations(perms));
    const auto group = oracle::generate_group(perms);
    for (vertex_t base = 0; base < perms.front().size(); ++base) {
      const auto x = schreier_from_permutations(perms, gens, base);
      std::set<oracle::Perm> stab;
      for (const auto& h : group)
        if (h[base] == base) stab.insert(h);
      const std::size_t k = gens.count();
      std::vector<Word> words{Word{}};
      for (std::size_t begin = 0, len = 1; len <= 3; ++len) {
        const std::size_t end = words.size();
        for (std::size_t i = begin; i < end; ++i)
          for (gen_t a = 0; a < k; ++a) words.push_back(words[i] * Word{{a}});
        begin = end;
      }
      for (const auto& w : words) {
        // Walking w applies its letters in order, so the new root is g(base) with g = s_n ... s_1.
        oracle::Perm g = oracle::identity(perms.front().size());
        for (const gen_t a : w.letters) g = oracle::compose(perms[a], g);
        std::set<oracle::Perm> conj;
        for (const auto& h : stab) conj.insert(oracle::compose(oracle::compose(g, h), oracle::inverse(g)));
        const auto expected = oracle::coset_graph(group, conj, perms, gens);
        const auto moved = apply_word(x, w);
        o.require(moved.has_value(), name + ": word left the graph");
        if (!moved) continue;
        const std::size_t r = x.graph.size();
        o.require(expected.graph.size() == x.graph.size(), name + ": coset count differs");
        o.require(rooted_isomorphic(*moved, expected, r), name + " base " + std::to_string(base) + ": mismatch");
        ++checks;
      }
    }
  }
  o.detail << checks << " (instance, base, word) checks over S3 and S4";
}

void criterion8(Outcome& o) {
  std::size_t checks = 0;
  for (std::size_t r = 0; r <= 5; ++r) {
    const auto ref = cayley_ball(GroupFamily::integers(), r);
    for (std::size_t n = 1; n <= 30; ++n) {
      const auto f = gamma_r_vertex_fraction(cycle_graph(n).graph, ref, r);
      if (n >= 2 * r + 2)
        o.require(f == Rational(1), "C" + std::to_string(n) + " r=" + std::to_string(r) + " should be 1");
      else
        o.require(f < Rational(1), "C" + std::to_string(n) + " r=" + std::to_string(r) + " should be < 1");
      ++checks;
    }
  }
  const auto g = random_schreier(1000, 2, 7);
  const auto f = gamma_r_vertex_fraction(g, cayley_ball(GroupFamily::free(2), 1), 1);
  o.require(f >= Rational(95, 100), "random_schreier(1000,2,7) fraction " + str(f));
  o.detail << checks << " cycle checks; random_schreier(1000,2,7) (Gamma,1)-fraction " << str(f) << " = "
           << static_cast<double>(f.numerator()) / static_cast<double>(f.denominator());
}

void criterion9(Outcome& o) {
  Rng rng(99);
  std::size_t defects = 0;
  std::vector<SchreierGraph> complete;
  for (const auto& [name, x] : corpus::small_connected_graphs())
    if (x.graph.complete()) complete.push_back(x.graph);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    complete.push_back(random_schreier(30 + seed, 2, seed));
    complete.push_back(random_cubic_schreier(30 + 2 * seed, seed));
  }
  for (const auto& g : complete) {
    const auto c = corpus::random_coloring(g.size(), 3, rng);
    for (gen_t i = 0; i < g.generator_count(); ++i)
      for (std::size_t r = 0; r <= 3; ++r) {
        const auto rep = invariance_defect(g, c.colors, r, i);
        o.require(rep.defect == Rational(0) && rep.deficiency == Rational(0), "nonzero invariance defect");
        ++defects;
      }
  }

  std::size_t stages = 0;
  const auto pipeline = [&](const std::string& name, const SchreierGraph& g, const Rooted& ref_big, std::uint64_t seed) {
    const auto out = moser_tardos_adaptive(g, 3, seed, 1'000'000);
    for (std::size_t r = 1; r <= 3; ++r) {
      o.require(clopen_V_fraction(g, out.coloring, r) == Rational(0), name + ": clopen V nonzero at r=" + std::to_string(r));
      const auto ref = ball(ref_big, r);
      o.require(clopen_U_fraction(g, ref, r) == Rational(1) - gamma_r_vertex_fraction(g, ref, r),
                name + ": U != 1 - gamma");
      o.require(empirical_measure(g, out.coloring.colors, r).total() == Rational(1), name + ": weights do not sum to 1");
    }
    ++stages;
  };
  const auto free2 = cayley_ball(GroupFamily::free(2), 3);
  const auto integers = cayley_ball(GroupFamily::integers(), 3);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) pipeline("free stage " + std::to_string(seed), random_schreier(40 * seed, 2, seed), free2, seed);
  for (std::size_t n : {8u, 20u, 64u}) pipeline("C" + std::to_string(n), cycle_graph(n).graph, integers, n);
  for (std::size_t n : {8u, 20u, 64u}) pipeline("P" + std::to_string(n), path_graph(n).graph, integers, n);

  std::size_t tv_pairs = 0;
  for (std::size_t r = 0; r <= 4; ++r)
    for (std::size_t n = 2 * r + 2; n <= 20; ++n)
      for (std::size_t m = n; m <= 20; ++m) {
        const auto d = tv_distance(empirical_measure(cycle_graph(n), r), empirical_measure(cycle_graph(m), r));
        o.require(d == Rational(0), "cycle TV nonzero");
        ++tv_pairs;
      }
  o.detail << defects << " invariance checks, " << stages << " coloured stages, " << tv_pairs << " cycle TV pairs";
}

struct CliRun {
  int code;
  std::string out;
};

CliRun cli(const std::string& args) {
  const std::string cmd = std::string(SCHREIER_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf{};
  while (const auto n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

void criterion10(Outcome& o) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("schreier_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const auto p = [&](const std::string& f) { return (dir / f).string(); };
  const std::vector<std::string> pipeline{
      "build random n=200 k=2 --seed 11 --out " + p("g.json"),
      "build random-cubic 120 --seed 12 --out " + p("h.json"),
      "build cycle 30 --out " + p("c.json"),
      "color " + p("g.json") + " --adaptive -L 3 --seed 13 --out " + p("gc.json"),
      "color " + p("h.json") + " -C 16 -L 4 --seed 14 --out " + p("hc.json"),
      "color " + p("c.json") + " -C 4 -L 4 --seed 15 --out " + p("cc.json"),
      "check " + p("gc.json") + " -L 3",
      "rigidity " + p("cc.json"),
      "sofic-stats " + p("gc.json") + " --ref free:2 -r 1 --eps 1/5",
      "measure " + p("gc.json") + " -r 1 --out " + p("mu.json") + " --csv " + p("mu.csv"),
      "converge " + p("gc.json") + " " + p("hc.json") + " -r 1",
  };
  const std::vector<std::string> files{"g.json", "h.json", "c.json", "gc.json", "hc.json", "cc.json", "mu.json", "mu.csv"};
  const auto once = [&] {
    std::vector<std::string> out;
    for (const auto& cmd : pipeline) {
      const auto r = cli(cmd);
      o.require(r.code == 0 || cmd.starts_with("rigidity"), "nonzero exit: " + cmd);
      out.push_back(std::to_string(r.code) + "\n" + r.out);
    }
    for (const auto& f : files) out.push_back(read_file(p(f)));
    return out;
  };
  const auto first = once();
  const auto second = once();
  std::size_t identical = 0;
  for (std::size_t k = 0; k < first.size(); ++k) {
    o.require(first[k] == second[k], "artifact " + std::to_string(k) + " differs between runs");
    identical += first[k] == second[k];
  }
  o.require(json::parse(first[3].substr(first[3].find('\n') + 1))["seed"] == 13, "seed not recorded");
  fs::remove_all(dir);
  o.detail << identical << "/" << first.size() << " reports and files byte-identical across two runs";
}

const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
    {"oracle equivalence of the repetition search", criterion1},
    {"Thue reproduction on paths", criterion2},
    {"resampling engine soundness", criterion3},
    {"Local Lemma constants", criterion4},
    {"rigidity mechanism", criterion5},
    {"metric and action laws", criterion6},
    {"conjugation correspondence", criterion7},
    {"sofic statistics", criterion8},
    {"measure equalities", criterion9},
    {"CLI determinism", criterion10},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::size_t> which;
  if (argc > 1) {
    const auto k = std::strtoul(argv[1], nullptr, 10);
    if (k < 1 || k > criteria.size()) {
      std::cerr << "usage: acceptance [1-" << criteria.size() << "]\n";
      return 2;
    }
    which.push_back(k);
  } else {
    for (std::size_t k = 1; k <= criteria.size(); ++k) which.push_back(k);
  }
  bool all = true;
  for (const auto k : which) {
    Outcome o;
    try {
      criteria[k - 1].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << k << ": " << criteria[k - 1].first << " ("
              << o.detail.str() << ")\n";
    for (const auto& f : o.failures) std::cout << "       " << f << "\n";
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
