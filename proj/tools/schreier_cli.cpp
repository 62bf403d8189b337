// schreier: build, colour, verify and measure Schreier graphs from the shell.
// Every command prints one JSON report on stdout.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "schreier/schreier.hpp"

using namespace schreier;

namespace {

enum Exit : int {
  ok = 0,
  negative = 1,
  invalid = 2,
  budget = 3,
  boundary = 4,
  resample_cap = 5,
};

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::size_t budget = default_search_budget;
  bool json = true;
  bool timings = false;
};

struct Report {
  json inputs = json::array();
  json outputs = json::array();
  json result = json::object();
  bool success = true;
};

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw error("sha256 failed");
  std::string hex;
  char buf[3];
  for (unsigned int k = 0; k < len; ++k) {
    std::snprintf(buf, sizeof buf, "%02x", md[k]);
    hex += buf;
  }
  return hex;
}

json rational_json(const Rational& q) { return {{"num", q.numerator()}, {"den", q.denominator()}}; }

/// "3/4", "0.01" or "1" as an exact rational.
Rational parse_rational(const std::string& text) {
  const auto fail = [&] { throw std::invalid_argument("not a rational number: '" + text + "'"); };
  const auto digits = [&](const std::string& s) {
    if (s.empty() || s.size() > 17 || s.find_first_not_of("0123456789") != std::string::npos) fail();
    return static_cast<std::int64_t>(std::stoll(s));
  };
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    const auto den = digits(text.substr(slash + 1));
    if (den == 0) fail();
    return Rational(digits(text.substr(0, slash)), den);
  }
  if (const auto dot = text.find('.'); dot != std::string::npos) {
    const std::string whole = dot == 0 ? "0" : text.substr(0, dot);
    const std::string frac = text.substr(dot + 1);
    std::int64_t scale = 1;
    for (std::size_t k = 0; k < frac.size(); ++k) scale *= 10;
    return Rational(digits(whole)) + Rational(digits(frac), scale);
  }
  return Rational(digits(text));
}

/// "(12),(123),(132)" with 1-based points; points may be separated by
/// spaces inside a cycle when they have more than one digit.
std::vector<std::vector<vertex_t>> parse_permutations(const std::string& text) {
  std::vector<std::vector<std::vector<std::size_t>>> cycles_per_gen;
  std::size_t degree = 0;
  std::size_t pos = 0;
  const auto bad = [&] { throw std::invalid_argument("bad permutation list: '" + text + "'"); };
  while (pos < text.size()) {
    if (text[pos] == ',' || text[pos] == ' ') {
      ++pos;
      continue;
    }
    std::vector<std::vector<std::size_t>> cycles;
    while (pos < text.size() && text[pos] == '(') {
      const auto close = text.find(')', pos);
      if (close == std::string::npos) bad();
      const std::string body = text.substr(pos + 1, close - pos - 1);
      std::vector<std::size_t> cycle;
      if (body.find(' ') != std::string::npos) {
        std::size_t k = 0;
        while (k < body.size()) {
          if (body[k] == ' ') {
            ++k;
            continue;
          }
          const auto end = body.find(' ', k);
          cycle.push_back(std::stoul(body.substr(k, end - k)));
          k = end == std::string::npos ? body.size() : end;
        }
      } else {
        for (const char ch : body) {
          if (ch < '1' || ch > '9') bad();
          cycle.push_back(static_cast<std::size_t>(ch - '0'));
        }
      }
      for (const auto p : cycle) {
        if (p == 0) bad();
        degree = std::max(degree, p);
      }
      cycles.push_back(std::move(cycle));
      pos = close + 1;
    }
    if (cycles.empty()) bad();
    cycles_per_gen.push_back(std::move(cycles));
  }
  if (cycles_per_gen.empty()) bad();
  std::vector<std::vector<vertex_t>> perms;
  for (const auto& cycles : cycles_per_gen) {
    std::vector<vertex_t> perm(degree);
    for (vertex_t p = 0; p < degree; ++p) perm[p] = p;
    for (const auto& c : cycles)
      for (std::size_t k = 0; k < c.size(); ++k) perm[c[k] - 1] = static_cast<vertex_t>(c[(k + 1) % c.size()] - 1);
    perms.push_back(std::move(perm));
  }
  return perms;
}

/// Reference Cayley ball from "integers", "lattice:d" or "free:k".
Rooted reference_ball(const std::string& spec, std::size_t r) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  std::size_t param = 0;
  if (colon != std::string::npos) param = std::stoul(spec.substr(colon + 1));
  if (name == "integers") return cayley_ball(GroupFamily::integers(), r);
  if (name == "lattice" && param > 0) return cayley_ball(GroupFamily::integer_lattice(param), r);
  if (name == "free" && param > 0) return cayley_ball(GroupFamily::free(param), r);
  throw std::invalid_argument("unknown reference '" + spec + "' (use integers, lattice:d or free:k)");
}

std::uint64_t require_seed(const Globals& g) {
  if (!g.seed) throw std::invalid_argument("this command needs an explicit --seed");
  return *g.seed;
}

GraphDocument load(const std::string& path, Report& rep) {
  const auto text = read_file(path);
  rep.inputs.push_back({{"path", path}, {"sha256", sha256_hex(text)}});
  return parse_graph(text);
}

void emit(const std::string& path, const std::string& content, Report& rep) {
  write_file(path, content);
  rep.outputs.push_back({{"path", path}, {"sha256", sha256_hex(content)}});
}

json witness_json(const PathWitness& p) { return {{"vertices", p.vertices}, {"half_length", p.half_length()}}; }

// ---------------------------------------------------------------------------
// Commands

struct BuildArgs {
  std::string family;
  std::vector<std::string> params;
  std::string gens;
  std::size_t base = 1;
};

void cmd_build(const Globals& glob, const BuildArgs& a, Report& rep) {
  std::map<std::string, std::size_t> kv;
  std::optional<std::size_t> bare;
  for (const auto& p : a.params) {
    const auto eq = p.find('=');
    try {
      if (eq == std::string::npos)
        bare = std::stoul(p);
      else
        kv[p.substr(0, eq)] = std::stoul(p.substr(eq + 1));
    } catch (const std::logic_error&) {
      throw std::invalid_argument("bad build parameter '" + p + "'");
    }
  }
  const auto get = [&](const std::string& key, std::optional<std::size_t> fallback = std::nullopt) {
    if (const auto it = kv.find(key); it != kv.end()) return it->second;
    if (bare) return *bare;
    if (fallback) return *fallback;
    throw std::invalid_argument("build " + a.family + " needs " + key + "=<value>");
  };
  const auto radius = [&] {
    if (const auto it = kv.find("r"); it != kv.end()) return it->second;
    return get("radius");
  };

  json meta = {{"family", a.family}};
  std::optional<Rooted> x;
  if (a.family == "cycle") {
    meta["n"] = get("n");
    x = cycle_graph(get("n"));
  } else if (a.family == "path") {
    meta["n"] = get("n");
    x = path_graph(get("n"), static_cast<vertex_t>(kv.contains("root") ? kv["root"] : 0));
  } else if (a.family == "integers") {
    meta["radius"] = radius();
    x = cayley_ball(GroupFamily::integers(), radius());
  } else if (a.family == "lattice") {
    const auto d = kv.contains("d") ? kv["d"] : 2;
    meta["d"] = d;
    meta["radius"] = radius();
    x = cayley_ball(GroupFamily::integer_lattice(d), radius());
  } else if (a.family == "free-ball") {
    const auto k = kv.contains("rank") ? kv["rank"] : 2;
    meta["rank"] = k;
    meta["radius"] = radius();
    x = cayley_ball(GroupFamily::free(k), radius());
  } else if (a.family == "perm") {
    if (a.gens.empty()) throw std::invalid_argument("build perm needs --gens");
    if (a.base == 0) throw std::invalid_argument("--base is 1-based");
    meta["gens"] = a.gens;
    meta["base"] = a.base;
    x = schreier_from_permutations(parse_permutations(a.gens), static_cast<vertex_t>(a.base - 1));
  } else if (a.family == "random") {
    const auto k = kv.contains("k") ? kv["k"] : 2;
    meta["n"] = get("n");
    meta["k"] = k;
    meta["seed"] = require_seed(glob);
    x = Rooted{random_schreier(get("n"), k, *glob.seed), 0, std::nullopt};
  } else if (a.family == "random-cubic") {
    meta["n"] = get("n");
    meta["seed"] = require_seed(glob);
    x = Rooted{random_cubic_schreier(get("n"), *glob.seed), 0, std::nullopt};
  } else {
    throw std::invalid_argument("unknown family '" + a.family +
                                "' (cycle, path, integers, lattice, free-ball, perm, random, random-cubic)");
  }

  GraphDocument doc = GraphDocument::from(*x);
  doc.metadata = meta;
  rep.result = {{"family", a.family},
                {"n", x->graph.size()},
                {"edges", edge_count(x->graph)},
                {"generators", x->graph.generator_count()},
                {"complete", x->graph.complete()},
                {"connected", is_connected(x->graph)}};
  if (glob.out.empty())
    rep.result["graph"] = graph_to_json(doc);
  else
    emit(glob.out, dump_graph(doc), rep);
}

struct ColorArgs {
  std::string graph;
  std::size_t colors = 0;
  std::size_t L = 4;
  std::size_t max_resamples = 1'000'000;
  bool adaptive = false;
};

void cmd_color(const Globals& glob, const ColorArgs& a, Report& rep) {
  auto doc = load(a.graph, rep);
  const auto seed = require_seed(glob);
  if (!a.adaptive && a.colors == 0) throw std::invalid_argument("give --colors C or --adaptive");
  Coloring c;
  json engine = {{"engine", "moser-tardos"}, {"L", a.L}, {"seed", seed}};
  try {
    if (a.adaptive) {
      auto r = moser_tardos_adaptive(doc.graph, a.L, seed, a.max_resamples, 4, std::nullopt, glob.budget);
      c = std::move(r.coloring);
      engine["resamples"] = r.resamples;
      engine["total_resamples"] = r.total_resamples;
      engine["attempts"] = r.attempts;
    } else {
      auto r = moser_tardos_color(doc.graph, a.colors, a.L, seed, a.max_resamples, glob.budget);
      c = std::move(r.coloring);
      engine["resamples"] = r.resamples;
    }
  } catch (const resample_cap_exceeded& e) {
    rep.result = {{"L", a.L}, {"resamples", e.resamples()}, {"last_witness", witness_json(e.last_witness())}};
    throw;
  }
  engine["alphabet_size"] = c.alphabet_size;
  doc.coloring = c;
  if (doc.metadata.is_null()) doc.metadata = json::object();
  doc.metadata["coloring"] = engine;
  rep.result = engine;
  if (glob.out.empty())
    rep.result["graph"] = graph_to_json(doc);
  else
    emit(glob.out, dump_graph(doc), rep);
}

void cmd_check(const Globals& glob, const std::string& path, std::size_t L, Report& rep) {
  const auto doc = load(path, rep);
  const auto c = doc.coloring.value_or(Coloring::monochrome(doc.graph.size()));
  const auto w = find_repetitive_path(doc.graph, c, L, glob.budget);
  rep.result = {{"L", L}, {"nonrepetitive", !w.has_value()}, {"witness", w ? witness_json(*w) : json(nullptr)}};
  rep.success = !w;
}

void cmd_rigidity(const std::string& path, Report& rep) {
  const auto doc = load(path, rep);
  const auto x = doc.rooted();
  const auto autos = colored_automorphisms(x);
  rep.result = {{"rigid", autos.size() == 1}, {"automorphisms", autos.size()}};
  if (autos.size() > 1) {
    const auto& theta = autos[1];
    const auto d = minimal_displacement(x.graph, theta);
    const auto p = extract_repetition(x, theta);
    rep.result["witness"] = {{"automorphism", theta.image},
                             {"displaced_vertex", d.vertex},
                             {"displacement", d.distance},
                             {"path", witness_json(p)}};
  }
  rep.success = autos.size() == 1;
}

void cmd_sofic_stats(const Globals& glob, const std::string& path, const std::string& ref_spec, std::size_t r,
                     const std::string& eps_text, Report& rep) {
  const auto doc = load(path, rep);
  const auto eps = parse_rational(eps_text);
  const auto ref = reference_ball(ref_spec, r);
  const auto gamma = gamma_r_vertex_fraction(doc.graph, ref, r);
  const bool stage = gamma >= Rational(1) - eps;
  rep.result = {{"reference", ref_spec},
                {"radius", r},
                {"epsilon", rational_json(eps)},
                {"gamma_fraction", rational_json(gamma)},
                {"clopen_U", rational_json(clopen_U_fraction(doc.graph, ref, r))},
                {"sofic_stage", stage}};
  if (doc.coloring) rep.result["clopen_V"] = rational_json(clopen_V_fraction(doc.graph, *doc.coloring, r, glob.budget));
  rep.success = stage;
}

void cmd_measure(const Globals& glob, const std::string& path, std::size_t r, const std::string& csv, Report& rep) {
  const auto doc = load(path, rep);
  const auto mu = empirical_measure(doc.rooted(), r);
  rep.result = {{"radius", r}, {"patterns", mu.weights.size()}, {"total", rational_json(mu.total())}};
  if (glob.out.empty())
    rep.result["distribution"] = distribution_to_json(mu);
  else
    emit(glob.out, dump_distribution(mu), rep);
  if (!csv.empty()) emit(csv, distribution_csv(mu), rep);
}

void cmd_converge(const std::vector<std::string>& paths, std::size_t r, Report& rep) {
  std::vector<BallDistribution> mus;
  for (const auto& p : paths) mus.push_back(empirical_measure(load(p, rep).rooted(), r));
  json pairs = json::array();
  Rational worst = 0;
  for (std::size_t i = 0; i < mus.size(); ++i)
    for (std::size_t j = i + 1; j < mus.size(); ++j) {
      const auto d = tv_distance(mus[i], mus[j]);
      worst = std::max(worst, d);
      pairs.push_back({{"a", i}, {"b", j}, {"tv", rational_json(d)}});
    }
  json consecutive = json::array();
  for (std::size_t i = 0; i + 1 < mus.size(); ++i) consecutive.push_back(rational_json(tv_distance(mus[i], mus[i + 1])));
  rep.result = {{"radius", r}, {"stages", paths.size()}, {"pairs", pairs}, {"consecutive", consecutive},
                {"max_tv", rational_json(worst)}};
}

json error_json(const char* kind, const std::exception& e) { return {{"kind", kind}, {"message", e.what()}}; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schreier graphs, nonrepetitive colourings and sofic statistics"};
  app.set_version_flag("--version", version);
  app.require_subcommand(1);

  Globals glob;
  app.add_option("--seed", glob.seed, "Seed for every random choice");
  app.add_option("--out", glob.out, "Write the produced graph or distribution here");
  app.add_option("--budget", glob.budget, "Node-expansion cap for path searches");
  app.add_flag("--json", glob.json, "JSON report on stdout (the default and only format)");
  app.add_flag("--timings", glob.timings, "Add wall-clock timings to the report");

  BuildArgs build;
  auto* sc_build = app.add_subcommand("build", "Build a graph family");
  sc_build->add_option("family", build.family, "cycle|path|integers|lattice|free-ball|perm|random|random-cubic")
      ->required();
  sc_build->add_option("params", build.params, "N, or key=value (n, r, rank, d, k, root)");
  sc_build->add_option("--gens", build.gens, "Permutations in cycle notation, 1-based, e.g. \"(12),(123),(132)\"");
  sc_build->add_option("--base", build.base, "Base point (1-based) for perm");

  ColorArgs color;
  auto* sc_color = app.add_subcommand("color", "Colour a graph with the resampling engine");
  sc_color->add_option("graph", color.graph)->required();
  sc_color->add_option("-C,--colors", color.colors, "Alphabet size");
  sc_color->add_option("-L,--L", color.L, "Half-length cap");
  sc_color->add_option("--max-resamples", color.max_resamples);
  sc_color->add_flag("--adaptive", color.adaptive, "Double the alphabet from 4 until the engine succeeds");

  std::string check_graph;
  std::size_t check_L = 4;
  auto* sc_check = app.add_subcommand("check", "Search a coloured graph for a repetitive path");
  sc_check->add_option("graph", check_graph)->required();
  sc_check->add_option("-L,--L", check_L, "Half-length cap");

  std::string rig_graph;
  auto* sc_rig = app.add_subcommand("rigidity", "List colour-preserving automorphisms");
  sc_rig->add_option("graph", rig_graph)->required();

  std::string ss_graph, ss_ref = "integers", ss_eps = "0";
  std::size_t ss_r = 1;
  auto* sc_ss = app.add_subcommand("sofic-stats", "(Gamma,r)-vertex fraction and clopen frequencies");
  sc_ss->add_option("graph", ss_graph)->required();
  sc_ss->add_option("--ref", ss_ref, "integers | lattice:d | free:k");
  sc_ss->add_option("-r,--r", ss_r, "Radius");
  sc_ss->add_option("--eps", ss_eps, "Tolerance, e.g. 1/100 or 0.01");

  std::string m_graph, m_csv;
  std::size_t m_r = 1;
  auto* sc_m = app.add_subcommand("measure", "Empirical r-ball distribution");
  sc_m->add_option("graph", m_graph)->required();
  sc_m->add_option("-r,--r", m_r, "Radius");
  sc_m->add_option("--csv", m_csv, "Also write a CSV summary here");

  std::vector<std::string> cv_graphs;
  std::size_t cv_r = 1;
  auto* sc_cv = app.add_subcommand("converge", "Total-variation distances between stages");
  sc_cv->add_option("graphs", cv_graphs)->required()->expected(2, -1);
  sc_cv->add_option("-r,--r", cv_r, "Radius");

  for (auto* sc : {sc_build, sc_color, sc_check, sc_rig, sc_ss, sc_m, sc_cv}) sc->fallthrough();

  CLI11_PARSE(app, argc, argv);

  Report rep;
  int code = ok;
  json err = nullptr;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (*sc_build)
      cmd_build(glob, build, rep);
    else if (*sc_color)
      cmd_color(glob, color, rep);
    else if (*sc_check)
      cmd_check(glob, check_graph, check_L, rep);
    else if (*sc_rig)
      cmd_rigidity(rig_graph, rep);
    else if (*sc_ss)
      cmd_sofic_stats(glob, ss_graph, ss_ref, ss_r, ss_eps, rep);
    else if (*sc_m)
      cmd_measure(glob, m_graph, m_r, m_csv, rep);
    else if (*sc_cv)
      cmd_converge(cv_graphs, cv_r, rep);
    if (!rep.success) code = negative;
  } catch (const validation_error& e) {
    err = error_json("validation", e);
    err["violations"] = e.violations();
    code = invalid;
  } catch (const incomparable_error& e) {
    err = error_json("incomparable", e);
    code = invalid;
  } catch (const census_incomplete& e) {
    err = error_json("budget", e);
    err["unresolved_roots"] = e.unresolved_roots();
    code = budget;
  } catch (const budget_exceeded& e) {
    err = error_json("budget", e);
    err["expansions"] = e.expansions();
    err["completed_half_length"] = e.completed_half_length();
    code = budget;
  } catch (const boundary_error& e) {
    err = error_json("boundary", e);
    code = boundary;
  } catch (const resample_cap_exceeded& e) {
    err = error_json("resample_cap", e);
    code = resample_cap;
  } catch (const std::invalid_argument& e) {
    err = error_json("invalid_argument", e);
    code = invalid;
  } catch (const std::exception& e) {
    err = error_json("error", e);
    code = invalid;
  }

  json report;
  json command = json::array();
  for (int k = 1; k < argc; ++k) command.push_back(argv[k]);
  report["command"] = command;
  report["version"] = version;
  report["seed"] = glob.seed ? json(*glob.seed) : json(nullptr);
  report["inputs"] = rep.inputs;
  report["outputs"] = rep.outputs;
  report["result"] = rep.result;
  if (!err.is_null()) report["error"] = err;
  report["success"] = code == ok;
  report["exit_code"] = code;
  if (glob.timings) {
    const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    report["timings"] = {{"elapsed_ms", ms}};
  }
  std::cout << report.dump(2) << "\n";
  return code;
}
