#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/beast/core/detail/base64.hpp>
#include <boost/crc.hpp>
#include <json.hpp>

#include "schreier/errors.hpp"
#include "schreier/graph.hpp"
#include "schreier/measures.hpp"

namespace schreier {

using json = nlohmann::ordered_json;

/// A graph file: the graph plus whatever optional fields it carried, so
/// that writing a read document reproduces it byte for byte.
struct GraphDocument {
  SchreierGraph graph;
  std::optional<vertex_t> root;
  std::optional<Coloring> coloring;
  json metadata;  // null when absent

  static GraphDocument from(const Rooted& x) { return {x.graph, x.root, x.coloring, nullptr}; }
  Rooted rooted() const { return Rooted{graph, root.value_or(0), coloring}; }

  friend bool operator==(const GraphDocument&, const GraphDocument&) = default;
};

inline json graph_to_json(const GraphDocument& doc) {
  const auto& g = doc.graph;
  json j;
  json pairs = json::array();
  for (gen_t i = 0; i < g.generator_count(); ++i) pairs.push_back({i, g.generators().inverse(i)});
  j["generator_pairs"] = std::move(pairs);
  j["n"] = g.size();
  json maps = json::array();
  for (const auto& m : g.maps()) {
    json row = json::array();
    for (const vertex_t v : m) {
      if (v == no_vertex)
        row.push_back(nullptr);
      else
        row.push_back(v);
    }
    maps.push_back(std::move(row));
  }
  j["maps"] = std::move(maps);
  if (doc.root) j["root"] = *doc.root;
  if (doc.coloring) {
    j["colors"] = doc.coloring->colors;
    j["alphabet_size"] = doc.coloring->alphabet_size;
  }
  j["complete"] = g.complete();
  if (!doc.metadata.is_null()) j["metadata"] = doc.metadata;
  return j;
}

/// Compact single-line JSON followed by a newline.
inline std::string dump_graph(const GraphDocument& doc) { return graph_to_json(doc).dump() + "\n"; }

namespace detail {

[[noreturn]] inline void malformed(const std::string& what) {
  throw validation_error({"malformed document: " + what});
}

inline std::uint64_t as_index(const json& v, const char* field) {
  if (!v.is_number_unsigned()) malformed(std::string(field) + " entries must be non-negative integers");
  return v.get<std::uint64_t>();
}

}  // namespace detail

/// Parses and validates a graph document.
inline GraphDocument graph_from_json(const json& j) {
  using detail::as_index;
  using detail::malformed;
  if (!j.is_object()) malformed("top level must be an object");
  for (const char* key : {"generator_pairs", "n", "maps", "complete"})
    if (!j.contains(key)) malformed(std::string("missing field '") + key + "'");

  const auto& pairs = j["generator_pairs"];
  if (!pairs.is_array() || pairs.empty()) malformed("generator_pairs must be a nonempty array");
  std::vector<gen_t> inverse(pairs.size(), no_vertex);
  for (const auto& p : pairs) {
    if (!p.is_array() || p.size() != 2) malformed("generator_pairs entries must be [i, inv(i)]");
    const auto i = as_index(p[0], "generator_pairs");
    const auto k = as_index(p[1], "generator_pairs");
    if (i >= inverse.size() || k >= inverse.size() || inverse[i] != no_vertex)
      malformed("generator_pairs must list each generator once");
    inverse[i] = static_cast<gen_t>(k);
  }
  std::optional<GeneratorSet> gens;
  try {
    gens.emplace(inverse);
  } catch (const std::invalid_argument& e) {
    throw validation_error({e.what()});
  }

  const auto n = as_index(j["n"], "n");
  const auto& maps_json = j["maps"];
  if (!maps_json.is_array() || maps_json.size() != gens->count())
    malformed("maps must hold one array per generator");
  std::vector<std::vector<vertex_t>> maps;
  for (const auto& row : maps_json) {
    if (!row.is_array() || row.size() != n) malformed("every map must have length n");
    std::vector<vertex_t> m;
    m.reserve(n);
    for (const auto& v : row) {
      if (v.is_null())
        m.push_back(no_vertex);
      else
        m.push_back(static_cast<vertex_t>(std::min<std::uint64_t>(as_index(v, "maps"), no_vertex - 1)));
    }
    maps.push_back(std::move(m));
  }
  if (!j["complete"].is_boolean()) malformed("complete must be a boolean");

  GraphDocument doc{SchreierGraph(*gens, std::move(maps), j["complete"].get<bool>()), std::nullopt,
                    std::nullopt, nullptr};
  if (j.contains("root")) doc.root = static_cast<vertex_t>(as_index(j["root"], "root"));
  if (j.contains("colors")) {
    const auto& cj = j["colors"];
    if (!cj.is_array()) malformed("colors must be an array");
    Coloring c;
    for (const auto& v : cj) c.colors.push_back(static_cast<color_t>(as_index(v, "colors")));
    if (j.contains("alphabet_size")) {
      c.alphabet_size = as_index(j["alphabet_size"], "alphabet_size");
    } else {
      c.alphabet_size = 1;
      for (const color_t v : c.colors) c.alphabet_size = std::max<std::size_t>(c.alphabet_size, v + 1);
    }
    doc.coloring = std::move(c);
  } else if (j.contains("alphabet_size")) {
    malformed("alphabet_size given without colors");
  }
  if (j.contains("metadata")) doc.metadata = j["metadata"];

  auto violations = validate(Rooted{doc.graph, doc.root.value_or(0), doc.coloring});
  if (doc.root && doc.graph.size() == 0) violations.push_back("root given for an empty graph");
  if (!violations.empty()) throw validation_error(std::move(violations));
  return doc;
}

inline GraphDocument parse_graph(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    detail::malformed(e.what());
  }
  return graph_from_json(j);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw error("cannot write " + path);
  out << content;
}

inline GraphDocument read_graph(const std::string& path) { return parse_graph(read_file(path)); }
inline void write_graph(const GraphDocument& doc, const std::string& path) { write_file(path, dump_graph(doc)); }

// ---------------------------------------------------------------------------
// Ball distributions

inline std::string base64_encode(std::string_view bytes) {
  namespace b64 = boost::beast::detail::base64;
  std::string out(b64::encoded_size(bytes.size()), '\0');
  out.resize(b64::encode(out.data(), bytes.data(), bytes.size()));
  return out;
}

inline std::string base64_decode(std::string_view text) {
  namespace b64 = boost::beast::detail::base64;
  std::string out(b64::decoded_size(text.size()), '\0');
  const auto [written, read] = b64::decode(out.data(), text.data(), text.size());
  if (read != text.size()) throw validation_error({"malformed document: bad base64 pattern"});
  out.resize(written);
  return out;
}

inline json distribution_to_json(const BallDistribution& mu) {
  json j;
  j["radius"] = mu.radius;
  json entries = json::array();
  for (const auto& [p, w] : mu.weights)
    entries.push_back({{"pattern", base64_encode(p.encoding)}, {"num", w.numerator()}, {"den", w.denominator()}});
  j["entries"] = std::move(entries);
  return j;
}

inline std::string dump_distribution(const BallDistribution& mu) { return distribution_to_json(mu).dump() + "\n"; }

inline BallDistribution distribution_from_json(const json& j) {
  using detail::malformed;
  if (!j.is_object() || !j.contains("radius") || !j.contains("entries")) malformed("expected radius and entries");
  BallDistribution mu{detail::as_index(j["radius"], "radius"), {}};
  if (!j["entries"].is_array()) malformed("entries must be an array");
  for (const auto& e : j["entries"]) {
    if (!e.is_object() || !e.contains("pattern") || !e.contains("num") || !e.contains("den"))
      malformed("entry needs pattern, num, den");
    if (!e["pattern"].is_string()) malformed("pattern must be a base64 string");
    const auto num = detail::as_index(e["num"], "num");
    const auto den = detail::as_index(e["den"], "den");
    if (den == 0) malformed("zero denominator");
    BallPattern p{mu.radius, base64_decode(e["pattern"].get<std::string>())};
    if (!mu.weights.emplace(std::move(p), Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den))).second)
      malformed("duplicate pattern");
  }
  if (mu.total() != Rational(1)) throw validation_error({"distribution weights do not sum to 1"});
  return mu;
}

inline BallDistribution parse_distribution(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    detail::malformed(e.what());
  }
  return distribution_from_json(j);
}

/// CRC-32 of the canonical encoding, as 8 hex digits.
inline std::string pattern_hash(const BallPattern& p) {
  boost::crc_32_type crc;
  crc.process_bytes(p.encoding.data(), p.encoding.size());
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(crc.checksum()));
  return buf;
}

/// pattern_hash,num,den,frequency rows for external plotting.
inline std::string distribution_csv(const BallDistribution& mu) {
  std::string out = "pattern_hash,num,den,frequency\n";
  for (const auto& [p, w] : mu.weights) {
    char freq[32];
    std::snprintf(freq, sizeof freq, "%.12g",
                  static_cast<double>(w.numerator()) / static_cast<double>(w.denominator()));
    out += pattern_hash(p) + "," + std::to_string(w.numerator()) + "," + std::to_string(w.denominator()) + "," +
           freq + "\n";
  }
  return out;
}

}  // namespace schreier
