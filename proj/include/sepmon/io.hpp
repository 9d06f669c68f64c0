// JSON ingestion and serialization for graphs, elements and covers, plus
// deterministic DOT rendering.

#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "sepmon/cover.hpp"
#include "sepmon/graph.hpp"
#include "sepmon/monoid.hpp"

namespace sepmon {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline SeparatedGraph graph_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("top level must be an object");
  if (!j.contains("vertices") || !j["vertices"].is_array())
    throw ParseError("missing \"vertices\" array");
  std::vector<Token> vertices;
  for (const auto& v : j["vertices"]) {
    if (!v.is_string()) throw ParseError("vertex tokens must be strings");
    vertices.push_back(v.get<Token>());
  }
  std::vector<Edge> edges;
  if (j.contains("edges")) {
    if (!j["edges"].is_array()) throw ParseError("\"edges\" must be an array");
    for (const auto& e : j["edges"]) {
      if (!e.is_object() || !e.contains("id") || !e.contains("src") || !e.contains("dst"))
        throw ParseError("edges need \"id\", \"src\" and \"dst\"");
      edges.push_back(Edge{e["id"].get<Token>(), e["src"].get<Token>(), e["dst"].get<Token>()});
    }
  }
  std::map<Token, std::vector<std::vector<Token>>> groups;
  if (j.contains("groups")) {
    if (!j["groups"].is_object()) throw ParseError("\"groups\" must be an object");
    for (const auto& [v, gs] : j["groups"].items()) {
      if (!gs.is_array()) throw ParseError("groups of " + v + " must be an array of arrays");
      std::vector<std::vector<Token>> parsed;
      for (const auto& grp : gs) {
        if (!grp.is_array()) throw ParseError("groups of " + v + " must be an array of arrays");
        std::vector<Token> ids;
        for (const auto& id : grp) ids.push_back(id.get<Token>());
        parsed.push_back(std::move(ids));
      }
      groups[v] = std::move(parsed);
    }
  }
  return build_separated_graph(std::move(vertices), std::move(edges), std::move(groups));
}

inline SeparatedGraph parse_graph(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what());
  }
  return graph_from_json(j);
}

inline SeparatedGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_graph(buf.str());
}

inline nlohmann::json graph_to_json(const SeparatedGraph& g) {
  nlohmann::json j;
  j["vertices"] = g.vertices();
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : g.edges())
    j["edges"].push_back({{"id", e.id}, {"src", e.src}, {"dst", e.dst}});
  nlohmann::json groups = nlohmann::json::object();
  for (const Token& v : g.vertices())
    if (!g.groups_at(v).empty()) groups[v] = g.groups_at(v);
  j["groups"] = std::move(groups);
  return j;
}

inline nlohmann::json element_to_json(const MonoidElement& x) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [v, k] : x.support_map()) j[v] = k;
  return j;
}

inline nlohmann::json cover_to_json(const CoverMap& c) {
  return nlohmann::json{{"vmap", c.vmap}, {"emap", c.emap}};
}

namespace detail {

inline const char* palette(size_t k) {
  static const char* colors[8] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  return colors[k % 8];
}

}  // namespace detail

// DOT rendering: vertices sorted by token, one color per group index
// (8-color palette, cycling), connectors drawn bold.
inline std::string dot_graph(const SeparatedGraph& g) {
  AdaptableDecoration dec = classify_adaptable(g);
  std::set<Token> connectors;
  for (const auto& [c, conns] : dec.connectors)
    for (const Token& eid : conns) connectors.insert(eid);
  std::ostringstream os;
  os << "digraph {\n";
  for (const Token& v : g.vertices()) os << "  \"" << v << "\";\n";
  for (const Token& v : g.vertices()) {
    const auto& gs = g.groups_at(v);
    for (size_t k = 0; k < gs.size(); ++k)
      for (const Token& eid : gs[k]) {
        const Edge& e = g.edge(eid);
        os << "  \"" << e.src << "\" -> \"" << e.dst << "\" [label=\"" << e.id
           << "\", color=\"" << detail::palette(k) << "\"";
        if (connectors.count(eid)) os << ", style=bold";
        os << "];\n";
      }
  }
  os << "}\n";
  return os.str();
}

inline std::string dot_reduced(const SeparatedGraph& g) {
  AdaptableDecoration dec = classify_adaptable(g);
  ReducedGraph r = reduced_graph(g, dec);
  std::ostringstream os;
  os << "digraph {\n";
  for (const Token& v : r.vertices) os << "  \"" << v << "\";\n";
  for (const Edge& e : r.edges)
    os << "  \"" << e.src << "\" -> \"" << e.dst << "\" [label=\"" << e.id << "\", style=bold];\n";
  os << "}\n";
  return os.str();
}

inline std::string dot_poset(const SeparatedGraph& g) {
  CondensationPoset poset = condensation(g);
  std::ostringstream os;
  os << "digraph {\n";
  std::vector<Token> labels;
  for (int c = 0; c < poset.size(); ++c) labels.push_back(poset.label(c));
  std::vector<int> order(static_cast<size_t>(poset.size()));
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return labels[static_cast<size_t>(a)] < labels[static_cast<size_t>(b)]; });
  for (int c : order) os << "  \"" << labels[static_cast<size_t>(c)] << "\";\n";
  // covering relations only
  for (int a : order)
    for (int b : order) {
      if (!poset.lt(a, b)) continue;
      bool covering = true;
      for (int m = 0; m < poset.size(); ++m)
        if (poset.lt(a, m) && poset.lt(m, b)) covering = false;
      if (covering)
        os << "  \"" << labels[static_cast<size_t>(b)] << "\" -> \""
           << labels[static_cast<size_t>(a)] << "\";\n";
    }
  os << "}\n";
  return os.str();
}

}  // namespace sepmon
