// Separated graphs: data model, validation, condensation posets, the
// adaptability classification, condition (F), hereditary/C-saturated subsets
// and the restriction/quotient/tree constructions.

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace sepmon {

using Token = std::string;

enum class GraphErrc {
  DuplicateToken,
  DanglingEndpoint,
  GroupNotPartition,
  NotHereditary,
  NotSaturated,
  UnknownVertex,
};

class GraphError : public std::runtime_error {
 public:
  GraphError(GraphErrc code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
  GraphErrc code() const { return code_; }

 private:
  GraphErrc code_;
};

struct Edge {
  Token id;
  Token src;
  Token dst;
  bool operator==(const Edge&) const = default;
};

// A finitely separated graph (E,C): directed graph plus, for each vertex, a
// partition of its outgoing edges into nonempty groups. Immutable after
// construction; all orderings are lexicographic on tokens.
class SeparatedGraph {
 public:
  SeparatedGraph() = default;

  // groups: vertex -> ordered list of edge-id sets. Vertices without an entry
  // must be sinks.
  SeparatedGraph(std::vector<Token> vertices, std::vector<Edge> edges,
                 std::map<Token, std::vector<std::vector<Token>>> groups) {
    std::sort(vertices.begin(), vertices.end());
    for (size_t i = 1; i < vertices.size(); ++i)
      if (vertices[i] == vertices[i - 1])
        throw GraphError(GraphErrc::DuplicateToken, "duplicate vertex token " + vertices[i]);
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });
    for (size_t i = 1; i < edges.size(); ++i)
      if (edges[i].id == edges[i - 1].id)
        throw GraphError(GraphErrc::DuplicateToken, "duplicate edge token " + edges[i].id);
    vertices_ = std::move(vertices);
    edges_ = std::move(edges);
    for (size_t i = 0; i < vertices_.size(); ++i) vindex_[vertices_[i]] = static_cast<int>(i);
    for (size_t i = 0; i < edges_.size(); ++i) eindex_[edges_[i].id] = static_cast<int>(i);
    for (const Edge& e : edges_) {
      if (!vindex_.count(e.src))
        throw GraphError(GraphErrc::DanglingEndpoint, "edge " + e.id + " has unknown source " + e.src);
      if (!vindex_.count(e.dst))
        throw GraphError(GraphErrc::DanglingEndpoint, "edge " + e.id + " has unknown range " + e.dst);
    }
    out_.assign(vertices_.size(), {});
    in_.assign(vertices_.size(), {});
    for (size_t i = 0; i < edges_.size(); ++i) {
      out_[static_cast<size_t>(vindex_.at(edges_[i].src))].push_back(static_cast<int>(i));
      in_[static_cast<size_t>(vindex_.at(edges_[i].dst))].push_back(static_cast<int>(i));
    }

    groups_.assign(vertices_.size(), {});
    for (auto& [v, gs] : groups) {
      auto it = vindex_.find(v);
      if (it == vindex_.end())
        throw GraphError(GraphErrc::UnknownVertex, "groups listed for unknown vertex " + v);
      auto& dst = groups_[static_cast<size_t>(it->second)];
      for (auto g : gs) {
        std::sort(g.begin(), g.end());
        dst.push_back(std::move(g));
      }
      std::sort(dst.begin(), dst.end());
    }
    // partition check: groups at v are disjoint, nonempty, and cover s^{-1}(v)
    for (size_t vi = 0; vi < vertices_.size(); ++vi) {
      std::set<Token> seen;
      for (const auto& g : groups_[vi]) {
        if (g.empty())
          throw GraphError(GraphErrc::GroupNotPartition, "empty group at vertex " + vertices_[vi]);
        for (const Token& eid : g) {
          auto it = eindex_.find(eid);
          if (it == eindex_.end())
            throw GraphError(GraphErrc::GroupNotPartition,
                             "group at vertex " + vertices_[vi] + " names unknown edge " + eid);
          if (edges_[static_cast<size_t>(it->second)].src != vertices_[vi])
            throw GraphError(GraphErrc::GroupNotPartition,
                             "edge " + eid + " grouped at " + vertices_[vi] + " but has source " +
                                 edges_[static_cast<size_t>(it->second)].src);
          if (!seen.insert(eid).second)
            throw GraphError(GraphErrc::GroupNotPartition,
                             "edge " + eid + " appears in two groups at vertex " + vertices_[vi]);
        }
      }
      if (seen.size() != out_[vi].size())
        throw GraphError(GraphErrc::GroupNotPartition,
                         "groups at vertex " + vertices_[vi] + " do not cover its outgoing edges");
    }
    group_of_edge_.assign(edges_.size(), -1);
    for (size_t vi = 0; vi < vertices_.size(); ++vi)
      for (size_t gi = 0; gi < groups_[vi].size(); ++gi)
        for (const Token& eid : groups_[vi][gi])
          group_of_edge_[static_cast<size_t>(eindex_.at(eid))] = static_cast<int>(gi);
  }

  const std::vector<Token>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  bool has_vertex(const Token& v) const { return vindex_.count(v) != 0; }
  bool has_edge(const Token& e) const { return eindex_.count(e) != 0; }

  int vertex_index(const Token& v) const {
    auto it = vindex_.find(v);
    if (it == vindex_.end()) throw GraphError(GraphErrc::UnknownVertex, "unknown vertex " + v);
    return it->second;
  }
  int edge_index(const Token& e) const {
    auto it = eindex_.find(e);
    if (it == eindex_.end()) throw GraphError(GraphErrc::UnknownVertex, "unknown edge " + e);
    return it->second;
  }
  const Edge& edge(const Token& e) const { return edges_[static_cast<size_t>(edge_index(e))]; }

  // Edge indices leaving / entering a vertex.
  const std::vector<int>& out_edges(int vi) const { return out_[static_cast<size_t>(vi)]; }
  const std::vector<int>& in_edges(int vi) const { return in_[static_cast<size_t>(vi)]; }

  // Groups at a vertex, each a sorted list of edge ids; the group list itself
  // is sorted.
  const std::vector<std::vector<Token>>& groups_at(int vi) const { return groups_[static_cast<size_t>(vi)]; }
  const std::vector<std::vector<Token>>& groups_at(const Token& v) const {
    return groups_at(vertex_index(v));
  }
  int group_index_of_edge(int ei) const { return group_of_edge_[static_cast<size_t>(ei)]; }

  bool is_sink(int vi) const { return out_[static_cast<size_t>(vi)].empty(); }

  bool operator==(const SeparatedGraph& o) const {
    return vertices_ == o.vertices_ && edges_ == o.edges_ && groups_ == o.groups_;
  }

 private:
  std::vector<Token> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::vector<Token>>> groups_;  // per vertex index
  std::map<Token, int> vindex_;
  std::map<Token, int> eindex_;
  std::vector<std::vector<int>> out_, in_;
  std::vector<int> group_of_edge_;
};

inline SeparatedGraph build_separated_graph(std::vector<Token> vertices, std::vector<Edge> edges,
                                            std::map<Token, std::vector<std::vector<Token>>> groups) {
  return SeparatedGraph(std::move(vertices), std::move(edges), std::move(groups));
}

// Strongly connected components with the order induced by the path-way
// pre-order: [v] <= [w] iff some vertex of [w] reaches some vertex of [v].
struct CondensationPoset {
  std::vector<std::vector<Token>> components;  // each sorted; list sorted by least member
  std::vector<std::vector<bool>> leq;          // leq[i][j]: component i <= component j
  std::map<Token, int> component_of;

  int size() const { return static_cast<int>(components.size()); }
  bool le(int i, int j) const { return leq[static_cast<size_t>(i)][static_cast<size_t>(j)]; }
  bool lt(int i, int j) const { return i != j && le(i, j); }
  const Token& label(int i) const { return components[static_cast<size_t>(i)].front(); }
};

inline CondensationPoset condensation(const SeparatedGraph& g) {
  const int n = g.num_vertices();
  // Tarjan
  std::vector<int> index(static_cast<size_t>(n), -1), low(static_cast<size_t>(n), 0);
  std::vector<bool> onstack(static_cast<size_t>(n), false);
  std::vector<int> stack, comp(static_cast<size_t>(n), -1);
  int counter = 0, ncomp = 0;
  std::vector<std::vector<int>> raw_components;

  struct Frame {
    int v;
    size_t ei;
  };
  for (int root = 0; root < n; ++root) {
    if (index[static_cast<size_t>(root)] != -1) continue;
    std::vector<Frame> call{{root, 0}};
    index[static_cast<size_t>(root)] = low[static_cast<size_t>(root)] = counter++;
    stack.push_back(root);
    onstack[static_cast<size_t>(root)] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto& outs = g.out_edges(f.v);
      if (f.ei < outs.size()) {
        int w = g.vertex_index(g.edges()[static_cast<size_t>(outs[f.ei])].dst);
        ++f.ei;
        if (index[static_cast<size_t>(w)] == -1) {
          index[static_cast<size_t>(w)] = low[static_cast<size_t>(w)] = counter++;
          stack.push_back(w);
          onstack[static_cast<size_t>(w)] = true;
          call.push_back({w, 0});
        } else if (onstack[static_cast<size_t>(w)]) {
          low[static_cast<size_t>(f.v)] = std::min(low[static_cast<size_t>(f.v)], index[static_cast<size_t>(w)]);
        }
      } else {
        int v = f.v;
        call.pop_back();
        if (!call.empty())
          low[static_cast<size_t>(call.back().v)] =
              std::min(low[static_cast<size_t>(call.back().v)], low[static_cast<size_t>(v)]);
        if (low[static_cast<size_t>(v)] == index[static_cast<size_t>(v)]) {
          std::vector<int> members;
          while (true) {
            int w = stack.back();
            stack.pop_back();
            onstack[static_cast<size_t>(w)] = false;
            comp[static_cast<size_t>(w)] = ncomp;
            members.push_back(w);
            if (w == v) break;
          }
          raw_components.push_back(std::move(members));
          ++ncomp;
        }
      }
    }
  }

  // order components by lexicographically least member vertex
  std::vector<int> order(static_cast<size_t>(ncomp));
  for (int i = 0; i < ncomp; ++i) order[static_cast<size_t>(i)] = i;
  auto least = [&](int c) {
    const Token* best = nullptr;
    for (int v : raw_components[static_cast<size_t>(c)]) {
      const Token& t = g.vertices()[static_cast<size_t>(v)];
      if (!best || t < *best) best = &t;
    }
    return *best;
  };
  std::sort(order.begin(), order.end(), [&](int a, int b) { return least(a) < least(b); });
  std::vector<int> rank(static_cast<size_t>(ncomp));
  for (int i = 0; i < ncomp; ++i) rank[static_cast<size_t>(order[static_cast<size_t>(i)])] = i;

  CondensationPoset p;
  p.components.assign(static_cast<size_t>(ncomp), {});
  for (int v = 0; v < n; ++v) {
    int c = rank[static_cast<size_t>(comp[static_cast<size_t>(v)])];
    p.components[static_cast<size_t>(c)].push_back(g.vertices()[static_cast<size_t>(v)]);
    p.component_of[g.vertices()[static_cast<size_t>(v)]] = c;
  }
  for (auto& c : p.components) std::sort(c.begin(), c.end());

  // reachability closure on the condensation DAG: le[i][j] iff j reaches i
  std::vector<std::vector<bool>> reaches(static_cast<size_t>(ncomp),
                                         std::vector<bool>(static_cast<size_t>(ncomp), false));
  for (int i = 0; i < ncomp; ++i) reaches[static_cast<size_t>(i)][static_cast<size_t>(i)] = true;
  for (const Edge& e : g.edges()) {
    int a = p.component_of.at(e.src), b = p.component_of.at(e.dst);
    if (a != b) reaches[static_cast<size_t>(a)][static_cast<size_t>(b)] = true;
  }
  for (int k = 0; k < ncomp; ++k)
    for (int i = 0; i < ncomp; ++i)
      if (reaches[static_cast<size_t>(i)][static_cast<size_t>(k)])
        for (int j = 0; j < ncomp; ++j)
          if (reaches[static_cast<size_t>(k)][static_cast<size_t>(j)])
            reaches[static_cast<size_t>(i)][static_cast<size_t>(j)] = true;
  p.leq.assign(static_cast<size_t>(ncomp), std::vector<bool>(static_cast<size_t>(ncomp), false));
  for (int i = 0; i < ncomp; ++i)
    for (int j = 0; j < ncomp; ++j)
      p.leq[static_cast<size_t>(i)][static_cast<size_t>(j)] = reaches[static_cast<size_t>(j)][static_cast<size_t>(i)];
  return p;
}

enum class NotAdaptableReason {
  MultiVertexComponentWithSeparation,
  RegularVertexTooFewEdges,
  FreeGroupMissingLoop,
  FreeGroupNoConnector,
  ConnectorNotDescending,
  MinimalFreeNotSink,
};

inline const char* to_string(NotAdaptableReason r) {
  switch (r) {
    case NotAdaptableReason::MultiVertexComponentWithSeparation:
      return "MultiVertexComponentWithSeparation";
    case NotAdaptableReason::RegularVertexTooFewEdges:
      return "RegularVertexTooFewEdges";
    case NotAdaptableReason::FreeGroupMissingLoop:
      return "FreeGroupMissingLoop";
    case NotAdaptableReason::FreeGroupNoConnector:
      return "FreeGroupNoConnector";
    case NotAdaptableReason::ConnectorNotDescending:
      return "ConnectorNotDescending";
    case NotAdaptableReason::MinimalFreeNotSink:
      return "MinimalFreeNotSink";
  }
  return "?";
}

class NotAdaptableError : public std::runtime_error {
 public:
  NotAdaptableError(NotAdaptableReason reason, std::string msg)
      : std::runtime_error(std::move(msg)), reason_(reason) {}
  NotAdaptableReason reason() const { return reason_; }

 private:
  NotAdaptableReason reason_;
};

// Loop edge of a free prime, with the index of the group holding it.
struct FreeLoop {
  Token edge;
  int group;
  bool operator==(const FreeLoop&) const = default;
};

struct AdaptableDecoration {
  CondensationPoset poset;
  std::set<int> free_comps;
  std::set<int> regular_comps;
  std::map<int, std::vector<FreeLoop>> loops;        // free non-minimal p -> alpha(p,i)
  std::map<int, std::vector<Token>> connectors;      // p -> edges leaving E_p, sorted
  std::map<int, std::vector<Token>> internal_edges;  // p -> E_p^1, sorted

  bool is_free(int c) const { return free_comps.count(c) != 0; }
  bool is_minimal(int c) const {
    for (int j = 0; j < poset.size(); ++j)
      if (poset.lt(j, c)) return false;
    return true;
  }
};

// Derives the free/regular split and the loop/connector structure, or throws
// NotAdaptableError. The split is determined by the graph: a strongly
// connected component is regular when every vertex has a single group and at
// least two internal outgoing edges; a single vertex whose internal edges are
// one loop per group, each group also holding a connector, is free.
inline AdaptableDecoration classify_adaptable(const SeparatedGraph& g) {
  AdaptableDecoration dec;
  dec.poset = condensation(g);
  const CondensationPoset& p = dec.poset;

  for (int c = 0; c < p.size(); ++c) {
    const auto& members = p.components[static_cast<size_t>(c)];
    std::vector<Token> internal, connectors;
    auto in_comp = [&](const Token& v) { return p.component_of.at(v) == c; };
    for (const Token& v : members)
      for (int ei : g.out_edges(g.vertex_index(v))) {
        const Edge& e = g.edges()[static_cast<size_t>(ei)];
        (in_comp(e.dst) ? internal : connectors).push_back(e.id);
      }
    std::sort(internal.begin(), internal.end());
    std::sort(connectors.begin(), connectors.end());

    bool regular = true;
    if (members.size() > 1) {
      for (const Token& v : members) {
        int vi = g.vertex_index(v);
        if (g.groups_at(vi).size() != 1)
          throw NotAdaptableError(NotAdaptableReason::MultiVertexComponentWithSeparation,
                                  "vertex " + v + " in a multi-vertex component has " +
                                      std::to_string(g.groups_at(vi).size()) + " groups");
        int internal_out = 0;
        for (int ei : g.out_edges(vi))
          if (in_comp(g.edges()[static_cast<size_t>(ei)].dst)) ++internal_out;
        if (internal_out < 2)
          throw NotAdaptableError(NotAdaptableReason::RegularVertexTooFewEdges,
                                  "vertex " + v + " has only " + std::to_string(internal_out) +
                                      " internal outgoing edges");
      }
    } else {
      const Token& v = members.front();
      int vi = g.vertex_index(v);
      const auto& gs = g.groups_at(vi);
      auto is_loop = [&](const Token& eid) { return g.edge(eid).dst == v; };
      if (gs.empty()) {
        regular = false;  // sink: minimal free
      } else if (gs.size() == 1 &&
                 static_cast<int>(std::count_if(gs[0].begin(), gs[0].end(), is_loop)) >= 2) {
        regular = true;  // single vertex, one group, >= 2 loops
      } else {
        regular = false;
        bool any_edge_out = !g.out_edges(vi).empty();
        bool any_connector = false;
        for (const auto& grp : gs)
          for (const Token& eid : grp)
            if (!is_loop(eid)) any_connector = true;
        if (any_edge_out && !any_connector)
          throw NotAdaptableError(NotAdaptableReason::MinimalFreeNotSink,
                                  "vertex " + v + " only emits loops");
        std::vector<FreeLoop> alpha;
        for (size_t gi = 0; gi < gs.size(); ++gi) {
          int nloops = 0;
          Token loop;
          int nconn = 0;
          for (const Token& eid : gs[gi]) {
            if (is_loop(eid)) {
              ++nloops;
              loop = eid;
            } else {
              ++nconn;
            }
          }
          if (nloops != 1)
            throw NotAdaptableError(NotAdaptableReason::FreeGroupMissingLoop,
                                    "group " + std::to_string(gi) + " at free vertex " + v + " has " +
                                        std::to_string(nloops) + " loops");
          if (nconn < 1)
            throw NotAdaptableError(NotAdaptableReason::FreeGroupNoConnector,
                                    "group " + std::to_string(gi) + " at free vertex " + v +
                                        " has no connector");
          alpha.push_back(FreeLoop{loop, static_cast<int>(gi)});
        }
        dec.loops[c] = std::move(alpha);
      }
    }
    bool is_regular = members.size() > 1 || regular;
    if (members.size() == 1 && g.is_sink(g.vertex_index(members.front()))) is_regular = false;
    if (is_regular)
      dec.regular_comps.insert(c);
    else
      dec.free_comps.insert(c);
    dec.internal_edges[c] = std::move(internal);
    dec.connectors[c] = std::move(connectors);
  }

  // connectors must descend strictly (automatic for SCCs; kept as a guard)
  for (auto& [c, conns] : dec.connectors)
    for (const Token& eid : conns) {
      int q = dec.poset.component_of.at(g.edge(eid).dst);
      if (!dec.poset.lt(q, c))
        throw NotAdaptableError(NotAdaptableReason::ConnectorNotDescending,
                                "connector " + eid + " does not descend");
    }
  return dec;
}

inline bool is_adaptable(const SeparatedGraph& g) {
  try {
    classify_adaptable(g);
    return true;
  } catch (const NotAdaptableError&) {
    return false;
  }
}

// The coarsened separation \bar{C}: groups of free vertices individually,
// and one block X_{[v]} = s^{-1}([v]) per regular component. Each entry
// carries (component, group index) with group -1 for regular blocks.
struct BarGroup {
  int comp;
  int group;  // -1 for a regular component block
  std::vector<Token> edges;
};

inline std::vector<BarGroup> bar_separation(const SeparatedGraph& g, const AdaptableDecoration& dec) {
  std::vector<BarGroup> bars;
  for (int c = 0; c < dec.poset.size(); ++c) {
    const auto& members = dec.poset.components[static_cast<size_t>(c)];
    if (dec.is_free(c)) {
      const Token& v = members.front();
      const auto& gs = g.groups_at(v);
      for (size_t gi = 0; gi < gs.size(); ++gi)
        bars.push_back(BarGroup{c, static_cast<int>(gi), gs[gi]});
    } else {
      std::vector<Token> all;
      for (const Token& v : members)
        for (int ei : g.out_edges(g.vertex_index(v))) all.push_back(g.edges()[static_cast<size_t>(ei)].id);
      std::sort(all.begin(), all.end());
      bars.push_back(BarGroup{c, -1, std::move(all)});
    }
  }
  return bars;
}

// Witness for a condition-(F) failure: a component receiving edges from two
// distinct \bar{C} groups.
struct ConditionFWitness {
  int component;
  std::pair<int, int> emitter_a;  // (component, group index; -1 for regular block)
  std::pair<int, int> emitter_b;
};

struct ConditionFVerdict {
  bool holds;
  std::optional<ConditionFWitness> witness;
};

inline ConditionFVerdict check_condition_F(const SeparatedGraph& g, const AdaptableDecoration& dec) {
  auto bars = bar_separation(g, dec);
  for (int c = 0; c < dec.poset.size(); ++c) {
    std::optional<std::pair<int, int>> first;
    for (const BarGroup& b : bars) {
      if (b.comp == c) continue;
      bool hits = false;
      for (const Token& eid : b.edges)
        if (dec.poset.component_of.at(g.edge(eid).dst) == c) hits = true;
      if (!hits) continue;
      if (!first) {
        first = {b.comp, b.group};
      } else {
        return {false, ConditionFWitness{c, *first, {b.comp, b.group}}};
      }
    }
  }
  return {true, std::nullopt};
}

// A poset is a forest iff the up-set of every element is a chain.
inline bool is_forest(const CondensationPoset& p) {
  for (int i = 0; i < p.size(); ++i) {
    std::vector<int> up;
    for (int j = 0; j < p.size(); ++j)
      if (p.le(i, j)) up.push_back(j);
    for (size_t a = 0; a < up.size(); ++a)
      for (size_t b = a + 1; b < up.size(); ++b)
        if (!p.le(up[a], up[b]) && !p.le(up[b], up[a])) return false;
  }
  return true;
}

inline bool is_hereditary(const SeparatedGraph& g, const std::set<Token>& h) {
  for (const Token& v : h)
    for (int ei : g.out_edges(g.vertex_index(v)))
      if (!h.count(g.edges()[static_cast<size_t>(ei)].dst)) return false;
  return true;
}

inline bool is_c_saturated(const SeparatedGraph& g, const std::set<Token>& h) {
  for (const Token& v : g.vertices()) {
    if (h.count(v)) continue;
    for (const auto& grp : g.groups_at(v)) {
      bool all_in = true;
      for (const Token& eid : grp)
        if (!h.count(g.edge(eid).dst)) all_in = false;
      if (all_in) return false;  // r(X) subset of H forces v in H
    }
  }
  return true;
}

// Smallest hereditary C-saturated superset of the given vertex set.
inline std::set<Token> hereditary_saturated_closure(const SeparatedGraph& g, std::set<Token> h) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Token& v : std::vector<Token>(h.begin(), h.end()))
      for (int ei : g.out_edges(g.vertex_index(v))) {
        const Token& w = g.edges()[static_cast<size_t>(ei)].dst;
        if (h.insert(w).second) changed = true;
      }
    for (const Token& v : g.vertices()) {
      if (h.count(v)) continue;
      for (const auto& grp : g.groups_at(v)) {
        bool all_in = true;
        for (const Token& eid : grp)
          if (!h.count(g.edge(eid).dst)) all_in = false;
        if (all_in) {
          h.insert(v);
          changed = true;
          break;
        }
      }
    }
  }
  return h;
}

struct HereditarySet {
  std::set<Token> members;
  bool hereditary = false;
  bool c_saturated = false;
};

// All lower subsets of a poset, ordered by (size, lexicographic member list).
inline std::vector<std::set<int>> lower_subsets(const CondensationPoset& p) {
  const int n = p.size();
  std::vector<std::set<int>> out;
  // DFS over the inclusion lattice, seeded at the empty set
  std::set<std::set<int>> seen;
  std::vector<std::set<int>> work{{}};
  seen.insert({});
  while (!work.empty()) {
    std::set<int> cur = std::move(work.back());
    work.pop_back();
    out.push_back(cur);
    for (int c = 0; c < n; ++c) {
      if (cur.count(c)) continue;
      // c addable iff everything below c is already present
      bool ok = true;
      for (int d = 0; d < n; ++d)
        if (p.lt(d, c) && !cur.count(d)) ok = false;
      if (!ok) continue;
      std::set<int> next = cur;
      next.insert(c);
      if (seen.insert(next).second) work.push_back(std::move(next));
    }
  }
  std::sort(out.begin(), out.end(), [&](const std::set<int>& a, const std::set<int>& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

// Hereditary subsets of E^0 are exactly the unions of components over lower
// subsets of the condensation poset; C-saturation is checked per candidate.
inline std::vector<HereditarySet> hereditary_saturated_subsets(const SeparatedGraph& g) {
  CondensationPoset p = condensation(g);
  std::vector<HereditarySet> out;
  for (const auto& ls : lower_subsets(p)) {
    std::set<Token> members;
    for (int c : ls)
      members.insert(p.components[static_cast<size_t>(c)].begin(), p.components[static_cast<size_t>(c)].end());
    if (!is_c_saturated(g, members)) continue;
    out.push_back(HereditarySet{std::move(members), true, true});
  }
  std::sort(out.begin(), out.end(), [](const HereditarySet& a, const HereditarySet& b) {
    if (a.members.size() != b.members.size()) return a.members.size() < b.members.size();
    return a.members < b.members;
  });
  return out;
}

// Restriction (E_H, C^H) to a hereditary vertex set: vertices H, the full
// groups of every member.
inline SeparatedGraph restrict_to(const SeparatedGraph& g, const std::set<Token>& h) {
  if (!is_hereditary(g, h))
    throw GraphError(GraphErrc::NotHereditary, "restriction set is not hereditary");
  std::vector<Token> vs(h.begin(), h.end());
  std::vector<Edge> es;
  std::map<Token, std::vector<std::vector<Token>>> gs;
  for (const Token& v : vs) {
    for (int ei : g.out_edges(g.vertex_index(v))) es.push_back(g.edges()[static_cast<size_t>(ei)]);
    if (!g.groups_at(v).empty()) gs[v] = g.groups_at(v);
  }
  return SeparatedGraph(std::move(vs), std::move(es), std::move(gs));
}

// Quotient (E/H, C/H) by a hereditary C-saturated set: vertices outside H,
// edges with range outside H, groups cut down accordingly.
inline SeparatedGraph quotient(const SeparatedGraph& g, const std::set<Token>& h) {
  if (!is_hereditary(g, h)) throw GraphError(GraphErrc::NotHereditary, "quotient set is not hereditary");
  if (!is_c_saturated(g, h)) throw GraphError(GraphErrc::NotSaturated, "quotient set is not C-saturated");
  std::vector<Token> vs;
  for (const Token& v : g.vertices())
    if (!h.count(v)) vs.push_back(v);
  std::vector<Edge> es;
  for (const Edge& e : g.edges())
    if (!h.count(e.dst)) es.push_back(e);
  std::map<Token, std::vector<std::vector<Token>>> gs;
  for (const Token& v : vs) {
    std::vector<std::vector<Token>> cut;
    for (const auto& grp : g.groups_at(v)) {
      std::vector<Token> x;
      for (const Token& eid : grp)
        if (!h.count(g.edge(eid).dst)) x.push_back(eid);
      cut.push_back(std::move(x));  // nonempty by saturation
    }
    if (!cut.empty()) gs[v] = std::move(cut);
  }
  return SeparatedGraph(std::move(vs), std::move(es), std::move(gs));
}

// T(v): restriction to { w : [w] <= [v] }.
inline SeparatedGraph tree(const SeparatedGraph& g, const AdaptableDecoration& dec, const Token& v) {
  int c = dec.poset.component_of.at(v);
  std::set<Token> below;
  for (int d = 0; d < dec.poset.size(); ++d)
    if (dec.poset.le(d, c))
      below.insert(dec.poset.components[static_cast<size_t>(d)].begin(),
                   dec.poset.components[static_cast<size_t>(d)].end());
  return restrict_to(g, below);
}

// Strict tree: restriction to { w : [w] < [v] }.
inline SeparatedGraph strict_tree(const SeparatedGraph& g, const AdaptableDecoration& dec, const Token& v) {
  int c = dec.poset.component_of.at(v);
  std::set<Token> below;
  for (int d = 0; d < dec.poset.size(); ++d)
    if (dec.poset.lt(d, c))
      below.insert(dec.poset.components[static_cast<size_t>(d)].begin(),
                   dec.poset.components[static_cast<size_t>(d)].end());
  return restrict_to(g, below);
}

inline std::set<Token> tree_vertices(const SeparatedGraph& g, const AdaptableDecoration& dec,
                                     const Token& v, bool strict = false) {
  (void)g;
  int c = dec.poset.component_of.at(v);
  std::set<Token> below;
  for (int d = 0; d < dec.poset.size(); ++d)
    if (strict ? dec.poset.lt(d, c) : dec.poset.le(d, c))
      below.insert(dec.poset.components[static_cast<size_t>(d)].begin(),
                   dec.poset.components[static_cast<size_t>(d)].end());
  return below;
}

// Reduced graph: vertices are the components (labelled by least member),
// edges are the connectors with endpoints mapped to component labels.
struct ReducedGraph {
  std::vector<Token> vertices;  // component labels, sorted
  std::vector<Edge> edges;      // connector id, source label, range label
};

inline ReducedGraph reduced_graph(const SeparatedGraph& g, const AdaptableDecoration& dec) {
  ReducedGraph r;
  for (int c = 0; c < dec.poset.size(); ++c) r.vertices.push_back(dec.poset.label(c));
  std::sort(r.vertices.begin(), r.vertices.end());
  for (const auto& [c, conns] : dec.connectors)
    for (const Token& eid : conns) {
      const Edge& e = g.edge(eid);
      r.edges.push_back(Edge{eid, dec.poset.label(dec.poset.component_of.at(e.src)),
                             dec.poset.label(dec.poset.component_of.at(e.dst))});
    }
  std::sort(r.edges.begin(), r.edges.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });
  return r;
}

// Token-renaming isomorphism of separated graphs (vertex and edge bijections
// preserving sources, ranges and the group structure). Backtracking over
// vertex assignments; intended for the small graphs in this artifact.
inline bool isomorphic(const SeparatedGraph& a, const SeparatedGraph& b) {
  if (a.num_vertices() != b.num_vertices() || a.num_edges() != b.num_edges()) return false;
  const int n = a.num_vertices();
  // signature prune: (out-degree, in-degree, multiset of group sizes)
  auto sig = [](const SeparatedGraph& g, int vi) {
    std::vector<size_t> gs;
    for (const auto& grp : g.groups_at(vi)) gs.push_back(grp.size());
    std::sort(gs.begin(), gs.end());
    return std::tuple(g.out_edges(vi).size(), g.in_edges(vi).size(), gs);
  };
  std::vector<int> map_ab(static_cast<size_t>(n), -1), used(static_cast<size_t>(n), 0);

  // edge correspondence check for a complete vertex map
  auto edges_match = [&]() {
    // multiset matching per (src, dst, group shape): for each vertex of a,
    // groups must map onto groups of the image vertex
    for (int vi = 0; vi < n; ++vi) {
      int wi = map_ab[static_cast<size_t>(vi)];
      const auto& ga = a.groups_at(vi);
      const auto& gb = b.groups_at(wi);
      if (ga.size() != gb.size()) return false;
      // group of a -> multiset of image ranges; must match some group of b
      std::vector<bool> taken(gb.size(), false);
      for (const auto& grp : ga) {
        std::vector<int> ranges;
        for (const Token& eid : grp)
          ranges.push_back(map_ab[static_cast<size_t>(a.vertex_index(a.edge(eid).dst))]);
        std::sort(ranges.begin(), ranges.end());
        bool found = false;
        for (size_t j = 0; j < gb.size() && !found; ++j) {
          if (taken[j] || gb[j].size() != grp.size()) continue;
          std::vector<int> branges;
          for (const Token& eid : gb[j]) branges.push_back(b.vertex_index(b.edge(eid).dst));
          std::sort(branges.begin(), branges.end());
          if (branges == ranges) {
            taken[j] = true;
            found = true;
          }
        }
        if (!found) return false;
      }
    }
    return true;
  };

  std::function<bool(int)> go = [&](int vi) -> bool {
    if (vi == n) return edges_match();
    for (int wi = 0; wi < n; ++wi) {
      if (used[static_cast<size_t>(wi)]) continue;
      if (sig(a, vi) != sig(b, wi)) continue;
      map_ab[static_cast<size_t>(vi)] = wi;
      used[static_cast<size_t>(wi)] = 1;
      if (go(vi + 1)) return true;
      used[static_cast<size_t>(wi)] = 0;
      map_ab[static_cast<size_t>(vi)] = -1;
    }
    return false;
  };
  return go(0);
}

}  // namespace sepmon
