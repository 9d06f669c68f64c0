// Cover morphisms between separated graphs, the tree-copying construction
// that unfolds a graph until condition (F) holds, and its expansion into a
// chain of two-copy steps.

#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sepmon/graph.hpp"
#include "sepmon/monoid.hpp"

namespace sepmon {

// Surjective graph morphism that restricts to a bijection on every
// outgoing-edge fiber and carries groups onto groups.
struct CoverMap {
  SeparatedGraph src, dst;
  std::map<Token, Token> vmap;
  std::map<Token, Token> emap;
};

struct CoverVerdict {
  bool holds = false;
  std::string clause;   // violated condition, when !holds
  std::string witness;
};

inline CoverVerdict validate_cover(const SeparatedGraph& src, const SeparatedGraph& dst,
                                   const std::map<Token, Token>& vmap,
                                   const std::map<Token, Token>& emap) {
  auto fail = [](std::string clause, std::string witness) {
    return CoverVerdict{false, std::move(clause), std::move(witness)};
  };
  for (const Token& v : src.vertices()) {
    auto it = vmap.find(v);
    if (it == vmap.end()) return fail("totality", "vertex " + v + " has no image");
    if (!dst.has_vertex(it->second))
      return fail("totality", "vertex " + v + " maps outside the target");
  }
  for (const Edge& e : src.edges()) {
    auto it = emap.find(e.id);
    if (it == emap.end()) return fail("totality", "edge " + e.id + " has no image");
    if (!dst.has_edge(it->second))
      return fail("totality", "edge " + e.id + " maps outside the target");
  }
  for (const Edge& e : src.edges()) {
    const Edge& f = dst.edge(emap.at(e.id));
    if (vmap.at(e.src) != f.src || vmap.at(e.dst) != f.dst)
      return fail("homomorphism", "edge " + e.id + " does not commute with the vertex map");
  }
  {
    std::set<Token> vimg, eimg;
    for (const auto& [a, b] : vmap)
      if (src.has_vertex(a)) vimg.insert(b);
    for (const auto& [a, b] : emap)
      if (src.has_edge(a)) eimg.insert(b);
    for (const Token& v : dst.vertices())
      if (!vimg.count(v)) return fail("surjectivity", "vertex " + v + " is not hit");
    for (const Edge& e : dst.edges())
      if (!eimg.count(e.id)) return fail("surjectivity", "edge " + e.id + " is not hit");
  }
  // fiber bijections and group preservation
  for (const Token& v : src.vertices()) {
    int vi = src.vertex_index(v);
    const Token& w = vmap.at(v);
    std::set<Token> images;
    for (int ei : src.out_edges(vi)) images.insert(emap.at(src.edges()[static_cast<size_t>(ei)].id));
    if (images.size() != src.out_edges(vi).size())
      return fail("fiber-bijection", "outgoing edges of " + v + " collapse");
    if (images.size() != dst.out_edges(dst.vertex_index(w)).size())
      return fail("fiber-bijection", "outgoing fibers of " + v + " and " + w + " differ in size");
    for (const auto& grp : src.groups_at(vi)) {
      std::vector<Token> img;
      for (const Token& eid : grp) img.push_back(emap.at(eid));
      std::sort(img.begin(), img.end());
      bool found = false;
      for (const auto& tgrp : dst.groups_at(w))
        if (tgrp == img) found = true;
      if (!found)
        return fail("group-preservation", "a group at " + v + " does not map onto a group at " + w);
    }
  }
  return CoverVerdict{true, "", ""};
}

inline CoverVerdict validate_cover(const CoverMap& c) {
  return validate_cover(c.src, c.dst, c.vmap, c.emap);
}

inline CoverMap identity_cover(const SeparatedGraph& g) {
  CoverMap c{g, g, {}, {}};
  for (const Token& v : g.vertices()) c.vmap[v] = v;
  for (const Edge& e : g.edges()) c.emap[e.id] = e.id;
  return c;
}

// Composition (inner first): inner: A -> B, outer: B -> C gives A -> C.
inline CoverMap compose(const CoverMap& inner, const CoverMap& outer) {
  if (!(inner.dst == outer.src)) throw std::invalid_argument("covers do not compose");
  CoverMap c{inner.src, outer.dst, {}, {}};
  for (const auto& [a, b] : inner.vmap) c.vmap[a] = outer.vmap.at(b);
  for (const auto& [a, b] : inner.emap) c.emap[a] = outer.emap.at(b);
  return c;
}

namespace detail {

// Incoming coarse groups of a component: bar groups (from other components)
// with at least one edge landing in it, sorted by (emitting component label,
// group index).
inline std::vector<BarGroup> incoming_bar_groups(const SeparatedGraph& g,
                                                 const AdaptableDecoration& dec, int comp) {
  std::vector<BarGroup> in;
  for (const BarGroup& b : bar_separation(g, dec)) {
    if (b.comp == comp) continue;
    for (const Token& eid : b.edges)
      if (dec.poset.component_of.at(g.edge(eid).dst) == comp) {
        in.push_back(b);
        break;
      }
  }
  std::sort(in.begin(), in.end(), [&](const BarGroup& a, const BarGroup& b) {
    const Token& la = dec.poset.label(a.comp);
    const Token& lb = dec.poset.label(b.comp);
    if (la != lb) return la < lb;
    return a.group < b.group;
  });
  return in;
}

inline Token fresh_token(const std::set<Token>& used, const Token& base, int j) {
  std::string sep = "#";
  while (true) {
    Token t = base + sep + std::to_string(j);
    if (!used.count(t)) return t;
    sep += "#";
  }
}

// One unfolding step: replace the tree of the given component by `parts`
// disjoint copies and reroute the i-th batch of incoming groups to copy i.
// Returns the new graph plus the one-step cover onto the old one.
inline std::pair<SeparatedGraph, CoverMap> copy_tree_step(
    const SeparatedGraph& g, const AdaptableDecoration& dec, int comp,
    const std::vector<std::vector<BarGroup>>& parts) {
  const Token& root = dec.poset.label(comp);
  std::set<Token> tree = tree_vertices(g, dec, root);
  const int r = static_cast<int>(parts.size());

  std::set<Token> used_v(g.vertices().begin(), g.vertices().end());
  std::set<Token> used_e;
  for (const Edge& e : g.edges()) used_e.insert(e.id);

  // copy naming, deterministic
  std::vector<std::map<Token, Token>> vcopy(static_cast<size_t>(r)), ecopy(static_cast<size_t>(r));
  for (int j = 0; j < r; ++j) {
    for (const Token& w : tree) {
      Token t = fresh_token(used_v, w, j + 1);
      used_v.insert(t);
      vcopy[static_cast<size_t>(j)][w] = t;
    }
    for (const Edge& e : g.edges())
      if (tree.count(e.src)) {
        Token t = fresh_token(used_e, e.id, j + 1);
        used_e.insert(t);
        ecopy[static_cast<size_t>(j)][e.id] = t;
      }
  }

  // which incoming group goes to which copy
  std::map<Token, int> copy_of_edge;  // rerouted connector edge -> copy index
  for (int j = 0; j < r; ++j)
    for (const BarGroup& b : parts[static_cast<size_t>(j)])
      for (const Token& eid : b.edges)
        if (tree.count(g.edge(eid).dst)) copy_of_edge[eid] = j;

  std::vector<Token> vertices;
  std::vector<Edge> edges;
  std::map<Token, std::vector<std::vector<Token>>> groups;
  CoverMap cover;

  for (const Token& v : g.vertices()) {
    if (!tree.count(v)) {
      vertices.push_back(v);
      cover.vmap[v] = v;
    }
  }
  for (int j = 0; j < r; ++j)
    for (const auto& [w, t] : vcopy[static_cast<size_t>(j)]) {
      vertices.push_back(t);
      cover.vmap[t] = w;
    }

  auto map_vertex = [&](const Token& w, int j) {
    return tree.count(w) ? vcopy[static_cast<size_t>(j)].at(w) : w;
  };

  for (const Edge& e : g.edges()) {
    if (tree.count(e.src)) continue;  // replaced by its copies
    Token dst = e.dst;
    auto it = copy_of_edge.find(e.id);
    if (it != copy_of_edge.end()) dst = vcopy[static_cast<size_t>(it->second)].at(e.dst);
    edges.push_back(Edge{e.id, e.src, dst});
    cover.emap[e.id] = e.id;
  }
  for (int j = 0; j < r; ++j)
    for (const Edge& e : g.edges()) {
      if (!tree.count(e.src)) continue;
      Token id = ecopy[static_cast<size_t>(j)].at(e.id);
      edges.push_back(Edge{id, map_vertex(e.src, j), map_vertex(e.dst, j)});
      cover.emap[id] = e.id;
    }

  for (const Token& v : g.vertices()) {
    const auto& gs = g.groups_at(v);
    if (gs.empty()) continue;
    if (!tree.count(v)) {
      groups[v] = gs;  // edge ids unchanged, only ranges moved
    } else {
      for (int j = 0; j < r; ++j) {
        std::vector<std::vector<Token>> copied;
        for (const auto& grp : gs) {
          std::vector<Token> cg;
          for (const Token& eid : grp) cg.push_back(ecopy[static_cast<size_t>(j)].at(eid));
          copied.push_back(std::move(cg));
        }
        groups[vcopy[static_cast<size_t>(j)].at(v)] = std::move(copied);
      }
    }
  }

  SeparatedGraph out(std::move(vertices), std::move(edges), std::move(groups));
  cover.src = out;
  cover.dst = g;
  return {std::move(out), std::move(cover)};
}

// Components violating condition (F) (two or more incoming coarse groups),
// restricted to the ones minimal among violators; returns the lex-least such
// component, or -1.
inline int next_violator(const SeparatedGraph& g, const AdaptableDecoration& dec) {
  std::vector<int> violators;
  for (int c = 0; c < dec.poset.size(); ++c)
    if (incoming_bar_groups(g, dec, c).size() >= 2) violators.push_back(c);
  int best = -1;
  for (int c : violators) {
    bool minimal = true;
    for (int d : violators)
      if (d != c && dec.poset.lt(d, c)) minimal = false;
    if (!minimal) continue;
    if (best < 0 || dec.poset.label(c) < dec.poset.label(best)) best = c;
  }
  return best;
}

}  // namespace detail

// Unfolds the graph bottom-up: every component fed by r >= 2 coarse groups
// has its tree replaced by r disjoint copies, one per feeding group. The
// result satisfies condition (F) and covers the input.
inline std::pair<SeparatedGraph, CoverMap> build_auxiliary(const SeparatedGraph& g,
                                                           const AdaptableDecoration& dec) {
  (void)dec;
  SeparatedGraph cur = g;
  CoverMap cover = identity_cover(g);
  while (true) {
    AdaptableDecoration d = classify_adaptable(cur);
    int comp = detail::next_violator(cur, d);
    if (comp < 0) break;
    auto in = detail::incoming_bar_groups(cur, d, comp);
    std::vector<std::vector<BarGroup>> parts;
    for (const BarGroup& b : in) parts.push_back({b});
    auto [next, step] = detail::copy_tree_step(cur, d, comp, parts);
    cover = compose(step, cover);
    cur = std::move(next);
  }
  cover.src = cur;
  return {cur, std::move(cover)};
}

// One two-copy unfolding step together with the three distinguished vertices
// of the resulting pair: the two copies of the tree root and its image.
struct Crown {
  Token v1, v2, v;
};

struct CrownedChain {
  std::vector<SeparatedGraph> graphs;  // F_0 ... F_m, F_m == input
  std::vector<CoverMap> maps;          // maps[i] : graphs[i] -> graphs[i+1]
  std::vector<Crown> crowns;           // crowns[i] belongs to maps[i]
};

// Same unfolding, but every multiplicity-r step is expanded into r - 1
// two-copy steps; the first graph of the chain satisfies condition (F).
inline CrownedChain build_crowned_chain(const SeparatedGraph& g, const AdaptableDecoration& dec) {
  (void)dec;
  std::vector<SeparatedGraph> graphs{g};   // coarse to fine
  std::vector<CoverMap> maps;              // maps[i] : graphs[i+1] -> graphs[i]
  std::vector<Crown> crowns;
  SeparatedGraph cur = g;
  while (true) {
    AdaptableDecoration d = classify_adaptable(cur);
    int comp = detail::next_violator(cur, d);
    if (comp < 0) break;
    auto in = detail::incoming_bar_groups(cur, d, comp);
    // split off the first feeding group; the rest share the second copy and
    // are handled by later iterations
    std::vector<std::vector<BarGroup>> parts(2);
    parts[0] = {in.front()};
    parts[1].assign(in.begin() + 1, in.end());
    const Token root = d.poset.label(comp);
    auto [next, step] = detail::copy_tree_step(cur, d, comp, parts);
    crowns.push_back(Crown{Token(), Token(), root});
    // recover the copy names of the root
    Crown& cr = crowns.back();
    for (const auto& [a, b] : step.vmap)
      if (b == root && a != root) {
        if (cr.v1.empty() || a < cr.v1) {
          cr.v2 = cr.v1;
          cr.v1 = a;
        } else if (cr.v2.empty() || a < cr.v2) {
          cr.v2 = a;
        }
      }
    maps.push_back(step);
    graphs.push_back(next);
    cur = std::move(next);
  }
  CrownedChain chain;
  for (auto it = graphs.rbegin(); it != graphs.rend(); ++it) chain.graphs.push_back(*it);
  for (auto it = maps.rbegin(); it != maps.rend(); ++it) chain.maps.push_back(*it);
  for (auto it = crowns.rbegin(); it != crowns.rend(); ++it) chain.crowns.push_back(*it);
  return chain;
}

// Generator mapping a_w -> a_{vmap(w)} of a validated cover; relations are
// verified in the target monoid and a failure is an internal error.
inline GeneratorMapping induced_monoid_hom(const CoverMap& c) {
  GeneratorMapping m;
  for (const Token& v : c.src.vertices()) m[v] = MonoidElement::generator(c.dst, c.vmap.at(v));
  HomVerdict hv = hom_is_well_defined(c.src, c.dst, m);
  if (hv.status != HomStatus::Holds)
    throw std::logic_error("cover-induced mapping fails relation " + hv.relation);
  return m;
}

}  // namespace sepmon
