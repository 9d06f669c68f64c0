// Crowned pairs (a cover identifying two disjoint tree copies over one
// tree), the pushout monoid presented by identifying the copies, and the
// bounded verification that this pushout is the monoid of the coarser graph.

#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sepmon/cover.hpp"
#include "sepmon/graph.hpp"
#include "sepmon/monoid.hpp"

namespace sepmon {

struct InvalidPair : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CrownedPair {
  SeparatedGraph g1, g2;
  CoverMap cover;  // g1 -> g2
  Token v1, v2, v;
  std::set<Token> t1, t2;  // full trees of v1, v2 in g1
  std::set<Token> tv;      // full tree of v in g2
  std::set<Token> e1prime, e2prime;  // complements of the trees
};

inline CrownedPair make_crowned_pair(const SeparatedGraph& g1, const SeparatedGraph& g2,
                                     const CoverMap& cover, const Token& v1, const Token& v2) {
  CrownedPair p{g1, g2, cover, v1, v2, {}, {}, {}, {}, {}, {}};
  if (!cover.vmap.count(v1) || !cover.vmap.count(v2))
    throw InvalidPair("distinguished vertices are not in the cover");
  p.v = cover.vmap.at(v1);
  AdaptableDecoration d1 = classify_adaptable(g1);
  AdaptableDecoration d2 = classify_adaptable(g2);
  p.t1 = tree_vertices(g1, d1, v1);
  p.t2 = tree_vertices(g1, d1, v2);
  p.tv = tree_vertices(g2, d2, p.v);
  for (const Token& w : g1.vertices())
    if (!p.t1.count(w) && !p.t2.count(w)) p.e1prime.insert(w);
  for (const Token& w : g2.vertices())
    if (!p.tv.count(w)) p.e2prime.insert(w);
  return p;
}

struct PairVerdict {
  bool holds = false;
  std::string clause;
  std::string witness;
};

namespace detail {

// Bar groups of g emitted by the component of each vertex, keyed by component.
inline std::map<int, std::vector<BarGroup>> bars_by_component(const SeparatedGraph& g,
                                                              const AdaptableDecoration& dec) {
  std::map<int, std::vector<BarGroup>> out;
  for (const BarGroup& b : bar_separation(g, dec)) out[b.comp].push_back(b);
  return out;
}

inline bool group_hits_component(const SeparatedGraph& g, const AdaptableDecoration& dec,
                                 const BarGroup& b, int comp) {
  for (const Token& eid : b.edges)
    if (dec.poset.component_of.at(g.edge(eid).dst) == comp) return true;
  return false;
}

inline std::set<Token> image_edge_set(const CoverMap& c, const std::vector<Token>& edges) {
  std::set<Token> out;
  for (const Token& e : edges) out.insert(c.emap.at(e));
  return out;
}

}  // namespace detail

// Checks clauses (i)-(v) of the crowned-pair definition, then re-derives the
// structural consequences (free/regular preservation, group bijections,
// unique feeders inside the trees, range splitting) as sanity assertions.
inline PairVerdict validate_crowned_pair(const CrownedPair& p) {
  auto fail = [](std::string clause, std::string witness) {
    return PairVerdict{false, std::move(clause), std::move(witness)};
  };
  CoverVerdict cv = validate_cover(p.cover);
  if (!cv.holds) return fail("cover", cv.clause + ": " + cv.witness);
  if (p.v1 == p.v2) return fail("(ii)", "the two distinguished vertices coincide");
  if (p.cover.vmap.at(p.v1) != p.cover.vmap.at(p.v2))
    return fail("vertices", "v1 and v2 have different images");

  AdaptableDecoration d1 = classify_adaptable(p.g1);
  AdaptableDecoration d2 = classify_adaptable(p.g2);
  auto bars1 = bar_separation(p.g1, d1);
  auto bars2 = bar_separation(p.g2, d2);
  const int cv2 = d2.poset.component_of.at(p.v);

  // (i): at most one foreign coarse group into each component strictly
  // below v in g2
  for (int c = 0; c < d2.poset.size(); ++c) {
    if (!d2.poset.lt(c, cv2)) continue;
    int feeders = 0;
    for (const BarGroup& b : bars2)
      if (b.comp != c && detail::group_hits_component(p.g2, d2, b, c)) ++feeders;
    if (feeders > 1)
      return fail("(i)", "component of " + d2.poset.label(c) + " has " +
                             std::to_string(feeders) + " feeding groups");
  }

  // (ii): disjoint trees
  for (const Token& w : p.t1)
    if (p.t2.count(w)) return fail("(ii)", "trees share vertex " + w);

  // (iii): the cover restricts to isomorphisms T(v_i) -> T(v)
  for (const std::set<Token>* t : {&p.t1, &p.t2}) {
    std::set<Token> vimg;
    for (const Token& w : *t) vimg.insert(p.cover.vmap.at(w));
    if (vimg.size() != t->size() || vimg != p.tv)
      return fail("(iii)", "tree vertices do not biject onto the tree of " + p.v);
    std::set<Token> eimg, etarget;
    for (const Edge& e : p.g1.edges())
      if (t->count(e.src)) eimg.insert(p.cover.emap.at(e.id));
    for (const Edge& e : p.g2.edges())
      if (p.tv.count(e.src)) etarget.insert(e.id);
    size_t own = 0;
    for (const Edge& e : p.g1.edges())
      if (t->count(e.src)) ++own;
    if (eimg.size() != own || eimg != etarget)
      return fail("(iii)", "tree edges do not biject onto the tree of " + p.v);
  }

  // (iv): the cover restricts to a graph isomorphism between the tree
  // complements
  {
    std::set<Token> vimg;
    for (const Token& w : p.e1prime) vimg.insert(p.cover.vmap.at(w));
    if (vimg.size() != p.e1prime.size() || vimg != p.e2prime)
      return fail("(iv)", "complement vertices do not biject");
    std::set<Token> eimg, etarget;
    size_t own = 0;
    for (const Edge& e : p.g1.edges())
      if (p.e1prime.count(e.src) && p.e1prime.count(e.dst)) {
        eimg.insert(p.cover.emap.at(e.id));
        ++own;
      }
    for (const Edge& e : p.g2.edges())
      if (p.e2prime.count(e.src) && p.e2prime.count(e.dst)) etarget.insert(e.id);
    if (eimg.size() != own || eimg != etarget)
      return fail("(iv)", "complement edges do not biject");
  }

  // (v): a coarse group from the complement feeding the identified
  // component must hit exactly one of the two copies
  const int c1 = d1.poset.component_of.at(p.v1);
  const int c2 = d1.poset.component_of.at(p.v2);
  for (const BarGroup& b : bars1) {
    const Token& src = d1.poset.label(b.comp);
    if (!p.e1prime.count(src)) continue;
    bool h1 = detail::group_hits_component(p.g1, d1, b, c1);
    bool h2 = detail::group_hits_component(p.g1, d1, b, c2);
    if (h1 && h2)
      return fail("(v)", "a group at " + src + " feeds both copies of " + p.v);
  }

  // structural consequences of (i)-(v)
  // free components map to free components and conversely
  for (const Token& w : p.g1.vertices()) {
    bool f1 = d1.is_free(d1.poset.component_of.at(w));
    bool f2 = d2.is_free(d2.poset.component_of.at(p.cover.vmap.at(w)));
    if (f1 != f2) return fail("lemma-free", "free/regular mismatch at " + w);
  }
  // every coarse group maps bijectively onto a coarse group of the image
  // component, and distinct groups at one component have distinct images
  {
    std::map<int, std::set<std::set<Token>>> images_at;
    for (const BarGroup& b : bars1) {
      std::set<Token> img = detail::image_edge_set(p.cover, b.edges);
      if (img.size() != b.edges.size())
        return fail("lemma-bijection", "group of " + d1.poset.label(b.comp) + " collapses");
      int tc = d2.poset.component_of.at(p.cover.vmap.at(d1.poset.label(b.comp)));
      bool found = false;
      for (const BarGroup& tb : bars2)
        if (tb.comp == tc && std::set<Token>(tb.edges.begin(), tb.edges.end()) == img)
          found = true;
      if (!found)
        return fail("lemma-bijection",
                    "image of a group of " + d1.poset.label(b.comp) + " is not a group");
      if (!p.e1prime.count(d1.poset.label(b.comp))) continue;
      if (!images_at[d1.poset.component_of.at(d1.poset.label(b.comp))].insert(img).second)
        return fail("lemma-unique-lift", "two groups of " + d1.poset.label(b.comp) +
                                             " share an image");
    }
  }
  // inside each strict tree, exactly one feeder and it comes from the tree
  for (int i = 0; i < 2; ++i) {
    const std::set<Token>& t = i == 0 ? p.t1 : p.t2;
    const Token& root = i == 0 ? p.v1 : p.v2;
    int rc = d1.poset.component_of.at(root);
    for (int c = 0; c < d1.poset.size(); ++c) {
      if (!d1.poset.lt(c, rc)) continue;
      if (!t.count(d1.poset.label(c))) continue;
      int feeders = 0;
      bool from_tree = true;
      for (const BarGroup& b : bars1)
        if (b.comp != c && detail::group_hits_component(p.g1, d1, b, c)) {
          ++feeders;
          if (!t.count(d1.poset.label(b.comp))) from_tree = false;
        }
      if (feeders != 1 || !from_tree)
        return fail("lemma-tree-feeder",
                    "component of " + d1.poset.label(c) + " is not fed once from its tree");
    }
  }
  // ranges meeting a tree from outside only touch the root component
  for (const BarGroup& b : bars1) {
    if (!p.e1prime.count(d1.poset.label(b.comp))) continue;
    for (int i = 0; i < 2; ++i) {
      const std::set<Token>& t = i == 0 ? p.t1 : p.t2;
      int rc = d1.poset.component_of.at(i == 0 ? p.v1 : p.v2);
      for (const Token& eid : b.edges) {
        const Token& dst = p.g1.edge(eid).dst;
        if (t.count(dst) && d1.poset.component_of.at(dst) != rc)
          return fail("lemma-range-split",
                      "edge " + eid + " enters a tree below its root component");
      }
    }
  }
  return PairVerdict{true, "", ""};
}

// The pushout monoid presented as the separated graph on vertex classes:
// the tree of v2 is dropped and its vertices are identified with the
// matching vertices of the tree of v1.
struct PushoutPresentation {
  SeparatedGraph graph;             // presentation of Q
  std::map<Token, Token> class_of;  // g1 vertex -> class token
};

struct PushoutResult {
  PushoutPresentation pres;
  GeneratorMapping theta;  // M(g1) -> Q
};

inline PushoutResult crowned_pushout(const CrownedPair& p) {
  PairVerdict pv = validate_crowned_pair(p);
  if (!pv.holds) throw InvalidPair("not a crowned pair: " + pv.clause + " " + pv.witness);

  // psi: T0(v1) -> T0(v2) through the two tree isomorphisms
  std::map<Token, Token> into_t2;
  for (const Token& w : p.t2) into_t2[p.cover.vmap.at(w)] = w;
  std::map<Token, Token> psi;
  for (const Token& w : p.t1) psi[w] = into_t2.at(p.cover.vmap.at(w));

  PushoutResult out;
  std::map<Token, Token>& cls = out.pres.class_of;
  for (const Token& w : p.g1.vertices()) cls[w] = w;
  for (const auto& [a, b] : psi) {
    cls[a] = std::min(a, b);
    cls[b] = std::min(a, b);
  }

  // keep every vertex outside the dropped tree, with ranges reclassified
  std::set<Token> verts;
  std::vector<Edge> edges;
  std::map<Token, std::vector<std::vector<Token>>> groups;
  for (const Token& w : p.g1.vertices())
    if (!p.t2.count(w)) verts.insert(cls.at(w));
  for (const Edge& e : p.g1.edges())
    if (!p.t2.count(e.src)) edges.push_back(Edge{e.id, cls.at(e.src), cls.at(e.dst)});
  for (const Token& w : p.g1.vertices()) {
    if (p.t2.count(w) || p.g1.groups_at(w).empty()) continue;
    groups[cls.at(w)] = p.g1.groups_at(w);
  }
  out.pres.graph = SeparatedGraph(std::vector<Token>(verts.begin(), verts.end()),
                                  std::move(edges), std::move(groups));

  for (const Token& w : p.g1.vertices())
    out.theta[w] = MonoidElement::generator(out.pres.graph, cls.at(w));
  HomVerdict hv = hom_is_well_defined(p.g1, out.pres.graph, out.theta);
  if (hv.status != HomStatus::Holds)
    throw std::logic_error("pushout projection fails relation " + hv.relation);
  return out;
}

// rho: Q -> M(g2), sending each class to the generator of the common image.
inline GeneratorMapping pushout_retraction(const CrownedPair& p, const PushoutResult& q) {
  GeneratorMapping rho;
  for (const auto& [w, c] : q.pres.class_of) {
    if (rho.count(c)) continue;
    rho[c] = MonoidElement::generator(p.g2, p.cover.vmap.at(w));
  }
  return rho;
}

// gamma: M(g2) -> Q, the explicit section: unique preimage outside the tree,
// tree preimage (either copy, they share a class) inside.
inline GeneratorMapping pushout_section(const CrownedPair& p, const PushoutResult& q) {
  std::map<Token, Token> pre;  // g2 vertex -> g1 preimage
  for (const Token& w : p.g1.vertices())
    if (!p.t2.count(w)) pre[p.cover.vmap.at(w)] = w;  // e1' and t1 cover g2 once
  GeneratorMapping gamma;
  for (const Token& w : p.g2.vertices())
    gamma[w] = MonoidElement::generator(q.pres.graph, q.pres.class_of.at(pre.at(w)));
  return gamma;
}

enum class PushoutVerdict { Verified, Fails, Unknown };

struct PushoutReport {
  PushoutVerdict status = PushoutVerdict::Verified;
  std::string witness;
  std::vector<std::string> unknowns;
  // relation cases seen while checking the section: inside the tree,
  // disjoint from it, or split across it
  long long tree_relations = 0;
  long long outside_relations = 0;
  long long mixed_relations = 0;
};

inline PushoutReport verify_pushout_with_section(const CrownedPair& p, const PushoutResult& q,
                                                 const GeneratorMapping& gamma,
                                                 Bounds bounds = {}) {
  PushoutReport rep;
  auto fails = [&](std::string w) {
    rep.status = PushoutVerdict::Fails;
    rep.witness = std::move(w);
    return rep;
  };

  GeneratorMapping rho = pushout_retraction(p, q);
  HomVerdict hr = hom_is_well_defined(q.pres.graph, p.g2, rho, bounds);
  if (hr.status == HomStatus::Fails) return fails("retraction breaks relation " + hr.relation);
  if (hr.status == HomStatus::Unknown)
    rep.unknowns.insert(rep.unknowns.end(), hr.unknown_relations.begin(),
                        hr.unknown_relations.end());

  // check the section relation by relation, logging the three cases
  MonoidCalc calc_q(q.pres.graph, bounds);
  for (const Token& w : p.g2.vertices()) {
    for (const auto& grp : p.g2.groups_at(w)) {
      bool in_tree = p.tv.count(w) > 0;
      bool hits_tree = false;
      MonoidElement rhs(q.pres.graph);
      for (const Token& eid : grp) {
        const Token& dst = p.g2.edge(eid).dst;
        if (p.tv.count(dst)) hits_tree = true;
        rhs += gamma.at(dst);
      }
      if (in_tree)
        ++rep.tree_relations;
      else if (hits_tree)
        ++rep.mixed_relations;
      else
        ++rep.outside_relations;
      EqVerdict ev = calc_q.equal(gamma.at(w), rhs);
      if (ev.status == EqStatus::UnequalCertified)
        return fails("section breaks the relation of " + w + " at group {" + grp.front() + ",...}");
      if (ev.status == EqStatus::Unknown)
        rep.unknowns.push_back("section relation of " + w + " undecided");
    }
  }

  // exact generator identities, not bounded checks
  for (const Token& c : q.pres.graph.vertices()) {
    const MonoidElement& img = rho.at(c);
    Token target;
    for (const Token& w : p.g2.vertices())
      if (img == MonoidElement::generator(p.g2, w)) target = w;
    if (target.empty() || !(gamma.at(target) == MonoidElement::generator(q.pres.graph, c)))
      return fails("gamma . rho moves the class " + c);
  }
  for (const Token& w : p.g2.vertices()) {
    const MonoidElement& img = gamma.at(w);
    Token cls;
    for (const Token& c : q.pres.graph.vertices())
      if (img == MonoidElement::generator(q.pres.graph, c)) cls = c;
    if (cls.empty() || !(rho.at(cls) == MonoidElement::generator(p.g2, w)))
      return fails("rho . gamma moves the generator " + w);
  }

  if (!rep.unknowns.empty()) rep.status = PushoutVerdict::Unknown;
  return rep;
}

inline PushoutReport verify_pushout_is_target(const CrownedPair& p, Bounds bounds = {}) {
  PushoutResult q = crowned_pushout(p);
  return verify_pushout_with_section(p, q, pushout_section(p, q), bounds);
}

}  // namespace sepmon
