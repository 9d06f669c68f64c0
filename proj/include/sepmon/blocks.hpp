// Choice functions, the component families attached to a lower set of free
// vertices, building blocks, and the bounded verification that the monoid of
// a multi-group vertex is the pullback of its per-group factors.

#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sepmon/graph.hpp"
#include "sepmon/monoid.hpp"

namespace sepmon {

struct NotLower : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidChoice : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct PreconditionViolated : std::runtime_error {
  std::string which;
  explicit PreconditionViolated(std::string w)
      : std::runtime_error("precondition violated: " + w), which(std::move(w)) {}
};

// Picks one group at every free non-sink vertex outside J.
struct ChoiceFunction {
  std::map<Token, int> choice;  // domain vertex -> group index
};

namespace detail {

inline std::set<Token> free_labels(const AdaptableDecoration& dec) {
  std::set<Token> out;
  for (int c : dec.free_comps) out.insert(dec.poset.label(c));
  return out;
}

inline void require_lower_in_free(const SeparatedGraph& g, const AdaptableDecoration& dec,
                                  const std::set<Token>& j) {
  (void)g;
  std::set<Token> free = free_labels(dec);
  for (const Token& u : j)
    if (!free.count(u)) throw NotLower("member " + u + " is not a free vertex");
  for (const Token& u : j) {
    int cu = dec.poset.component_of.at(u);
    for (const Token& w : free)
      if (!j.count(w) && dec.poset.lt(dec.poset.component_of.at(w), cu))
        throw NotLower("free vertex " + w + " lies below " + u + " but is missing");
  }
}

}  // namespace detail

// Free non-sink vertices outside J, sorted.
inline std::vector<Token> choice_domain(const SeparatedGraph& g, const AdaptableDecoration& dec,
                                        const std::set<Token>& j) {
  detail::require_lower_in_free(g, dec, j);
  std::vector<Token> dom;
  for (const Token& v : detail::free_labels(dec))
    if (!j.count(v) && !g.is_sink(g.vertex_index(v))) dom.push_back(v);
  return dom;  // set iteration is already sorted
}

// All choice functions for J, lexicographic in (vertex token, group index).
inline std::vector<ChoiceFunction> all_choice_functions(const SeparatedGraph& g,
                                                        const AdaptableDecoration& dec,
                                                        const std::set<Token>& j) {
  std::vector<Token> dom = choice_domain(g, dec, j);
  std::vector<int> limits, cur(dom.size(), 0);
  for (const Token& v : dom) limits.push_back(static_cast<int>(g.groups_at(v).size()));
  std::vector<ChoiceFunction> out;
  while (true) {
    ChoiceFunction c;
    for (size_t i = 0; i < dom.size(); ++i) c.choice[dom[i]] = cur[i];
    out.push_back(std::move(c));
    int i = static_cast<int>(dom.size()) - 1;
    while (i >= 0 && cur[static_cast<size_t>(i)] + 1 == limits[static_cast<size_t>(i)]) {
      cur[static_cast<size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
    ++cur[static_cast<size_t>(i)];
  }
  return out;
}

// Subgraph keeping the chosen group at every domain vertex and everything at
// the remaining vertices; vertices are the endpoints of the kept edges.
inline SeparatedGraph graph_of_choice(const SeparatedGraph& g, const AdaptableDecoration& dec,
                                      const std::set<Token>& j, const ChoiceFunction& c) {
  std::vector<Token> dom = choice_domain(g, dec, j);
  std::set<Token> domset(dom.begin(), dom.end());
  for (const Token& v : dom)
    if (!c.choice.count(v)) throw InvalidChoice("no choice at domain vertex " + v);
  for (const auto& [v, k] : c.choice) {
    if (!domset.count(v)) throw InvalidChoice(v + " is outside the choice domain");
    if (k < 0 || static_cast<size_t>(k) >= g.groups_at(v).size())
      throw InvalidChoice("group index out of range at " + v);
  }

  std::set<Token> kept_edges;
  for (const Token& v : g.vertices()) {
    if (domset.count(v)) {
      for (const Token& eid : g.groups_at(v)[static_cast<size_t>(c.choice.at(v))])
        kept_edges.insert(eid);
    } else {
      for (int ei : g.out_edges(g.vertex_index(v)))
        kept_edges.insert(g.edges()[static_cast<size_t>(ei)].id);
    }
  }

  std::set<Token> verts;
  std::vector<Edge> edges;
  for (const Edge& e : g.edges())
    if (kept_edges.count(e.id)) {
      edges.push_back(e);
      verts.insert(e.src);
      verts.insert(e.dst);
    }
  std::map<Token, std::vector<std::vector<Token>>> groups;
  for (const Token& v : verts) {
    if (domset.count(v)) {
      groups[v] = {g.groups_at(v)[static_cast<size_t>(c.choice.at(v))]};
    } else if (!g.groups_at(v).empty()) {
      groups[v] = g.groups_at(v);
    }
  }
  return SeparatedGraph(std::vector<Token>(verts.begin(), verts.end()), std::move(edges),
                        std::move(groups));
}

namespace detail {

// Connected components in the undirected sense, each returned as a separated
// graph; ordered by least vertex token.
inline std::vector<SeparatedGraph> undirected_components(const SeparatedGraph& g) {
  const int n = g.num_vertices();
  std::vector<int> comp(static_cast<size_t>(n), -1);
  std::vector<std::vector<int>> adj(static_cast<size_t>(n));
  for (const Edge& e : g.edges()) {
    int a = g.vertex_index(e.src), b = g.vertex_index(e.dst);
    adj[static_cast<size_t>(a)].push_back(b);
    adj[static_cast<size_t>(b)].push_back(a);
  }
  int nc = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[static_cast<size_t>(s)] >= 0) continue;
    std::vector<int> stack{s};
    comp[static_cast<size_t>(s)] = nc;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int w : adj[static_cast<size_t>(u)])
        if (comp[static_cast<size_t>(w)] < 0) {
          comp[static_cast<size_t>(w)] = nc;
          stack.push_back(w);
        }
    }
    ++nc;
  }
  std::vector<SeparatedGraph> out;
  for (int ci = 0; ci < nc; ++ci) {
    std::vector<Token> verts;
    std::vector<Edge> edges;
    std::map<Token, std::vector<std::vector<Token>>> groups;
    for (int vi = 0; vi < n; ++vi)
      if (comp[static_cast<size_t>(vi)] == ci) {
        const Token& v = g.vertices()[static_cast<size_t>(vi)];
        verts.push_back(v);
        if (!g.groups_at(vi).empty()) groups[v] = g.groups_at(vi);
      }
    for (const Edge& e : g.edges())
      if (comp[static_cast<size_t>(g.vertex_index(e.src))] == ci) edges.push_back(e);
    out.emplace_back(std::move(verts), std::move(edges), std::move(groups));
  }
  // vertices() are sorted, so components are already ordered by least token
  return out;
}

inline SeparatedGraph component_containing(const SeparatedGraph& g, const Token& v) {
  for (SeparatedGraph& c : undirected_components(g))
    if (c.has_vertex(v)) return std::move(c);
  throw std::logic_error("vertex " + v + " lost during component split");
}

}  // namespace detail

// Deduplicated connected components over every choice function for J, in
// order of first appearance.
inline std::vector<SeparatedGraph> family_FJ(const SeparatedGraph& g,
                                             const AdaptableDecoration& dec,
                                             const std::set<Token>& j) {
  std::vector<SeparatedGraph> out;
  std::set<std::pair<std::vector<Token>, std::vector<Token>>> seen;
  for (const ChoiceFunction& c : all_choice_functions(g, dec, j)) {
    SeparatedGraph gc = graph_of_choice(g, dec, j, c);
    for (SeparatedGraph& comp : detail::undirected_components(gc)) {
      std::vector<Token> eids;
      for (const Edge& e : comp.edges()) eids.push_back(e.id);
      if (seen.insert({comp.vertices(), std::move(eids)}).second) out.push_back(std::move(comp));
    }
  }
  return out;
}

inline std::vector<SeparatedGraph> building_blocks(const SeparatedGraph& g,
                                                   const AdaptableDecoration& dec) {
  return family_FJ(g, dec, {});
}

// The data of the pullback at a free multi-group vertex v over a lower set J:
// the enclosing component F keeping all groups of v, the per-group factors
// F_i, the strict trees H_i they hang below v, the common quotient Fbar, and
// the connecting generator mappings.
struct PullbackData {
  Token v;
  std::set<Token> j;
  SeparatedGraph F;
  std::vector<SeparatedGraph> factors;   // F_i, one per group of C_v
  SeparatedGraph Fbar;                   // F / (H_1 u ... u H_r)
  std::vector<std::set<Token>> H;        // strict tree of v inside F_i
  std::vector<GeneratorMapping> theta;   // M(F) -> M(F_i), kills H_j for j != i
  std::vector<GeneratorMapping> rho;     // M(F_i) -> M(Fbar), kills H_i
};

inline PullbackData pullback_data(const SeparatedGraph& g, const AdaptableDecoration& dec,
                                  const std::set<Token>& j, const Token& v) {
  try {
    detail::require_lower_in_free(g, dec, j);
  } catch (const NotLower& e) {
    throw PreconditionViolated(std::string("J is not lower in the free part: ") + e.what());
  }
  std::set<Token> free = detail::free_labels(dec);
  for (const Token& w : g.vertices())
    if (g.is_sink(g.vertex_index(w)) && !j.count(w))
      throw PreconditionViolated("sink " + w + " is outside J");
  if (!free.count(v)) throw PreconditionViolated(v + " is not a free vertex");
  if (j.count(v)) throw PreconditionViolated(v + " already lies in J");
  int cv = dec.poset.component_of.at(v);
  for (const Token& w : free)
    if (!j.count(w) && dec.poset.lt(dec.poset.component_of.at(w), cv))
      throw PreconditionViolated(v + " is not minimal outside J (" + w + " lies below)");
  const int r = static_cast<int>(g.groups_at(v).size());
  if (r < 2) throw PreconditionViolated(v + " has a single group");

  PullbackData d;
  d.v = v;
  d.j = j;

  // F: component of v under the lex-first choice function once v joins J
  std::set<Token> jv = j;
  jv.insert(v);
  ChoiceFunction first = all_choice_functions(g, dec, jv).front();
  d.F = detail::component_containing(graph_of_choice(g, dec, jv, first), v);

  AdaptableDecoration decF = classify_adaptable(d.F);
  std::set<Token> jF;
  for (const Token& u : j)
    if (d.F.has_vertex(u)) jF.insert(u);
  std::vector<Token> domF = choice_domain(d.F, decF, jF);

  std::set<Token> hall;
  for (int i = 0; i < r; ++i) {
    ChoiceFunction ci;
    for (const Token& w : domF) ci.choice[w] = (w == v ? i : 0);
    SeparatedGraph fi =
        detail::component_containing(graph_of_choice(d.F, decF, jF, ci), v);
    std::set<Token> hi = tree_vertices(fi, classify_adaptable(fi), v, true);
    for (const Token& w : hi)
      if (!hall.insert(w).second)
        throw PreconditionViolated("strict trees below " + v + " overlap at " + w);
    d.factors.push_back(std::move(fi));
    d.H.push_back(std::move(hi));
  }
  for (int i = 0; i < r; ++i) {
    // F splits as F_i plus the trees of the other groups
    size_t expect = d.factors[static_cast<size_t>(i)].vertices().size();
    for (int k = 0; k < r; ++k)
      if (k != i) expect += d.H[static_cast<size_t>(k)].size();
    if (expect != d.F.vertices().size())
      throw PreconditionViolated("vertex decomposition fails at factor " + std::to_string(i + 1));
    for (const Token& w : d.factors[static_cast<size_t>(i)].vertices())
      if (!d.F.has_vertex(w))
        throw PreconditionViolated("factor vertex " + w + " escapes F");
  }

  d.Fbar = quotient(d.F, hall);

  for (int i = 0; i < r; ++i) {
    const SeparatedGraph& fi = d.factors[static_cast<size_t>(i)];
    GeneratorMapping th;
    for (const Token& w : d.F.vertices())
      th[w] = fi.has_vertex(w) ? MonoidElement::generator(fi, w) : MonoidElement(fi);
    d.theta.push_back(std::move(th));
    GeneratorMapping rh;
    for (const Token& w : fi.vertices())
      rh[w] = d.H[static_cast<size_t>(i)].count(w) ? MonoidElement(d.Fbar)
                                                   : MonoidElement::generator(d.Fbar, w);
    d.rho.push_back(std::move(rh));
  }
  return d;
}

enum class PullbackStatus { Verified, Violation, Unknown };

struct PullbackReport {
  PullbackStatus status = PullbackStatus::Verified;
  std::vector<std::string> violations;
  std::vector<std::string> unknowns;
  long long tuples_checked = 0;
  long long pairs_checked = 0;
};

// Bounded check that M(F) is the pullback of the M(F_i) over M(Fbar):
// every compatible tuple of factor classes in the degree window has a common
// preimage, and elements of M(F) agreeing in every factor are equal. The
// preimage window is r times the degree bound (never less than twice): a
// tuple supported on r disjoint trees can only be hit by the sum of its
// parts.
inline PullbackReport verify_pullback_bounded(const PullbackData& d, long long degree_bound,
                                              Bounds eq_bounds = {}) {
  PullbackReport rep;
  const int r = static_cast<int>(d.factors.size());
  const long long big = std::max<long long>(2, r) * degree_bound;

  MonoidCalc calc_f(d.F, eq_bounds);
  MonoidCalc calc_bar(d.Fbar, eq_bounds);
  std::vector<MonoidCalc> calc_i;
  calc_i.reserve(static_cast<size_t>(r));
  for (const SeparatedGraph& fi : d.factors) calc_i.emplace_back(fi, eq_bounds);
  for (MonoidCalc& c : calc_i) c.enumerate_classes(big);
  calc_bar.enumerate_classes(big);

  auto apply_class = [&](int i, const MonoidElement& x) {
    return calc_i[static_cast<size_t>(i)].class_of(big, x.coeffs());
  };

  // preimage table: factor-class tuple of theta images -> first window element
  std::map<std::vector<int>, MonoidElement> preimage;
  std::map<std::vector<int>, std::vector<MonoidElement>> fibers;  // small window only
  for (const Coeffs& c : window_vectors(d.F, big)) {
    MonoidElement z(d.F, c);
    std::vector<int> key;
    for (int i = 0; i < r; ++i) key.push_back(apply_class(i, induced_hom_apply(d.theta[static_cast<size_t>(i)], z)));
    if (!preimage.count(key)) preimage.emplace(key, z);
    if (z.total() <= degree_bound) fibers[key].push_back(z);
  }

  // injectivity: same theta images in every factor forces equality
  for (auto& [key, zs] : fibers) {
    for (size_t k = 1; k < zs.size(); ++k) {
      ++rep.pairs_checked;
      EqVerdict ev = calc_f.equal(zs[0], zs[k]);
      if (ev.status == EqStatus::EqualCertified) continue;
      std::string msg = "theta-equal pair " + zs[0].str() + " vs " + zs[k].str();
      if (ev.status == EqStatus::UnequalCertified)
        rep.violations.push_back(msg + " certified distinct");
      else
        rep.unknowns.push_back(msg + " undecided");
    }
  }

  // surjectivity: compatible class tuples from the small window must be hit
  std::vector<std::vector<int>> small_classes(static_cast<size_t>(r));
  std::vector<std::vector<int>> bar_of(static_cast<size_t>(r));
  for (int i = 0; i < r; ++i) {
    const ClassPartition& part = calc_i[static_cast<size_t>(i)].enumerate_classes(big);
    for (size_t ci = 0; ci < part.classes.size(); ++ci) {
      bool small = false;
      for (const MonoidElement& m : part.classes[ci].members)
        if (m.total() <= degree_bound) small = true;
      if (!small) continue;
      small_classes[static_cast<size_t>(i)].push_back(static_cast<int>(ci));
      MonoidElement img = induced_hom_apply(d.rho[static_cast<size_t>(i)], part.classes[ci].rep);
      bar_of[static_cast<size_t>(i)].push_back(calc_bar.class_of(big, img.coeffs()));
    }
  }
  std::vector<size_t> idx(static_cast<size_t>(r), 0);
  bool more = true;
  while (more) {
    bool compatible = true;
    for (int i = 1; i < r && compatible; ++i)
      if (bar_of[static_cast<size_t>(i)][idx[static_cast<size_t>(i)]] !=
          bar_of[0][idx[0]])
        compatible = false;
    if (compatible) {
      ++rep.tuples_checked;
      std::vector<int> key;
      for (int i = 0; i < r; ++i)
        key.push_back(small_classes[static_cast<size_t>(i)][idx[static_cast<size_t>(i)]]);
      if (!preimage.count(key)) {
        std::string msg = "no common preimage for (";
        for (int i = 0; i < r; ++i) {
          const ClassPartition& part = calc_i[static_cast<size_t>(i)].enumerate_classes(big);
          msg += part.classes[static_cast<size_t>(key[static_cast<size_t>(i)])].rep.str();
          msg += (i + 1 < r ? ", " : ")");
        }
        rep.unknowns.push_back(msg);
      }
    }
    int i = r - 1;
    while (i >= 0 && idx[static_cast<size_t>(i)] + 1 == small_classes[static_cast<size_t>(i)].size()) {
      idx[static_cast<size_t>(i)] = 0;
      --i;
    }
    if (i < 0)
      more = false;
    else
      ++idx[static_cast<size_t>(i)];
  }

  if (!rep.violations.empty())
    rep.status = PullbackStatus::Violation;
  else if (!rep.unknowns.empty())
    rep.status = PullbackStatus::Unknown;
  return rep;
}

}  // namespace sepmon
