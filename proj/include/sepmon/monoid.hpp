// Elements of the graph monoid, the one-step rewriting relation generated by
// a_v -> sum over a group's ranges, bounded equality and order decisions with
// certified refutations, and the bounded property checkers built on them.

#pragma once

#include <array>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sepmon/graph.hpp"
#include "sepmon/ktheory.hpp"

namespace sepmon {

struct Bounds {
  int depth = 8;
  long long size = 64;
};

using Coeffs = std::vector<long long>;

class MonoidElement {
 public:
  MonoidElement() = default;
  explicit MonoidElement(const SeparatedGraph& g)
      : g_(&g), c_(static_cast<size_t>(g.num_vertices()), 0) {}
  MonoidElement(const SeparatedGraph& g, Coeffs c) : g_(&g), c_(std::move(c)) {
    if (c_.size() != static_cast<size_t>(g.num_vertices()))
      throw std::invalid_argument("coefficient vector length mismatch");
    for (long long x : c_)
      if (x < 0) throw std::invalid_argument("negative coefficient");
  }
  MonoidElement(const SeparatedGraph& g, const std::map<Token, long long>& m)
      : g_(&g), c_(static_cast<size_t>(g.num_vertices()), 0) {
    for (const auto& [v, k] : m) {
      if (k < 0) throw std::invalid_argument("negative coefficient at " + v);
      c_[static_cast<size_t>(g.vertex_index(v))] = k;
    }
  }

  static MonoidElement generator(const SeparatedGraph& g, const Token& v) {
    MonoidElement e(g);
    e.c_[static_cast<size_t>(g.vertex_index(v))] = 1;
    return e;
  }

  const SeparatedGraph& graph() const { return *g_; }
  const Coeffs& coeffs() const { return c_; }
  long long coeff(const Token& v) const { return c_[static_cast<size_t>(g_->vertex_index(v))]; }
  long long total() const {
    long long t = 0;
    for (long long x : c_) t += x;
    return t;
  }
  bool is_zero() const { return total() == 0; }

  MonoidElement& operator+=(const MonoidElement& o) {
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  friend MonoidElement operator+(MonoidElement a, const MonoidElement& b) { return a += b; }
  MonoidElement scaled(long long k) const {
    MonoidElement r = *this;
    for (auto& x : r.c_) x *= k;
    return r;
  }
  bool dominates(const MonoidElement& o) const {
    for (size_t i = 0; i < c_.size(); ++i)
      if (c_[i] < o.c_[i]) return false;
    return true;
  }
  MonoidElement minus(const MonoidElement& o) const {
    MonoidElement r = *this;
    for (size_t i = 0; i < c_.size(); ++i) {
      r.c_[i] -= o.c_[i];
      if (r.c_[i] < 0) throw std::invalid_argument("difference not defined");
    }
    return r;
  }

  bool operator==(const MonoidElement& o) const { return c_ == o.c_; }
  bool operator<(const MonoidElement& o) const { return c_ < o.c_; }

  std::map<Token, long long> support_map() const {
    std::map<Token, long long> m;
    for (size_t i = 0; i < c_.size(); ++i)
      if (c_[i] != 0) m[g_->vertices()[i]] = c_[i];
    return m;
  }

  std::string str() const {
    std::string s;
    for (size_t i = 0; i < c_.size(); ++i) {
      if (c_[i] == 0) continue;
      if (!s.empty()) s += " + ";
      if (c_[i] != 1) s += std::to_string(c_[i]) + "*";
      s += g_->vertices()[i];
    }
    return s.empty() ? "0" : s;
  }

 private:
  const SeparatedGraph* g_ = nullptr;
  Coeffs c_;
};

namespace detail {

inline long long vec_total(const Coeffs& c) {
  long long t = 0;
  for (long long x : c) t += x;
  return t;
}

inline bool vec_dominates(const Coeffs& a, const Coeffs& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] < b[i]) return false;
  return true;
}

inline Coeffs vec_add(Coeffs a, const Coeffs& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline Coeffs vec_sub(Coeffs a, const Coeffs& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

inline std::vector<ktheory::Int> to_int_vec(const Coeffs& c) {
  std::vector<ktheory::Int> v(c.size());
  for (size_t i = 0; i < c.size(); ++i) v[i] = c[i];
  return v;
}

// All one-step successors of a coefficient vector, in deterministic order
// (vertex index ascending, group index ascending).
inline std::vector<Coeffs> successors(const SeparatedGraph& g, const Coeffs& c) {
  std::vector<Coeffs> out;
  for (int vi = 0; vi < g.num_vertices(); ++vi) {
    if (c[static_cast<size_t>(vi)] == 0) continue;
    for (const auto& grp : g.groups_at(vi)) {
      Coeffs n = c;
      --n[static_cast<size_t>(vi)];
      for (const Token& eid : grp)
        ++n[static_cast<size_t>(g.vertex_index(g.edge(eid).dst))];
      out.push_back(std::move(n));
    }
  }
  return out;
}

}  // namespace detail

inline std::vector<MonoidElement> one_step_rewrites(const SeparatedGraph& g, const MonoidElement& x) {
  std::set<Coeffs> seen;
  for (auto& c : detail::successors(g, x.coeffs())) seen.insert(std::move(c));
  std::vector<MonoidElement> out;
  for (const Coeffs& c : seen) out.emplace_back(g, c);
  return out;
}

// Bounded forward closure of an element under the rewriting relation.
// `complete` is set when the returned set is closed under every one-step
// rewrite, i.e. it is the entire (finite) forward closure; certificates built
// on completeness rely on this flag.
struct ReachResult {
  Coeffs origin;
  std::set<Coeffs> elems;
  std::map<Coeffs, Coeffs> parent;  // BFS tree; origin maps to itself
  bool complete = false;
  bool truncated = false;
};

enum class EqStatus { EqualCertified, UnequalCertified, Unknown };

inline const char* to_string(EqStatus s) {
  switch (s) {
    case EqStatus::EqualCertified: return "EqualCertified";
    case EqStatus::UnequalCertified: return "UnequalCertified";
    case EqStatus::Unknown: return "Unknown";
  }
  return "?";
}

struct EqVerdict {
  EqStatus status = EqStatus::Unknown;
  std::optional<MonoidElement> common_reduct;
  std::vector<MonoidElement> trace_x, trace_y;  // rewrite paths input -> reduct
  std::string refuting_invariant;
  std::string detail;
  Bounds bounds;
};

enum class LeqStatus { LeqCertified, NotLeqCertified, Unknown };

inline const char* to_string(LeqStatus s) {
  switch (s) {
    case LeqStatus::LeqCertified: return "LeqCertified";
    case LeqStatus::NotLeqCertified: return "NotLeqCertified";
    case LeqStatus::Unknown: return "Unknown";
  }
  return "?";
}

struct LeqVerdict {
  LeqStatus status = LeqStatus::Unknown;
  std::optional<MonoidElement> witness;  // z with x + z ~ y
  std::string reason;
  Bounds bounds;
};

struct RefinementSquare {
  MonoidElement x, y, z, t;
};

struct RefinementResult {
  bool found = false;
  std::optional<RefinementSquare> square;
};

class PreconditionUnverified : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PrimeStatus { Holds, CounterexampleCandidate, Unknown };

inline const char* to_string(PrimeStatus s) {
  switch (s) {
    case PrimeStatus::Holds: return "Holds";
    case PrimeStatus::CounterexampleCandidate: return "CounterexampleCandidate";
    case PrimeStatus::Unknown: return "Unknown";
  }
  return "?";
}

struct PrimeVerdict {
  PrimeStatus status = PrimeStatus::Unknown;
  std::optional<std::pair<MonoidElement, MonoidElement>> candidate;
  long long cases_checked = 0;
  long long unresolved = 0;
  std::string note;
};

struct SeparativityReport {
  long long cases_checked = 0;
  std::vector<std::array<MonoidElement, 3>> violations;  // (a, b, c)
  std::vector<std::array<MonoidElement, 3>> unresolved;
};

struct MonoidClass {
  MonoidElement rep;  // lexicographically least member
  std::vector<MonoidElement> members;
};

struct ClassPartition {
  std::vector<MonoidClass> classes;
  std::vector<std::pair<MonoidElement, MonoidElement>> unknown_pairs;
};

enum class GeneratorKind { Free, Regular };

inline GeneratorKind generator_kind(const SeparatedGraph&, const AdaptableDecoration& dec,
                                    const Token& v) {
  int c = dec.poset.component_of.at(v);
  return dec.is_free(c) ? GeneratorKind::Free : GeneratorKind::Regular;
}

class UnknownGeneratorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Generator-image description of a monoid homomorphism: every source vertex
// maps to an element of the target monoid.
using GeneratorMapping = std::map<Token, MonoidElement>;

inline MonoidElement induced_hom_apply(const GeneratorMapping& mapping, const MonoidElement& x) {
  if (mapping.empty()) throw UnknownGeneratorError("empty generator mapping");
  MonoidElement out(mapping.begin()->second.graph());
  const SeparatedGraph& src = x.graph();
  for (int vi = 0; vi < src.num_vertices(); ++vi) {
    long long k = x.coeffs()[static_cast<size_t>(vi)];
    if (k == 0) continue;
    auto it = mapping.find(src.vertices()[static_cast<size_t>(vi)]);
    if (it == mapping.end())
      throw UnknownGeneratorError("no image for generator " + src.vertices()[static_cast<size_t>(vi)]);
    out += it->second.scaled(k);
  }
  return out;
}

enum class HomStatus { Holds, Fails, Unknown };

inline const char* to_string(HomStatus s) {
  switch (s) {
    case HomStatus::Holds: return "Holds";
    case HomStatus::Fails: return "Fails";
    case HomStatus::Unknown: return "Unknown";
  }
  return "?";
}

struct HomVerdict {
  HomStatus status = HomStatus::Unknown;
  std::string relation;  // description of the failing relation, if any
  std::vector<std::string> unknown_relations;
};

// Relation matrix of the monoid presentation: one column e_v - sum e_{r(e)}
// per (vertex, group) pair, rows indexed by vertices.
inline ktheory::IntMatrix relation_matrix(const SeparatedGraph& g) {
  long cols = 0;
  for (int vi = 0; vi < g.num_vertices(); ++vi)
    cols += static_cast<long>(g.groups_at(vi).size());
  ktheory::IntMatrix m(g.num_vertices(), cols);
  long col = 0;
  for (int vi = 0; vi < g.num_vertices(); ++vi)
    for (const auto& grp : g.groups_at(vi)) {
      m.at(vi, col) += 1;
      for (const Token& eid : grp) m.at(g.vertex_index(g.edge(eid).dst), col) -= 1;
      ++col;
    }
  return m;
}

inline ktheory::FgAbelianGroup grothendieck_group(const SeparatedGraph& g) {
  return ktheory::cokernel(relation_matrix(g));
}

// Matrix of a generator mapping on the vertex lattices (columns = source
// vertices in sorted order).
inline ktheory::IntMatrix generator_matrix(const SeparatedGraph& src, const SeparatedGraph& dst,
                                           const GeneratorMapping& mapping) {
  ktheory::IntMatrix m(dst.num_vertices(), src.num_vertices());
  for (int j = 0; j < src.num_vertices(); ++j) {
    auto it = mapping.find(src.vertices()[static_cast<size_t>(j)]);
    if (it == mapping.end())
      throw UnknownGeneratorError("no image for generator " + src.vertices()[static_cast<size_t>(j)]);
    const Coeffs& c = it->second.coeffs();
    for (int i = 0; i < dst.num_vertices(); ++i) m.at(i, j) = c[static_cast<size_t>(i)];
  }
  return m;
}

// All coefficient vectors of total degree <= degree over g's vertices, in
// graded lexicographic order (total ascending, then lexicographic).
inline std::vector<Coeffs> window_vectors(const SeparatedGraph& g, long long degree) {
  std::vector<Coeffs> out;
  const int nv = g.num_vertices();
  Coeffs cur(static_cast<size_t>(nv), 0);
  std::function<void(int, long long)> go = [&](int i, long long left) {
    if (i == nv) {
      out.push_back(cur);
      return;
    }
    for (long long k = 0; k <= left; ++k) {
      cur[static_cast<size_t>(i)] = k;
      go(i + 1, left - k);
    }
    cur[static_cast<size_t>(i)] = 0;
  };
  go(0, degree);
  std::stable_sort(out.begin(), out.end(), [](const Coeffs& a, const Coeffs& b) {
    long long ta = detail::vec_total(a), tb = detail::vec_total(b);
    if (ta != tb) return ta < tb;
    return a < b;
  });
  return out;
}

// Shared engine for the bounded monoid computations over one graph. Caches
// reachable sets, support closures and Grothendieck projections (of the full
// monoid and of every ideal quotient) so that sweeps stay affordable.
class MonoidCalc {
 public:
  explicit MonoidCalc(const SeparatedGraph& g, Bounds b = {}) : g_(g), b_(b) {}

  const SeparatedGraph& graph() const { return g_; }
  const Bounds& bounds() const { return b_; }

  const ReachResult& reach(const Coeffs& start) {
    auto it = reach_cache_.find(start);
    if (it != reach_cache_.end()) return it->second;
    ReachResult r;
    r.origin = start;
    r.elems.insert(start);
    r.parent[start] = start;
    std::deque<std::pair<Coeffs, int>> queue{{start, 0}};
    bool truncated = false;
    while (!queue.empty()) {
      auto [cur, d] = queue.front();
      queue.pop_front();
      if (d == b_.depth) continue;
      for (auto& nxt : detail::successors(g_, cur)) {
        if (detail::vec_total(nxt) > b_.size) continue;
        if (r.elems.count(nxt)) continue;
        if (static_cast<long long>(r.elems.size()) >= kReachCap) {
          truncated = true;
          continue;
        }
        r.parent[nxt] = cur;
        queue.emplace_back(nxt, d + 1);
        r.elems.insert(std::move(nxt));
      }
    }
    r.truncated = truncated;
    r.complete = !truncated;
    if (r.complete)
      for (const Coeffs& e : r.elems) {
        for (const auto& nxt : detail::successors(g_, e))
          if (!r.elems.count(nxt)) {
            r.complete = false;
            break;
          }
        if (!r.complete) break;
      }
    return reach_cache_.emplace(start, std::move(r)).first->second;
  }

  const ReachResult& reach(const MonoidElement& x) { return reach(x.coeffs()); }

  EqVerdict equal(const MonoidElement& x, const MonoidElement& y) {
    EqVerdict v;
    v.bounds = b_;
    if (x.coeffs() == y.coeffs()) {
      v.status = EqStatus::EqualCertified;
      v.common_reduct = x;
      v.trace_x = {x};
      v.trace_y = {y};
      return v;
    }
    const ReachResult& rx = reach(x);
    const ReachResult& ry = reach(y);
    const ReachResult& small = rx.elems.size() <= ry.elems.size() ? rx : ry;
    const ReachResult& large = rx.elems.size() <= ry.elems.size() ? ry : rx;
    for (const Coeffs& c : small.elems)  // lex order: least common reduct
      if (large.elems.count(c)) {
        v.status = EqStatus::EqualCertified;
        v.common_reduct = MonoidElement(g_, c);
        v.trace_x = trace_path(rx, c);
        v.trace_y = trace_path(ry, c);
        return v;
      }
    // refutation invariants, each constant on congruence classes
    auto clx = closure_of(x.coeffs()), cly = closure_of(y.coeffs());
    if (clx != cly) {
      v.status = EqStatus::UnequalCertified;
      v.refuting_invariant = "support-closure";
      v.detail = mask_str(clx) + " vs " + mask_str(cly);
      return v;
    }
    auto gx = g_image(x.coeffs()), gy = g_image(y.coeffs());
    if (gx != gy) {
      v.status = EqStatus::UnequalCertified;
      v.refuting_invariant = "grothendieck-image";
      v.detail = ints_str(gx) + " vs " + ints_str(gy);
      return v;
    }
    for (const QuotData& q : quotients()) {
      auto qx = q_image(q, x.coeffs()), qy = q_image(q, y.coeffs());
      if (qx != qy) {
        v.status = EqStatus::UnequalCertified;
        v.refuting_invariant = "quotient-grothendieck";
        v.detail = "ideal " + set_str(q.h) + ": " + ints_str(qx) + " vs " + ints_str(qy);
        return v;
      }
    }
    if (rx.complete && ry.complete) {
      // both forward closures are entire and disjoint; by confluence the
      // elements cannot be identified
      v.status = EqStatus::UnequalCertified;
      v.refuting_invariant = "disjoint-rewrite-closures";
      v.detail = "complete closures of sizes " + std::to_string(rx.elems.size()) + " and " +
                 std::to_string(ry.elems.size()) + " share no element";
      return v;
    }
    v.status = EqStatus::Unknown;
    return v;
  }

  LeqVerdict leq(const MonoidElement& x, const MonoidElement& y) {
    LeqVerdict v;
    v.bounds = b_;
    const ReachResult& ry = reach(y);
    for (const Coeffs& c : ry.elems)
      if (detail::vec_dominates(c, x.coeffs())) {
        v.status = LeqStatus::LeqCertified;
        v.witness = MonoidElement(g_, detail::vec_sub(c, x.coeffs()));
        v.reason = "dominating-reduct";
        return v;
      }
    const ReachResult& rx = reach(x);
    if (rx.elems.size() * ry.elems.size() <= 2000000) {
      for (const Coeffs& c : ry.elems)
        for (const Coeffs& xr : rx.elems)
          if (detail::vec_dominates(c, xr)) {
            // x rewrites to xr, and xr + (c - xr) = c ~ y
            v.status = LeqStatus::LeqCertified;
            v.witness = MonoidElement(g_, detail::vec_sub(c, xr));
            v.reason = "dominating-reduct-of-rewrite";
            return v;
          }
    }
    auto clx = closure_of(x.coeffs()), cly = closure_of(y.coeffs());
    for (size_t i = 0; i < clx.size(); ++i)
      if (clx[i] && !cly[i]) {
        // x + z ~ y would force closure(supp x) inside closure(supp y)
        v.status = LeqStatus::NotLeqCertified;
        v.reason = "support-closure not contained";
        return v;
      }
    if (rx.complete && ry.complete) {
      // with both closures entire, x <= y iff some reduct of y dominates
      // some reduct of x (rewrites of x + z split into a rewrite of x and
      // a remainder); the exhaustive scan above found none
      v.status = LeqStatus::NotLeqCertified;
      v.reason = "complete closures admit no dominating pair";
      return v;
    }
    v.status = LeqStatus::Unknown;
    return v;
  }

  RefinementResult check_refinement(const MonoidElement& a, const MonoidElement& b,
                                    const MonoidElement& c, const MonoidElement& d) {
    EqVerdict pre = equal(a + b, c + d);
    if (pre.status != EqStatus::EqualCertified)
      throw PreconditionUnverified("a+b ~ c+d is not certified (" +
                                   std::string(to_string(pre.status)) + ")");
    RefinementResult res;
    MonoidElement zero(g_);
    // diagonal refinements first
    if (equal(a, c).status == EqStatus::EqualCertified &&
        equal(b, d).status == EqStatus::EqualCertified) {
      res.found = true;
      res.square = RefinementSquare{a, zero, zero, b};
      return res;
    }
    if (equal(a, d).status == EqStatus::EqualCertified &&
        equal(b, c).status == EqStatus::EqualCertified) {
      res.found = true;
      res.square = RefinementSquare{zero, a, c, zero};
      return res;
    }
    auto graded = [](const std::set<Coeffs>& s) {
      std::vector<Coeffs> v(s.begin(), s.end());
      std::stable_sort(v.begin(), v.end(), [](const Coeffs& p, const Coeffs& q) {
        long long tp = detail::vec_total(p), tq = detail::vec_total(q);
        if (tp != tq) return tp < tq;
        return p < q;
      });
      return v;
    };
    std::vector<Coeffs> ra = graded(reach(a).elems);
    std::vector<Coeffs> rb = graded(reach(b).elems);
    std::vector<Coeffs> rc = graded(reach(c).elems);
    long long budget = 200000;  // deterministic work cap
    for (const Coeffs& gc : rc) {
      // enumerate splits gc = x + z, x in lex order
      Coeffs x(gc.size(), 0);
      bool done = false;
      while (!done) {
        Coeffs z = detail::vec_sub(gc, x);
        for (const Coeffs& ga : ra) {
          if (!detail::vec_dominates(ga, x)) continue;
          Coeffs y = detail::vec_sub(ga, x);
          for (const Coeffs& gb : rb) {
            if (!detail::vec_dominates(gb, z)) continue;
            if (--budget < 0) return res;
            Coeffs t = detail::vec_sub(gb, z);
            MonoidElement yt(g_, detail::vec_add(y, t));
            if (signature(yt.coeffs()) != signature(d.coeffs())) continue;
            if (equal(d, yt).status == EqStatus::EqualCertified) {
              res.found = true;
              res.square = RefinementSquare{MonoidElement(g_, x), MonoidElement(g_, y),
                                            MonoidElement(g_, z), MonoidElement(g_, t)};
              return res;
            }
          }
        }
        // next split in lex order
        done = true;
        for (size_t i = x.size(); i-- > 0;) {
          if (x[i] < gc[i]) {
            ++x[i];
            for (size_t j = i + 1; j < x.size(); ++j) x[j] = 0;
            done = false;
            break;
          }
        }
      }
    }
    return res;
  }

  PrimeVerdict is_prime_bounded(const Token& vtx, long long window_degree) {
    PrimeVerdict verdict;
    MonoidElement av = MonoidElement::generator(g_, vtx);
    std::vector<Coeffs> win = window_vectors(g_, window_degree);
    std::map<Coeffs, LeqStatus> memo;
    auto lq = [&](const Coeffs& rhs) {
      auto it = memo.find(rhs);
      if (it != memo.end()) return it->second;
      LeqStatus s = leq(av, MonoidElement(g_, rhs)).status;
      memo.emplace(rhs, s);
      return s;
    };
    for (const Coeffs& x : win)
      for (const Coeffs& y : win) {
        if (lq(detail::vec_add(x, y)) != LeqStatus::LeqCertified) continue;
        ++verdict.cases_checked;
        LeqStatus lx = lq(x);
        if (lx == LeqStatus::LeqCertified) continue;
        LeqStatus ly = lq(y);
        if (ly == LeqStatus::LeqCertified) continue;
        if (lx == LeqStatus::NotLeqCertified && ly == LeqStatus::NotLeqCertified) {
          verdict.status = PrimeStatus::CounterexampleCandidate;
          verdict.candidate = {MonoidElement(g_, x), MonoidElement(g_, y)};
          verdict.note =
              "a counterexample candidate flags a defect in this checker, not a "
              "genuine failure of primality";
          return verdict;
        }
        ++verdict.unresolved;
      }
    verdict.status = verdict.unresolved > 0 ? PrimeStatus::Unknown : PrimeStatus::Holds;
    return verdict;
  }

  // Certified-equality partition of the degree window. Pairs that can be
  // neither merged nor separated are listed, never silently merged.
  const ClassPartition& enumerate_classes(long long degree_bound) {
    auto cached = class_cache_.find(degree_bound);
    if (cached != class_cache_.end()) return cached->second.part;
    ClassIndex ci;
    ci.window = window_vectors(g_, degree_bound);
    const size_t n = ci.window.size();
    std::vector<int> uf(n);
    for (size_t i = 0; i < n; ++i) uf[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int i) {
      while (uf[static_cast<size_t>(i)] != i) {
        uf[static_cast<size_t>(i)] = uf[static_cast<size_t>(uf[static_cast<size_t>(i)])];
        i = uf[static_cast<size_t>(i)];
      }
      return i;
    };
    auto unite = [&](int i, int j) {
      i = find(i);
      j = find(j);
      if (i != j) uf[static_cast<size_t>(std::max(i, j))] = std::min(i, j);
    };
    // merge window elements sharing any reachable reduct (certified equal)
    std::map<Coeffs, int> owner;
    std::vector<bool> complete(n, false);
    for (size_t i = 0; i < n; ++i) {
      const ReachResult& r = reach(ci.window[i]);
      complete[i] = r.complete;
      for (const Coeffs& red : r.elems) {
        auto [it, fresh] = owner.emplace(red, static_cast<int>(i));
        if (!fresh) unite(static_cast<int>(i), it->second);
      }
    }
    std::map<int, std::vector<int>> groups;
    for (size_t i = 0; i < n; ++i) groups[find(static_cast<int>(i))].push_back(static_cast<int>(i));
    ClassPartition part;
    std::vector<int> class_root;
    for (const auto& [root, members] : groups) {
      MonoidClass cls;
      for (int i : members) cls.members.emplace_back(g_, ci.window[static_cast<size_t>(i)]);
      cls.rep = *std::min_element(cls.members.begin(), cls.members.end());
      part.classes.push_back(std::move(cls));
      class_root.push_back(root);
    }
    std::vector<size_t> order(part.classes.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t i, size_t j) { return part.classes[i].rep < part.classes[j].rep; });
    {
      std::vector<MonoidClass> sorted;
      std::vector<int> roots;
      for (size_t i : order) {
        sorted.push_back(std::move(part.classes[i]));
        roots.push_back(class_root[i]);
      }
      part.classes = std::move(sorted);
      class_root = std::move(roots);
    }
    for (size_t k = 0; k < part.classes.size(); ++k)
      for (const MonoidElement& m : part.classes[k].members) ci.class_of[m.coeffs()] = static_cast<int>(k);
    // per-class: does some member have a complete closure?
    std::vector<bool> class_complete(part.classes.size(), false);
    for (size_t i = 0; i < n; ++i)
      if (complete[i])
        class_complete[static_cast<size_t>(ci.class_of.at(ci.window[i]))] = true;
    // unresolved pairs: same invariant signature, distinct classes, and no
    // disjoint-complete-closure separation
    std::map<std::string, std::vector<int>> buckets;
    for (size_t k = 0; k < part.classes.size(); ++k)
      buckets[signature(part.classes[k].rep.coeffs())].push_back(static_cast<int>(k));
    for (const auto& [sig, ks] : buckets)
      for (size_t i = 0; i < ks.size(); ++i)
        for (size_t j = i + 1; j < ks.size(); ++j)
          if (!(class_complete[static_cast<size_t>(ks[i])] &&
                class_complete[static_cast<size_t>(ks[j])]))
            part.unknown_pairs.emplace_back(part.classes[static_cast<size_t>(ks[i])].rep,
                                            part.classes[static_cast<size_t>(ks[j])].rep);
    ci.part = std::move(part);
    ci.class_complete = std::move(class_complete);
    return class_cache_.emplace(degree_bound, std::move(ci)).first->second.part;
  }

  // Class id of a vector inside the degree window used by enumerate_classes;
  // -1 if outside the window.
  int class_of(long long degree_bound, const Coeffs& c) {
    enumerate_classes(degree_bound);
    const ClassIndex& ci = class_cache_.at(degree_bound);
    auto it = ci.class_of.find(c);
    return it == ci.class_of.end() ? -1 : it->second;
  }

  SeparativityReport check_separativity_bounded(long long window_degree) {
    SeparativityReport rep;
    enumerate_classes(2 * window_degree);
    const ClassIndex& ci = class_cache_.at(2 * window_degree);
    std::vector<Coeffs> win = window_vectors(g_, window_degree);
    std::map<std::pair<Coeffs, Coeffs>, bool> div_memo;  // c <= n*a for some n <= degree
    auto divides = [&](const Coeffs& c, const Coeffs& a) {
      if (detail::vec_total(c) == 0) return true;
      auto key = std::make_pair(c, a);
      auto it = div_memo.find(key);
      if (it != div_memo.end()) return it->second;
      bool ok = false;
      MonoidElement ce(g_, c);
      for (long long k = 1; k <= window_degree && !ok; ++k)
        ok = leq(ce, MonoidElement(g_, a).scaled(k)).status == LeqStatus::LeqCertified;
      div_memo.emplace(key, ok);
      return ok;
    };
    for (const Coeffs& c : win) {
      // bucket the window by the class of a + c
      std::map<int, std::vector<const Coeffs*>> bucket;
      for (const Coeffs& a : win) {
        int id = ci.class_of.at(detail::vec_add(a, c));
        bucket[id].push_back(&a);
      }
      for (const auto& [sum_class, as] : bucket) {
        // split by the class of a itself; same-class pairs satisfy the
        // conclusion outright
        std::map<int, std::vector<const Coeffs*>> by_class;
        for (const Coeffs* a : as) by_class[ci.class_of.at(*a)].push_back(a);
        for (const auto& [ka, group] : by_class)
          rep.cases_checked += static_cast<long long>(group.size() * (group.size() - 1) / 2);
        for (auto i1 = by_class.begin(); i1 != by_class.end(); ++i1)
          for (auto i2 = std::next(i1); i2 != by_class.end(); ++i2) {
            const Coeffs* a = nullptr;
            for (const Coeffs* cand : i1->second)
              if (divides(c, *cand)) {
                a = cand;
                break;
              }
            if (!a) continue;
            const Coeffs* b = nullptr;
            for (const Coeffs* cand : i2->second)
              if (divides(c, *cand)) {
                b = cand;
                break;
              }
            if (!b) continue;
            ++rep.cases_checked;
            // premise holds with a !~ b unresolved or refuted
            std::array<MonoidElement, 3> triple{MonoidElement(g_, *a), MonoidElement(g_, *b),
                                                MonoidElement(g_, c)};
            EqVerdict ab = equal(triple[0], triple[1]);
            if (ab.status == EqStatus::UnequalCertified)
              rep.violations.push_back(std::move(triple));
            else if (ab.status == EqStatus::Unknown)
              rep.unresolved.push_back(std::move(triple));
          }
      }
    }
    return rep;
  }

  HomVerdict hom_well_defined(const SeparatedGraph& src, const GeneratorMapping& mapping) {
    HomVerdict v;
    for (int vi = 0; vi < src.num_vertices(); ++vi) {
      const Token& vt = src.vertices()[static_cast<size_t>(vi)];
      auto vit = mapping.find(vt);
      if (vit == mapping.end()) throw UnknownGeneratorError("no image for generator " + vt);
      const auto& gs = src.groups_at(vi);
      for (size_t gi = 0; gi < gs.size(); ++gi) {
        MonoidElement rhs(g_);
        for (const Token& eid : gs[gi]) {
          auto rit = mapping.find(src.edge(eid).dst);
          if (rit == mapping.end())
            throw UnknownGeneratorError("no image for generator " + src.edge(eid).dst);
          rhs += rit->second;
        }
        EqVerdict eq = equal(vit->second, rhs);
        std::string label = "a_" + vt + " = group " + std::to_string(gi);
        if (eq.status == EqStatus::UnequalCertified) {
          v.status = HomStatus::Fails;
          v.relation = label;
          return v;
        }
        if (eq.status == EqStatus::Unknown) v.unknown_relations.push_back(label);
      }
    }
    v.status = v.unknown_relations.empty() ? HomStatus::Holds : HomStatus::Unknown;
    return v;
  }

  // Invariant signature (support closure, Grothendieck images of the monoid
  // and of all ideal quotients); equal elements always share it.
  std::string signature(const Coeffs& c) {
    std::ostringstream os;
    os << mask_str(closure_of(c)) << '|' << ints_str(g_image(c));
    for (const QuotData& q : quotients()) os << '|' << ints_str(q_image(q, c));
    return os.str();
  }

  const ktheory::FgAbelianGroup& groth() {
    if (!groth_) groth_ = grothendieck_group(g_);
    return *groth_;
  }

  std::vector<ktheory::Int> g_image(const Coeffs& c) { return groth().image(detail::to_int_vec(c)); }

 private:
  static constexpr long long kReachCap = 20000;

  struct QuotData {
    std::set<Token> h;
    SeparatedGraph quot;
    ktheory::FgAbelianGroup grp;
    std::vector<int> idx;  // source vertex index -> quotient index, -1 inside h
  };

  struct ClassIndex {
    std::vector<Coeffs> window;
    std::map<Coeffs, int> class_of;
    std::vector<bool> class_complete;
    ClassPartition part;
  };

  std::vector<MonoidElement> trace_path(const ReachResult& r, const Coeffs& target) {
    std::vector<MonoidElement> path;
    Coeffs cur = target;
    while (true) {
      path.emplace_back(g_, cur);
      const Coeffs& p = r.parent.at(cur);
      if (p == cur) break;
      cur = p;
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  const std::vector<char>& closure_of(const Coeffs& c) {
    std::vector<char> mask(c.size(), 0);
    for (size_t i = 0; i < c.size(); ++i) mask[i] = c[i] != 0;
    auto it = closure_cache_.find(mask);
    if (it != closure_cache_.end()) return it->second;
    std::set<Token> supp;
    for (size_t i = 0; i < c.size(); ++i)
      if (mask[i]) supp.insert(g_.vertices()[i]);
    std::set<Token> cl = hereditary_saturated_closure(g_, supp);
    std::vector<char> out(c.size(), 0);
    for (const Token& v : cl) out[static_cast<size_t>(g_.vertex_index(v))] = 1;
    return closure_cache_.emplace(std::move(mask), std::move(out)).first->second;
  }

  const std::vector<QuotData>& quotients() {
    if (quots_) return *quots_;
    quots_.emplace();
    for (const HereditarySet& h : hereditary_saturated_subsets(g_)) {
      if (h.members.empty() || static_cast<int>(h.members.size()) == g_.num_vertices()) continue;
      QuotData q;
      q.h = h.members;
      q.quot = quotient(g_, h.members);
      q.grp = grothendieck_group(q.quot);
      q.idx.assign(static_cast<size_t>(g_.num_vertices()), -1);
      for (int i = 0; i < g_.num_vertices(); ++i) {
        const Token& v = g_.vertices()[static_cast<size_t>(i)];
        if (!h.members.count(v)) q.idx[static_cast<size_t>(i)] = q.quot.vertex_index(v);
      }
      quots_->push_back(std::move(q));
    }
    return *quots_;
  }

  std::vector<ktheory::Int> q_image(const QuotData& q, const Coeffs& c) {
    std::vector<ktheory::Int> x(static_cast<size_t>(q.quot.num_vertices()), 0);
    for (size_t i = 0; i < c.size(); ++i)
      if (q.idx[i] >= 0) x[static_cast<size_t>(q.idx[i])] = c[i];
    return q.grp.image(x);
  }

  std::string mask_str(const std::vector<char>& mask) const {
    std::string s = "{";
    bool first = true;
    for (size_t i = 0; i < mask.size(); ++i) {
      if (!mask[i]) continue;
      if (!first) s += ",";
      s += g_.vertices()[i];
      first = false;
    }
    return s + "}";
  }

  static std::string set_str(const std::set<Token>& s) {
    std::string out = "{";
    bool first = true;
    for (const Token& t : s) {
      if (!first) out += ",";
      out += t;
      first = false;
    }
    return out + "}";
  }

  static std::string ints_str(const std::vector<ktheory::Int>& v) {
    std::ostringstream os;
    os << '(';
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) os << ',';
      os << v[i];
    }
    os << ')';
    return os.str();
  }

  const SeparatedGraph& g_;
  Bounds b_;
  std::map<Coeffs, ReachResult> reach_cache_;
  std::map<std::vector<char>, std::vector<char>> closure_cache_;
  std::optional<ktheory::FgAbelianGroup> groth_;
  std::optional<std::vector<QuotData>> quots_;
  std::map<long long, ClassIndex> class_cache_;
};

// Convenience wrappers matching the per-call entry points. Sweeps should use
// a MonoidCalc directly to share caches.

inline std::vector<MonoidElement> reachable_set(const SeparatedGraph& g, const MonoidElement& x,
                                                int depth_bound, long long size_bound) {
  MonoidCalc calc(g, Bounds{depth_bound, size_bound});
  const ReachResult& r = calc.reach(x);
  std::vector<MonoidElement> out;
  for (const Coeffs& c : r.elems) out.emplace_back(g, c);
  return out;
}

inline EqVerdict equal(const SeparatedGraph& g, const MonoidElement& x, const MonoidElement& y,
                       Bounds b = {}) {
  MonoidCalc calc(g, b);
  return calc.equal(x, y);
}

inline LeqVerdict leq(const SeparatedGraph& g, const MonoidElement& x, const MonoidElement& y,
                      Bounds b = {}) {
  MonoidCalc calc(g, b);
  return calc.leq(x, y);
}

inline RefinementResult check_refinement(const SeparatedGraph& g, const MonoidElement& a,
                                         const MonoidElement& b, const MonoidElement& c,
                                         const MonoidElement& d, Bounds bounds = {}) {
  MonoidCalc calc(g, bounds);
  return calc.check_refinement(a, b, c, d);
}

inline PrimeVerdict is_prime_bounded(const SeparatedGraph& g, const Token& v, long long window_degree,
                                     Bounds b = {}) {
  MonoidCalc calc(g, b);
  return calc.is_prime_bounded(v, window_degree);
}

inline SeparativityReport check_separativity_bounded(const SeparatedGraph& g, long long window_degree,
                                                     Bounds b = {}) {
  MonoidCalc calc(g, b);
  return calc.check_separativity_bounded(window_degree);
}

inline ClassPartition enumerate_classes(const SeparatedGraph& g, long long degree_bound,
                                        Bounds b = {}) {
  MonoidCalc calc(g, b);
  return calc.enumerate_classes(degree_bound);
}

inline HomVerdict hom_is_well_defined(const SeparatedGraph& g_src, const SeparatedGraph& g_dst,
                                      const GeneratorMapping& mapping, Bounds b = {}) {
  MonoidCalc calc(g_dst, b);
  return calc.hom_well_defined(g_src, mapping);
}

}  // namespace sepmon
