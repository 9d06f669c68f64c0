#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "fixtures.hpp"
#include "sepmon/graph.hpp"

using namespace sepmon;

namespace {

std::set<Token> tokens(std::initializer_list<const char*> xs) {
  std::set<Token> s;
  for (const char* x : xs) s.insert(x);
  return s;
}

// Powerset oracle for the hereditary C-saturated subsets of a small graph.
std::vector<std::set<Token>> subsets_oracle(const SeparatedGraph& g) {
  std::vector<std::set<Token>> out;
  const auto& vs = g.vertices();
  size_t n = vs.size();
  for (size_t mask = 0; mask < (size_t{1} << n); ++mask) {
    std::set<Token> h;
    for (size_t i = 0; i < n; ++i)
      if (mask & (size_t{1} << i)) h.insert(vs[i]);
    if (is_hereditary(g, h) && is_c_saturated(g, h)) out.push_back(std::move(h));
  }
  std::sort(out.begin(), out.end(), [](const std::set<Token>& a, const std::set<Token>& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

}  // namespace

TEST_CASE("construction validates its input") {
  SECTION("duplicate vertex token") {
    REQUIRE_THROWS_AS(build_separated_graph({"v", "v"}, {}, {}), GraphError);
  }
  SECTION("dangling endpoint") {
    REQUIRE_THROWS_AS(build_separated_graph({"v"}, {{"e", "v", "w"}}, {{"v", {{"e"}}}}),
                      GraphError);
  }
  SECTION("edge in two groups") {
    try {
      build_separated_graph({"v"}, {{"e", "v", "v"}}, {{"v", {{"e"}, {"e"}}}});
      FAIL("expected GraphError");
    } catch (const GraphError& err) {
      REQUIRE(err.code() == GraphErrc::GroupNotPartition);
    }
  }
  SECTION("groups must cover the outgoing edges") {
    try {
      build_separated_graph({"v", "w"}, {{"e", "v", "v"}, {"f", "v", "w"}}, {{"v", {{"e"}}}});
      FAIL("expected GraphError");
    } catch (const GraphError& err) {
      REQUIRE(err.code() == GraphErrc::GroupNotPartition);
    }
  }
  SECTION("empty group rejected") {
    REQUIRE_THROWS_AS(build_separated_graph({"v"}, {}, {{"v", {{}}}}), GraphError);
  }
  SECTION("sink graph with no groups is fine") {
    SeparatedGraph g = build_separated_graph({"v"}, {}, {});
    REQUIRE(g.num_vertices() == 1);
    REQUIRE(g.is_sink(0));
  }
}

TEST_CASE("condensation posets") {
  SECTION("three-vertex chain") {
    CondensationPoset p = condensation(fixtures::intro());
    REQUIRE(p.size() == 3);
    REQUIRE(p.components[0] == std::vector<Token>{"1"});
    REQUIRE(p.components[1] == std::vector<Token>{"2"});
    REQUIRE(p.components[2] == std::vector<Token>{"3"});
    int c1 = p.component_of.at("1"), c2 = p.component_of.at("2"), c3 = p.component_of.at("3");
    REQUIRE(p.lt(c3, c2));
    REQUIRE(p.lt(c2, c1));
    REQUIRE(p.lt(c3, c1));
    REQUIRE_FALSE(p.le(c1, c2));
  }
  SECTION("two-cycle collapses") {
    CondensationPoset p = condensation(fixtures::regular_cycle());
    REQUIRE(p.size() == 1);
    REQUIRE(p.components[0] == std::vector<Token>{"u", "w"});
  }
  SECTION("edgeless graph is an antichain") {
    CondensationPoset p = condensation(build_separated_graph({"a", "b", "c"}, {}, {}));
    REQUIRE(p.size() == 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) REQUIRE(p.le(i, j) == (i == j));
  }
  SECTION("order axioms on the corpus") {
    for (const SeparatedGraph& g : fixtures::corpus()) {
      CondensationPoset p = condensation(g);
      for (int i = 0; i < p.size(); ++i) {
        REQUIRE(p.le(i, i));
        for (int j = 0; j < p.size(); ++j) {
          if (i != j && p.le(i, j)) REQUIRE_FALSE(p.le(j, i));
          for (int k = 0; k < p.size(); ++k)
            if (p.le(i, j) && p.le(j, k)) REQUIRE(p.le(i, k));
        }
      }
    }
  }
}

TEST_CASE("adaptability classification") {
  SECTION("intro graph: three free primes") {
    AdaptableDecoration dec = classify_adaptable(fixtures::intro());
    REQUIRE(dec.free_comps.size() == 3);
    REQUIRE(dec.regular_comps.empty());
    int c1 = dec.poset.component_of.at("1");
    REQUIRE(dec.loops.at(c1).size() == 2);
    REQUIRE(dec.connectors.at(c1) == std::vector<Token>{"f1", "f2"});
  }
  SECTION("single sink is a minimal free prime") {
    AdaptableDecoration dec = classify_adaptable(fixtures::single_sink());
    REQUIRE(dec.free_comps.size() == 1);
    REQUIRE(dec.is_minimal(0));
  }
  SECTION("regular cycle") {
    AdaptableDecoration dec = classify_adaptable(fixtures::regular_cycle());
    REQUIRE(dec.regular_comps.size() == 1);
    REQUIRE(dec.free_comps.empty());
  }
  SECTION("regular singleton needs two loops") {
    AdaptableDecoration dec = classify_adaptable(fixtures::regular_singleton());
    REQUIRE(dec.regular_comps.size() == 1);
  }
  SECTION("multi-vertex component with separation is rejected") {
    SeparatedGraph g = build_separated_graph(
        {"u", "w"},
        {{"uw1", "u", "w"}, {"uw2", "u", "w"}, {"wu1", "w", "u"}, {"wu2", "w", "u"}},
        {{"u", {{"uw1"}, {"uw2"}}}, {"w", {{"wu1", "wu2"}}}});
    try {
      classify_adaptable(g);
      FAIL("expected NotAdaptableError");
    } catch (const NotAdaptableError& e) {
      REQUIRE(e.reason() == NotAdaptableReason::MultiVertexComponentWithSeparation);
    }
  }
  SECTION("regular vertex with one internal edge is rejected") {
    SeparatedGraph g = build_separated_graph(
        {"u", "w"}, {{"uw", "u", "w"}, {"wu", "w", "u"}},
        {{"u", {{"uw"}}}, {"w", {{"wu"}}}});
    try {
      classify_adaptable(g);
      FAIL("expected NotAdaptableError");
    } catch (const NotAdaptableError& e) {
      REQUIRE(e.reason() == NotAdaptableReason::RegularVertexTooFewEdges);
    }
  }
  SECTION("free group without loop is rejected") {
    SeparatedGraph g = build_separated_graph(
        {"s", "v"}, {{"vs", "v", "s"}}, {{"v", {{"vs"}}}});
    try {
      classify_adaptable(g);
      FAIL("expected NotAdaptableError");
    } catch (const NotAdaptableError& e) {
      REQUIRE(e.reason() == NotAdaptableReason::FreeGroupMissingLoop);
    }
  }
  SECTION("lonely loop vertex is rejected") {
    SeparatedGraph g = build_separated_graph({"v"}, {{"l", "v", "v"}}, {{"v", {{"l"}}}});
    try {
      classify_adaptable(g);
      FAIL("expected NotAdaptableError");
    } catch (const NotAdaptableError& e) {
      REQUIRE(e.reason() == NotAdaptableReason::MinimalFreeNotSink);
    }
  }
  SECTION("free group without connector is rejected") {
    SeparatedGraph g = build_separated_graph(
        {"s", "v"},
        {{"l1", "v", "v"}, {"vs", "v", "s"}, {"l2", "v", "v"}},
        {{"v", {{"l1", "vs"}, {"l2"}}}});
    try {
      classify_adaptable(g);
      FAIL("expected NotAdaptableError");
    } catch (const NotAdaptableError& e) {
      REQUIRE(e.reason() == NotAdaptableReason::FreeGroupNoConnector);
    }
  }
  SECTION("whole corpus is adaptable") {
    for (const SeparatedGraph& g : fixtures::corpus()) REQUIRE(is_adaptable(g));
  }
}

TEST_CASE("condition (F)") {
  SECTION("intro graph fails at the shared target") {
    SeparatedGraph g = fixtures::intro();
    AdaptableDecoration dec = classify_adaptable(g);
    ConditionFVerdict v = check_condition_F(g, dec);
    REQUIRE_FALSE(v.holds);
    REQUIRE(v.witness);
    REQUIRE(dec.poset.components[static_cast<size_t>(v.witness->component)] ==
            std::vector<Token>{"2"});
  }
  SECTION("unfolded intro graph satisfies (F)") {
    SeparatedGraph g = fixtures::intro_unfolded();
    REQUIRE(check_condition_F(g, classify_adaptable(g)).holds);
  }
  SECTION("mgraph satisfies (F)") {
    SeparatedGraph g = fixtures::mgraph();
    REQUIRE(check_condition_F(g, classify_adaptable(g)).holds);
  }
  SECTION("(F) implies forest on the corpus") {
    for (const SeparatedGraph& g : fixtures::corpus()) {
      AdaptableDecoration dec = classify_adaptable(g);
      if (check_condition_F(g, dec).holds) REQUIRE(is_forest(dec.poset));
    }
  }
}

TEST_CASE("forest recognition") {
  REQUIRE(is_forest(condensation(fixtures::intro_unfolded())));
  REQUIRE(is_forest(condensation(fixtures::single_sink())));
  SECTION("diamond is not a forest") {
    SeparatedGraph g = build_separated_graph(
        {"a", "b", "c", "d"},
        {{"ab", "a", "b"}, {"ac", "a", "c"}, {"bd", "b", "d"}, {"cd", "c", "d"}},
        {{"a", {{"ab", "ac"}}}, {"b", {{"bd"}}}, {"c", {{"cd"}}}});
    REQUIRE_FALSE(is_forest(condensation(g)));
  }
}

TEST_CASE("hereditary C-saturated subsets") {
  SECTION("mgraph") {
    auto subs = hereditary_saturated_subsets(fixtures::mgraph());
    REQUIRE(subs.size() == 5);
    REQUIRE(subs[0].members.empty());
    REQUIRE(subs[1].members == tokens({"a"}));
    REQUIRE(subs[2].members == tokens({"b"}));
    REQUIRE(subs[3].members == tokens({"a", "b"}));
    REQUIRE(subs[4].members == tokens({"a", "b", "p"}));
  }
  SECTION("intro graph") {
    auto subs = hereditary_saturated_subsets(fixtures::intro());
    REQUIRE(subs.size() == 4);
    REQUIRE(subs[0].members.empty());
    REQUIRE(subs[1].members == tokens({"3"}));
    REQUIRE(subs[2].members == tokens({"2", "3"}));
    REQUIRE(subs[3].members == tokens({"1", "2", "3"}));
  }
  SECTION("edgeless singleton") {
    auto subs = hereditary_saturated_subsets(build_separated_graph({"u"}, {}, {}));
    REQUIRE(subs.size() == 2);
  }
  SECTION("agrees with the powerset oracle on the corpus") {
    for (const SeparatedGraph& g : fixtures::corpus()) {
      auto subs = hereditary_saturated_subsets(g);
      auto oracle = subsets_oracle(g);
      REQUIRE(subs.size() == oracle.size());
      for (size_t i = 0; i < subs.size(); ++i) REQUIRE(subs[i].members == oracle[i]);
    }
  }
  SECTION("closed under union and intersection") {
    for (const SeparatedGraph& g : fixtures::corpus()) {
      auto subs = hereditary_saturated_subsets(g);
      std::set<std::set<Token>> all;
      for (const auto& s : subs) all.insert(s.members);
      for (const auto& x : subs)
        for (const auto& y : subs) {
          std::set<Token> uni = x.members, inter;
          uni.insert(y.members.begin(), y.members.end());
          std::set_intersection(x.members.begin(), x.members.end(), y.members.begin(),
                                y.members.end(), std::inserter(inter, inter.begin()));
          REQUIRE(all.count(uni) == 1);
          REQUIRE(all.count(inter) == 1);
        }
    }
  }
  SECTION("closure operator") {
    SeparatedGraph g = fixtures::intro();
    REQUIRE(hereditary_saturated_closure(g, {"3"}) == tokens({"3"}));
    REQUIRE(hereditary_saturated_closure(g, {"1"}) == tokens({"1", "2", "3"}));
    REQUIRE(hereditary_saturated_closure(g, {"2"}) == tokens({"2", "3"}));
  }
}

TEST_CASE("restriction and quotient") {
  SECTION("restriction keeps full groups") {
    SeparatedGraph r = restrict_to(fixtures::intro_unfolded(), tokens({"2p", "3p"}));
    REQUIRE(r.num_vertices() == 2);
    REQUIRE(r.num_edges() == 2);
    REQUIRE(r.groups_at("2p").size() == 1);
  }
  SECTION("restriction to a non-hereditary set is rejected") {
    REQUIRE_THROWS_AS(restrict_to(fixtures::intro(), tokens({"2"})), GraphError);
  }
  SECTION("restriction to everything is the identity") {
    SeparatedGraph g = fixtures::intro();
    std::set<Token> all(g.vertices().begin(), g.vertices().end());
    REQUIRE(restrict_to(g, all) == g);
  }
  SECTION("quotient trims groups") {
    SeparatedGraph q = quotient(fixtures::mgraph(), tokens({"a", "b"}));
    REQUIRE(q.num_vertices() == 1);
    REQUIRE(q.num_edges() == 2);
    REQUIRE(q.groups_at("p").size() == 2);
    for (const auto& grp : q.groups_at("p")) REQUIRE(grp.size() == 1);
  }
  SECTION("quotient by the empty set is the identity") {
    SeparatedGraph g = fixtures::intro_unfolded();
    REQUIRE(quotient(g, {}) == g);
  }
  SECTION("quotient requires heredity") {
    REQUIRE_THROWS_AS(quotient(fixtures::intro(), tokens({"2"})), GraphError);
  }
  SECTION("quotient requires saturation") {
    // {s} is hereditary but the whole range of v's group lies inside it
    SeparatedGraph g = build_separated_graph({"s", "v"}, {{"vs", "v", "s"}}, {{"v", {{"vs"}}}});
    try {
      quotient(g, tokens({"s"}));
      FAIL("expected GraphError");
    } catch (const GraphError& err) {
      REQUIRE(err.code() == GraphErrc::NotSaturated);
    }
  }
  SECTION("restriction of adaptable stays adaptable") {
    for (const SeparatedGraph& g : fixtures::corpus())
      for (const auto& h : hereditary_saturated_subsets(g))
        REQUIRE(is_adaptable(restrict_to(g, h.members)));
  }
}

TEST_CASE("trees and reduced graphs") {
  SeparatedGraph g = fixtures::intro_unfolded();
  AdaptableDecoration dec = classify_adaptable(g);
  SECTION("tree and strict tree") {
    REQUIRE(tree_vertices(g, dec, "2p") == tokens({"2p", "3p"}));
    REQUIRE(tree_vertices(g, dec, "3p", true).empty());
    REQUIRE(tree_vertices(g, dec, "1", true) == tokens({"2p", "2q", "3p", "3q"}));
    REQUIRE(tree(g, dec, "2p").num_vertices() == 2);
    REQUIRE(strict_tree(g, dec, "1").num_vertices() == 4);
  }
  SECTION("reduced graph of the unfolded intro") {
    ReducedGraph r = reduced_graph(g, dec);
    REQUIRE(r.vertices.size() == 5);
    REQUIRE(r.edges.size() == 4);
    for (const Edge& e : r.edges) {
      CondensationPoset p = dec.poset;
      REQUIRE(p.lt(p.component_of.at(e.dst), p.component_of.at(e.src)));
    }
  }
  SECTION("reduced graph of the intro") {
    SeparatedGraph gi = fixtures::intro();
    AdaptableDecoration di = classify_adaptable(gi);
    ReducedGraph r = reduced_graph(gi, di);
    REQUIRE(r.vertices.size() == 3);
    REQUIRE(r.edges.size() == 3);
    int into2 = 0;
    for (const Edge& e : r.edges)
      if (e.dst == "2") ++into2;
    REQUIRE(into2 == 2);
  }
}

TEST_CASE("lower subsets") {
  SECTION("chain of three") {
    REQUIRE(lower_subsets(condensation(fixtures::intro())).size() == 4);
  }
  SECTION("antichain of two") {
    REQUIRE(lower_subsets(condensation(fixtures::two_sinks())).size() == 4);
  }
  SECTION("unfolded intro poset: root over two 2-chains") {
    // 3 * 3 down-sets avoiding the root plus the full set
    REQUIRE(lower_subsets(condensation(fixtures::intro_unfolded())).size() == 10);
  }
  SECTION("matches the powerset oracle") {
    for (const SeparatedGraph& g : fixtures::corpus()) {
      CondensationPoset p = condensation(g);
      size_t count = 0;
      for (size_t mask = 0; mask < (size_t{1} << p.size()); ++mask) {
        bool lower = true;
        for (int c = 0; c < p.size() && lower; ++c)
          if (mask & (size_t{1} << c))
            for (int d = 0; d < p.size(); ++d)
              if (p.lt(d, c) && !(mask & (size_t{1} << d))) lower = false;
        if (lower) ++count;
      }
      REQUIRE(lower_subsets(p).size() == count);
    }
  }
  SECTION("every returned set is lower") {
    for (const SeparatedGraph& g : fixtures::corpus()) {
      CondensationPoset p = condensation(g);
      for (const auto& ls : lower_subsets(p))
        for (int c : ls)
          for (int d = 0; d < p.size(); ++d)
            if (p.lt(d, c)) REQUIRE(ls.count(d) == 1);
    }
  }
}

TEST_CASE("token-renaming isomorphism") {
  SeparatedGraph a = fixtures::intro_unfolded();
  SeparatedGraph renamed = build_separated_graph(
      {"root", "x", "y", "xs", "ys"},
      {{"r1", "root", "root"}, {"rx", "root", "x"}, {"r2", "root", "root"}, {"ry", "root", "y"},
       {"lx", "x", "x"}, {"xd", "x", "xs"}, {"ly", "y", "y"}, {"yd", "y", "ys"}},
      {{"root", {{"r1", "rx"}, {"r2", "ry"}}}, {"x", {{"lx", "xd"}}}, {"y", {{"ly", "yd"}}}});
  REQUIRE(isomorphic(a, renamed));
  REQUIRE_FALSE(isomorphic(a, fixtures::intro()));
  REQUIRE(isomorphic(fixtures::mgraph(), fixtures::mgraph()));
  REQUIRE_FALSE(isomorphic(fixtures::mgraph(), fixtures::doubled_connector()));
}
