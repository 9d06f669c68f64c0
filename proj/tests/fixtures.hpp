// Shared fixture graphs for the test suite. All are adaptable and have at
// most 8 vertices; corpus() collects the ones used by the sweeping checks.

#pragma once

#include <vector>

#include "sepmon/graph.hpp"

namespace fixtures {

using sepmon::Edge;
using sepmon::SeparatedGraph;
using sepmon::Token;

// Two-group vertex 1 over a free chain: both groups of 1 feed vertex 2, so
// condition (F) fails at [2].
inline SeparatedGraph intro() {
  return sepmon::build_separated_graph(
      {"1", "2", "3"},
      {{"e1", "1", "1"}, {"f1", "1", "2"}, {"e2", "1", "1"}, {"f2", "1", "2"},
       {"e3", "2", "2"}, {"f3", "2", "3"}},
      {{"1", {{"e1", "f1"}, {"e2", "f2"}}}, {"2", {{"e3", "f3"}}}});
}

// The two-copy unfolding of intro(): each group of 1 feeds its own copy of
// the chain 2 -> 3. Satisfies condition (F).
inline SeparatedGraph intro_unfolded() {
  return sepmon::build_separated_graph(
      {"1", "2p", "2q", "3p", "3q"},
      {{"e1", "1", "1"}, {"f1", "1", "2p"}, {"e2", "1", "1"}, {"f2", "1", "2q"},
       {"e3p", "2p", "2p"}, {"f3p", "2p", "3p"}, {"e3q", "2q", "2q"}, {"f3q", "2q", "3q"}},
      {{"1", {{"e1", "f1"}, {"e2", "f2"}}},
       {"2p", {{"e3p", "f3p"}}},
       {"2q", {{"e3q", "f3q"}}}});
}

// Presentation of <p, a, b | p = p + a = p + b>.
inline SeparatedGraph mgraph() {
  return sepmon::build_separated_graph(
      {"a", "b", "p"},
      {{"l1", "p", "p"}, {"c1", "p", "a"}, {"l2", "p", "p"}, {"c2", "p", "b"}},
      {{"p", {{"c1", "l1"}, {"c2", "l2"}}}});
}

inline SeparatedGraph single_sink() {
  return sepmon::build_separated_graph({"v"}, {}, {});
}

inline SeparatedGraph two_sinks() {
  return sepmon::build_separated_graph({"u", "w"}, {}, {});
}

inline SeparatedGraph four_sinks() {
  return sepmon::build_separated_graph({"s1", "s2", "s3", "s4"}, {}, {});
}

// Strongly connected 2-cycle, two parallel edges each way, one group per
// vertex: a regular component.
inline SeparatedGraph regular_cycle() {
  return sepmon::build_separated_graph(
      {"u", "w"},
      {{"uw1", "u", "w"}, {"uw2", "u", "w"}, {"wu1", "w", "u"}, {"wu2", "w", "u"}},
      {{"u", {{"uw1", "uw2"}}}, {"w", {{"wu1", "wu2"}}}});
}

// Regular 2-cycle with a connector down to a sink.
inline SeparatedGraph regular_cycle_sink() {
  return sepmon::build_separated_graph(
      {"s", "u", "w"},
      {{"uw1", "u", "w"}, {"uw2", "u", "w"}, {"us", "u", "s"},
       {"wu1", "w", "u"}, {"wu2", "w", "u"}},
      {{"u", {{"us", "uw1", "uw2"}}}, {"w", {{"wu1", "wu2"}}}});
}

// Single regular vertex: two loops and a connector in one group.
inline SeparatedGraph regular_singleton() {
  return sepmon::build_separated_graph(
      {"s", "v"},
      {{"l1", "v", "v"}, {"l2", "v", "v"}, {"vs", "v", "s"}},
      {{"v", {{"l1", "l2", "vs"}}}});
}

// Free chain v1 -> v2 -> v3, a single loop-plus-connector group at each
// non-sink vertex. Satisfies condition (F).
inline SeparatedGraph free_chain() {
  return sepmon::build_separated_graph(
      {"v1", "v2", "v3"},
      {{"a1", "v1", "v1"}, {"b1", "v1", "v2"}, {"a2", "v2", "v2"}, {"b2", "v2", "v3"}},
      {{"v1", {{"a1", "b1"}}}, {"v2", {{"a2", "b2"}}}});
}

// Free vertex with a doubled connector in one group.
inline SeparatedGraph doubled_connector() {
  return sepmon::build_separated_graph(
      {"a", "b", "p"},
      {{"l1", "p", "p"}, {"c1", "p", "a"}, {"c2", "p", "a"}, {"l2", "p", "p"}, {"c3", "p", "b"}},
      {{"p", {{"c1", "c2", "l1"}, {"c3", "l2"}}}});
}

// Three groups at vertex 1, all feeding vertex 2: unfolding needs two
// two-copy steps.
inline SeparatedGraph triple_group() {
  return sepmon::build_separated_graph(
      {"1", "2", "3"},
      {{"e1", "1", "1"}, {"f1", "1", "2"}, {"e2", "1", "1"}, {"f2", "1", "2"},
       {"e3", "1", "1"}, {"f3", "1", "2"}, {"g1", "2", "2"}, {"g2", "2", "3"}},
      {{"1", {{"e1", "f1"}, {"e2", "f2"}, {"e3", "f3"}}}, {"2", {{"g1", "g2"}}}});
}

// Root with two groups branching to separate chains: a forest satisfying (F).
inline SeparatedGraph branching() {
  return sepmon::build_separated_graph(
      {"r", "s", "t", "u", "w"},
      {{"lr1", "r", "r"}, {"ru", "r", "u"}, {"lr2", "r", "r"}, {"rw", "r", "w"},
       {"lu", "u", "u"}, {"us", "u", "s"}, {"lw", "w", "w"}, {"wt", "w", "t"}},
      {{"r", {{"lr1", "ru"}, {"lr2", "rw"}}},
       {"u", {{"lu", "us"}}},
       {"w", {{"lw", "wt"}}}});
}

// Regular 2-cycle over a non-minimal free vertex over a sink.
inline SeparatedGraph regular_over_free() {
  return sepmon::build_separated_graph(
      {"m", "s", "u", "w"},
      {{"uw1", "u", "w"}, {"uw2", "u", "w"}, {"um", "u", "m"},
       {"wu1", "w", "u"}, {"wu2", "w", "u"},
       {"lm", "m", "m"}, {"ms", "m", "s"}},
      {{"u", {{"um", "uw1", "uw2"}}}, {"w", {{"wu1", "wu2"}}}, {"m", {{"lm", "ms"}}}});
}

inline std::vector<SeparatedGraph> corpus() {
  return {intro(),          intro_unfolded(),  mgraph(),       single_sink(),
          two_sinks(),      four_sinks(),      regular_cycle(), regular_cycle_sink(),
          regular_singleton(), free_chain(),   doubled_connector(), triple_group(),
          branching(),      regular_over_free()};
}

inline std::vector<const char*> corpus_names() {
  return {"intro",          "intro_unfolded",  "mgraph",       "single_sink",
          "two_sinks",      "four_sinks",      "regular_cycle", "regular_cycle_sink",
          "regular_singleton", "free_chain",   "doubled_connector", "triple_group",
          "branching",      "regular_over_free"};
}

}  // namespace fixtures
