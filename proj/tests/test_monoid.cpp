#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "sepmon/monoid.hpp"

using namespace sepmon;

namespace {

MonoidElement elt(const SeparatedGraph& g, std::map<Token, long long> m) {
  return MonoidElement(g, m);
}

std::set<Coeffs> coeff_set(const std::vector<MonoidElement>& xs) {
  std::set<Coeffs> s;
  for (const auto& x : xs) s.insert(x.coeffs());
  return s;
}

MonoidElement random_element(const SeparatedGraph& g, std::mt19937& rng, long long max_coeff) {
  Coeffs c(static_cast<size_t>(g.num_vertices()));
  std::uniform_int_distribution<long long> d(0, max_coeff);
  for (auto& x : c) x = d(rng);
  return MonoidElement(g, c);
}

}  // namespace

TEST_CASE("one-step rewrites") {
  SECTION("mgraph generator p") {
    SeparatedGraph g = fixtures::mgraph();
    auto r = one_step_rewrites(g, MonoidElement::generator(g, "p"));
    REQUIRE(coeff_set(r) ==
            std::set<Coeffs>{elt(g, {{"p", 1}, {"a", 1}}).coeffs(), elt(g, {{"p", 1}, {"b", 1}}).coeffs()});
  }
  SECTION("sinks do not rewrite") {
    SeparatedGraph g = fixtures::mgraph();
    REQUIRE(one_step_rewrites(g, MonoidElement::generator(g, "a")).empty());
  }
  SECTION("intro generator of the middle vertex") {
    SeparatedGraph g = fixtures::intro();
    auto r = one_step_rewrites(g, MonoidElement::generator(g, "2"));
    REQUIRE(coeff_set(r) == std::set<Coeffs>{elt(g, {{"2", 1}, {"3", 1}}).coeffs()});
  }
  SECTION("rewrite soundness: every successor is a depth-1 common reduct") {
    std::mt19937 rng(7);
    for (const SeparatedGraph& g : fixtures::corpus()) {
      if (g.num_vertices() == 0) continue;
      for (int i = 0; i < 5; ++i) {
        MonoidElement x = random_element(g, rng, 2);
        for (const MonoidElement& y : one_step_rewrites(g, x)) {
          EqVerdict v = equal(g, x, y);
          REQUIRE(v.status == EqStatus::EqualCertified);
        }
      }
    }
  }
}

TEST_CASE("bounded reachable sets") {
  SeparatedGraph g = fixtures::mgraph();
  SECTION("mgraph two-step window") {
    auto r = reachable_set(g, MonoidElement::generator(g, "p"), 2, 10);
    REQUIRE(coeff_set(r) == std::set<Coeffs>{
                                elt(g, {{"p", 1}}).coeffs(),
                                elt(g, {{"p", 1}, {"a", 1}}).coeffs(),
                                elt(g, {{"p", 1}, {"b", 1}}).coeffs(),
                                elt(g, {{"p", 1}, {"a", 2}}).coeffs(),
                                elt(g, {{"p", 1}, {"a", 1}, {"b", 1}}).coeffs(),
                                elt(g, {{"p", 1}, {"b", 2}}).coeffs(),
                            });
  }
  SECTION("depth zero returns the element alone") {
    auto r = reachable_set(g, elt(g, {{"p", 2}, {"a", 1}}), 0, 64);
    REQUIRE(r.size() == 1);
  }
  SECTION("sink-supported elements are fixed") {
    auto r = reachable_set(g, elt(g, {{"a", 3}, {"b", 1}}), 8, 64);
    REQUIRE(r.size() == 1);
  }
  SECTION("sink coordinates never decrease") {
    SeparatedGraph gi = fixtures::intro();
    MonoidCalc calc(gi);
    MonoidElement x = elt(gi, {{"1", 1}, {"3", 2}});
    for (const Coeffs& c : calc.reach(x).elems) REQUIRE(c[gi.vertex_index("3")] >= 2);
  }
}

TEST_CASE("certified equality") {
  SeparatedGraph g = fixtures::mgraph();
  MonoidCalc calc(g);
  MonoidElement p = MonoidElement::generator(g, "p");
  MonoidElement a = MonoidElement::generator(g, "a");
  MonoidElement b = MonoidElement::generator(g, "b");

  SECTION("defining relations hold") {
    EqVerdict v1 = calc.equal(p, p + a);
    REQUIRE(v1.status == EqStatus::EqualCertified);
    REQUIRE(v1.common_reduct);
    REQUIRE(v1.trace_x.front() == p);
    REQUIRE(v1.trace_x.back() == *v1.common_reduct);
    REQUIRE(v1.trace_y.back() == *v1.common_reduct);
    REQUIRE(calc.equal(p, p + b).status == EqStatus::EqualCertified);
    REQUIRE(calc.equal(p + a, p + b).status == EqStatus::EqualCertified);
  }
  SECTION("identical vectors") {
    REQUIRE(calc.equal(a + b, b + a).status == EqStatus::EqualCertified);
  }
  SECTION("distinct sinks are refuted by the support closure") {
    EqVerdict v = calc.equal(a, b);
    REQUIRE(v.status == EqStatus::UnequalCertified);
    REQUIRE(v.refuting_invariant == "support-closure");
  }
  SECTION("scaling a sink is refuted") {
    EqVerdict v = calc.equal(a, a + a);
    REQUIRE(v.status == EqStatus::UnequalCertified);
  }
  SECTION("conicality") {
    MonoidElement zero(g);
    REQUIRE(calc.equal(zero, zero).status == EqStatus::EqualCertified);
    REQUIRE(calc.equal(p, zero).status == EqStatus::UnequalCertified);
    REQUIRE(calc.equal(a + b, zero).status == EqStatus::UnequalCertified);
  }
  SECTION("certified equal elements share Grothendieck images") {
    for (const SeparatedGraph& gg : fixtures::corpus()) {
      if (gg.num_vertices() == 0) continue;
      MonoidCalc c2(gg);
      for (const MonoidClass& cls : c2.enumerate_classes(2).classes)
        for (const MonoidElement& m : cls.members)
          REQUIRE(c2.g_image(m.coeffs()) == c2.g_image(cls.rep.coeffs()));
    }
  }
}

TEST_CASE("certified order") {
  SeparatedGraph g = fixtures::mgraph();
  MonoidCalc calc(g);
  MonoidElement p = MonoidElement::generator(g, "p");
  MonoidElement a = MonoidElement::generator(g, "a");

  SECTION("a below p with witness") {
    LeqVerdict v = calc.leq(a, p);
    REQUIRE(v.status == LeqStatus::LeqCertified);
    REQUIRE(v.witness);
    REQUIRE(calc.equal(a + *v.witness, p).status == EqStatus::EqualCertified);
  }
  SECTION("reflexive") {
    LeqVerdict v = calc.leq(p, p);
    REQUIRE(v.status == LeqStatus::LeqCertified);
    REQUIRE(v.witness->is_zero());
  }
  SECTION("intro chain order") {
    SeparatedGraph gi = fixtures::intro();
    MonoidCalc ci(gi);
    LeqVerdict v = ci.leq(MonoidElement::generator(gi, "3"), MonoidElement::generator(gi, "1"));
    REQUIRE(v.status == LeqStatus::LeqCertified);
  }
  SECTION("p is not below the sinks") {
    LeqVerdict v = calc.leq(p, a);
    REQUIRE(v.status == LeqStatus::NotLeqCertified);
  }
  SECTION("witness soundness on corpus samples") {
    std::mt19937 rng(11);
    for (const SeparatedGraph& gg : fixtures::corpus()) {
      if (gg.num_vertices() == 0) continue;
      MonoidCalc c2(gg);
      for (int i = 0; i < 8; ++i) {
        MonoidElement x = random_element(gg, rng, 1);
        MonoidElement y = random_element(gg, rng, 2);
        LeqVerdict v = c2.leq(x, y);
        if (v.status == LeqStatus::LeqCertified)
          REQUIRE(c2.equal(x + *v.witness, y).status == EqStatus::EqualCertified);
      }
    }
  }
}

TEST_CASE("refinement squares") {
  SeparatedGraph g = fixtures::mgraph();
  MonoidCalc calc(g);
  MonoidElement p = MonoidElement::generator(g, "p");
  MonoidElement a = MonoidElement::generator(g, "a");
  MonoidElement b = MonoidElement::generator(g, "b");

  SECTION("p + a ~ p + b splits") {
    RefinementResult r = calc.check_refinement(p, a, p, b);
    REQUIRE(r.found);
    const RefinementSquare& s = *r.square;
    REQUIRE(s.x == p);
    REQUIRE(s.y == b);
    REQUIRE(s.z == a);
    REQUIRE(s.t.is_zero());
    REQUIRE(calc.equal(p, s.x + s.y).status == EqStatus::EqualCertified);
    REQUIRE(calc.equal(a, s.z + s.t).status == EqStatus::EqualCertified);
    REQUIRE(calc.equal(p, s.x + s.z).status == EqStatus::EqualCertified);
    REQUIRE(calc.equal(b, s.y + s.t).status == EqStatus::EqualCertified);
  }
  SECTION("diagonal refinement") {
    RefinementResult r = calc.check_refinement(p, a, p, a);
    REQUIRE(r.found);
    REQUIRE(r.square->x == p);
    REQUIRE(r.square->t == a);
    REQUIRE(r.square->y.is_zero());
    REQUIRE(r.square->z.is_zero());
  }
  SECTION("uncertified precondition is rejected") {
    REQUIRE_THROWS_AS(calc.check_refinement(a, a, b, b), PreconditionUnverified);
  }
}

TEST_CASE("bounded primality") {
  SECTION("mgraph root") {
    SeparatedGraph g = fixtures::mgraph();
    MonoidCalc calc(g);
    PrimeVerdict v = calc.is_prime_bounded("p", 4);
    REQUIRE(v.status == PrimeStatus::Holds);
  }
  SECTION("single sink") {
    SeparatedGraph g = fixtures::single_sink();
    MonoidCalc calc(g);
    REQUIRE(calc.is_prime_bounded("v", 4).status == PrimeStatus::Holds);
  }
  SECTION("intro middle vertex") {
    SeparatedGraph g = fixtures::intro();
    MonoidCalc calc(g);
    REQUIRE(calc.is_prime_bounded("2", 4).status == PrimeStatus::Holds);
  }
}

TEST_CASE("generator kinds") {
  SeparatedGraph gi = fixtures::intro();
  AdaptableDecoration di = classify_adaptable(gi);
  REQUIRE(generator_kind(gi, di, "1") == GeneratorKind::Free);
  REQUIRE(generator_kind(gi, di, "3") == GeneratorKind::Free);
  SeparatedGraph gr = fixtures::regular_cycle();
  AdaptableDecoration dr = classify_adaptable(gr);
  REQUIRE(generator_kind(gr, dr, "u") == GeneratorKind::Regular);

  SECTION("order-theoretic cross-check in a bounded window") {
    // free: nx <= mx certified only when n <= m; regular: 2x <= x
    MonoidCalc ci(gi);
    MonoidElement a1 = MonoidElement::generator(gi, "1");
    REQUIRE(ci.leq(a1.scaled(3), a1.scaled(2)).status != LeqStatus::LeqCertified);
    MonoidCalc cr(gr);
    MonoidElement au = MonoidElement::generator(gr, "u");
    REQUIRE(cr.leq(au.scaled(2), au).status == LeqStatus::LeqCertified);
  }
}

TEST_CASE("bounded separativity") {
  SECTION("mgraph window") {
    SeparatedGraph g = fixtures::mgraph();
    MonoidCalc calc(g);
    SeparativityReport rep = calc.check_separativity_bounded(4);
    REQUIRE(rep.violations.empty());
  }
  SECTION("free monoid is cancellative") {
    SeparatedGraph g = fixtures::two_sinks();
    MonoidCalc calc(g);
    SeparativityReport rep = calc.check_separativity_bounded(4);
    REQUIRE(rep.violations.empty());
    REQUIRE(rep.unresolved.empty());
  }
  SECTION("intro window") {
    SeparatedGraph g = fixtures::intro();
    MonoidCalc calc(g);
    SeparativityReport rep = calc.check_separativity_bounded(4);
    REQUIRE(rep.violations.empty());
  }
}

TEST_CASE("class enumeration") {
  SeparatedGraph g = fixtures::mgraph();
  MonoidCalc calc(g);
  SECTION("degree one: no identifications") {
    const ClassPartition& part = calc.enumerate_classes(1);
    REQUIRE(part.classes.size() == 4);
  }
  SECTION("degree zero") {
    MonoidCalc c0(g);
    REQUIRE(c0.enumerate_classes(0).classes.size() == 1);
  }
  SECTION("degree two merges p with p+a and p+b") {
    MonoidCalc c2(g);
    const ClassPartition& part = c2.enumerate_classes(2);
    int pc = c2.class_of(2, MonoidElement::generator(g, "p").coeffs());
    REQUIRE(pc >= 0);
    const MonoidClass& cls = part.classes[static_cast<size_t>(pc)];
    std::set<Coeffs> members = coeff_set(cls.members);
    REQUIRE(members.count(elt(g, {{"p", 1}}).coeffs()) == 1);
    REQUIRE(members.count(elt(g, {{"p", 1}, {"a", 1}}).coeffs()) == 1);
    REQUIRE(members.count(elt(g, {{"p", 1}, {"b", 1}}).coeffs()) == 1);
  }
  SECTION("classes only merge as the window grows") {
    for (const SeparatedGraph& gg : fixtures::corpus()) {
      MonoidCalc small(gg, Bounds{4, 32});
      MonoidCalc large(gg, Bounds{8, 64});
      const ClassPartition& ps = small.enumerate_classes(2);
      large.enumerate_classes(2);
      for (const MonoidClass& cls : ps.classes) {
        int id = large.class_of(2, cls.rep.coeffs());
        for (const MonoidElement& m : cls.members)
          REQUIRE(large.class_of(2, m.coeffs()) == id);
      }
    }
  }
}

TEST_CASE("support-closure invariance under rewriting") {
  std::mt19937 rng(23);
  for (const SeparatedGraph& g : fixtures::corpus()) {
    if (g.num_vertices() == 0) continue;
    MonoidCalc calc(g);
    for (int i = 0; i < 6; ++i) {
      MonoidElement x = random_element(g, rng, 2);
      std::string sig = calc.signature(x.coeffs());
      for (const MonoidElement& y : one_step_rewrites(g, x))
        REQUIRE(calc.signature(y.coeffs()) == sig);
    }
  }
}

TEST_CASE("generator-image homomorphisms") {
  SeparatedGraph g = fixtures::mgraph();
  SECTION("quotient hom killing the sinks") {
    SeparatedGraph q = quotient(g, {"a", "b"});
    GeneratorMapping m;
    m["p"] = MonoidElement::generator(q, "p");
    m["a"] = MonoidElement(q);
    m["b"] = MonoidElement(q);
    MonoidElement img = induced_hom_apply(m, MonoidElement(g, {{"p", 1}, {"a", 2}}));
    REQUIRE(img == MonoidElement::generator(q, "p"));
    REQUIRE(hom_is_well_defined(g, q, m).status == HomStatus::Holds);
  }
  SECTION("identity mapping") {
    GeneratorMapping m;
    for (const Token& v : g.vertices()) m[v] = MonoidElement::generator(g, v);
    MonoidElement x(g, {{"p", 2}, {"b", 1}});
    REQUIRE(induced_hom_apply(m, x) == x);
    REQUIRE(hom_is_well_defined(g, g, m).status == HomStatus::Holds);
  }
  SECTION("missing generator") {
    GeneratorMapping m;
    m["p"] = MonoidElement::generator(g, "p");
    REQUIRE_THROWS_AS(induced_hom_apply(m, MonoidElement::generator(g, "a")),
                      UnknownGeneratorError);
  }
  SECTION("partial collapse fails a relation") {
    GeneratorMapping m;
    m["p"] = MonoidElement(g);
    m["a"] = MonoidElement::generator(g, "a");
    m["b"] = MonoidElement::generator(g, "b");
    HomVerdict v = hom_is_well_defined(g, g, m);
    REQUIRE(v.status == HomStatus::Fails);
  }
  SECTION("killing every generator is well defined") {
    GeneratorMapping m;
    for (const Token& v : g.vertices()) m[v] = MonoidElement(g);
    REQUIRE(hom_is_well_defined(g, g, m).status == HomStatus::Holds);
  }
  SECTION("cover projection from the unfolded graph") {
    SeparatedGraph src = fixtures::intro_unfolded();
    SeparatedGraph dst = fixtures::intro();
    GeneratorMapping m;
    m["1"] = MonoidElement::generator(dst, "1");
    m["2p"] = m["2q"] = MonoidElement::generator(dst, "2");
    m["3p"] = m["3q"] = MonoidElement::generator(dst, "3");
    REQUIRE(hom_is_well_defined(src, dst, m).status == HomStatus::Holds);
  }
}

TEST_CASE("grothendieck groups of graph monoids") {
  SECTION("mgraph gives Z") {
    ktheory::FgAbelianGroup g = grothendieck_group(fixtures::mgraph());
    REQUIRE(g.free_rank == 1);
    REQUIRE(g.torsion.empty());
  }
  SECTION("intro gives Z") {
    ktheory::FgAbelianGroup g = grothendieck_group(fixtures::intro());
    REQUIRE(g.free_rank == 1);
    REQUIRE(g.torsion.empty());
  }
  SECTION("edgeless two sinks give Z^2") {
    ktheory::FgAbelianGroup g = grothendieck_group(fixtures::two_sinks());
    REQUIRE(g.free_rank == 2);
    REQUIRE(g.torsion.empty());
  }
  SECTION("projection annihilates every monoid relation") {
    for (const SeparatedGraph& g : fixtures::corpus()) {
      ktheory::IntMatrix rel = relation_matrix(g);
      ktheory::FgAbelianGroup grp = grothendieck_group(g);
      for (long j = 0; j < rel.cols; ++j) {
        std::vector<ktheory::Int> col(static_cast<size_t>(rel.rows));
        for (long i = 0; i < rel.rows; ++i) col[static_cast<size_t>(i)] = rel.at(i, j);
        for (const ktheory::Int& x : grp.image(col)) REQUIRE(x == 0);
      }
    }
  }
}
