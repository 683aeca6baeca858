#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "hyrule/declarative.hpp"
#include "hyrule/errors.hpp"
#include "hyrule/parser.hpp"
#include "oracles.hpp"
#include "suites.hpp"
#include "support.hpp"

using namespace hyrule;
using namespace hyrule::testing;

TEST_CASE("well-founded model of the game") {
  auto f = game();
  auto g = ground_program(f.program, f.theory->domain());
  TheoryModel empty;
  auto q = reduce(g, *f.theory, empty);
  auto wf = well_founded_model(q);
  auto v = [&](const char* x) { return wf.value(q.id(atom("w", {x}))); };
  CHECK(v("a") == Truth::Undefined);
  CHECK(v("b") == Truth::Undefined);
  CHECK(v("c") == Truth::True);
  CHECK(v("d") == Truth::False);
  CHECK(v("e") == Truth::True);
  CHECK(v("f") == Truth::False);
  CHECK(wf.value(q.id(atom("m", {"a", "b"}))) == Truth::True);
  CHECK(wf.value(q.id(atom("m", {"b", "c"}))) == Truth::False);
}

TEST_CASE("psi from the empty interpretation") {
  // p <- ~q.  q <- ~p.  r <- ~s.
  GroundNormalProgram q;
  int p = q.intern(Atom{"p", {}}), qq = q.intern(Atom{"q", {}}), r = q.intern(Atom{"r", {}}), s = q.intern(Atom{"s", {}});
  q.rules = {{p, {}, {qq}}, {qq, {}, {p}}, {r, {}, {s}}};
  auto i1 = psi(q, ThreeValuedInterpretation::empty(q.size()));
  CHECK(i1.value(s) == Truth::False);
  CHECK(i1.value(r) == Truth::Undefined);
  auto i2 = psi(q, i1);
  CHECK(i2.value(r) == Truth::True);
  auto wf = well_founded_model(q);
  CHECK(wf.value(p) == Truth::Undefined);
  CHECK(wf.value(qq) == Truth::Undefined);
  CHECK(wf == i2);
}

TEST_CASE("reductions") {
  // p <- q, ~r.
  GroundNormalProgram q;
  int p = q.intern(Atom{"p", {}}), a = q.intern(Atom{"q", {}}), r = q.intern(Atom{"r", {}});
  q.rules = {{p, {a}, {r}}};
  auto i = ThreeValuedInterpretation::empty(q.size());
  i.false_atoms[static_cast<std::size_t>(r)] = true;
  const auto n = q.size();
  auto at = [](const std::vector<bool>& m, std::size_t k) { return static_cast<bool>(m[k]); };
  // Under p/t only literals false in I are assumed.
  auto mt = least_herbrand_model(p_slash_t(q, i));
  CHECK(at(mt, n + static_cast<std::size_t>(r)));
  CHECK(!at(mt, n + static_cast<std::size_t>(a)));
  CHECK(!at(mt, static_cast<std::size_t>(p)));
  // Under p/tu every literal not true in I is assumed.
  auto mtu = least_herbrand_model(p_slash_tu(q, i));
  CHECK(at(mtu, n + static_cast<std::size_t>(a)));
  CHECK(at(mtu, n + static_cast<std::size_t>(p)));
  CHECK(!at(mtu, static_cast<std::size_t>(p)));
  i.true_atoms[static_cast<std::size_t>(a)] = true;
  CHECK(!at(least_herbrand_model(p_slash_tu(q, i)), n + static_cast<std::size_t>(a)));
}

TEST_CASE("psi properties on random programs") {
  std::mt19937 rng(41);
  SuiteResult r;
  for (int i = 0; i < 150; ++i) check_psi(rng, r);
  CHECK_MESSAGE(r.ok(), (r.first));
}

TEST_CASE("stratified programs have total well-founded models") {
  std::mt19937 rng(43);
  for (int i = 0; i < 150; ++i) {
    std::vector<int> levels;
    auto g = random_ground_program(rng, 10, true, &levels);
    auto wf = well_founded_model(g.program);
    auto ref = stratified_model(g.atoms, g.rules, levels);
    for (int a = 0; a < g.atoms; ++a) {
      CHECK(wf.value(a) != Truth::Undefined);
      CHECK((wf.value(a) == Truth::True) == ref[static_cast<std::size_t>(a)]);
    }
  }
}

TEST_CASE("hybrid game classification") {
  auto f = hybrid_game();
  DeclarativeOracle o(f.program, *f.theory);
  auto c = [&](const char* x) { return o.classify({pos(atom("w", {x}))}); };
  CHECK(c("a").value == TruthValue4::Undefined);
  CHECK(c("b").value == TruthValue4::Undefined);
  CHECK(c("c").value == TruthValue4::True);
  CHECK(c("f").value == TruthValue4::False);
  auto d = c("d");
  CHECK(d.value == TruthValue4::ModelDependent);
  REQUIRE(d.witness);
  REQUIRE(d.witness_values);
  CHECK(d.witness_values->first != d.witness_values->second);
  CHECK(c("e").value == TruthValue4::ModelDependent);
  CHECK(o.classify({neg(atom("w", {"f"}))}).value == TruthValue4::True);
  CHECK(o.classify({pos(atom("w", {"c"}))}, parse_constraint("fi(f)")).value != TruthValue4::Undefined);
  CHECK_THROWS_AS(o.classify({pos(Atom{"w", {Term::variable("X")}})}), ContractError);
}

TEST_CASE("classification against the brute-force oracle") {
  std::mt19937 rng(47);
  for (int i = 0; i < 40; ++i) {
    auto g = next_program(rng);
    BruteForceOracle bf(g.program, g.spec);
    DeclarativeOracle lib(g.program, *g.theory);
    for (const auto& a : rule_atoms(g.program, g.theory->domain())) {
      CHECK_MESSAGE(lib.classify({pos(a)}).value == bf.classify({pos(a)}), (to_string(a) + "\n" + g.text));
      CHECK_MESSAGE(lib.classify({neg(a)}).value == bf.classify({neg(a)}), (to_string(a) + "\n" + g.text));
    }
  }
}

TEST_CASE("non-Datalog programs need a depth bound") {
  auto p = parse_program("#rulepreds n/1.\nn(z).\nn(s(X)) :- n(X).\n");
  CHECK_THROWS_AS(ground_program(p, {Term::constant("z")}), Refusal);
  auto g = ground_program(p, {Term::constant("z")}, 2);
  CHECK(g.herbrand_base.size() == 3);
}

TEST_CASE("negation-free programs agree with forward chaining") {
  auto p = parse_program(
      "#rulepreds r/1 s/1.\n#constraintpreds q/1.\n#constants a b.\n"
      "r(X) :- { q(X) }.\ns(X) :- r(X).\ns(b) :- { not q(b) }.\n#theory\nq(a).\n");
  FiniteGroundTheory t(*p.inline_theory, p.signature);
  CHECK(fol_compatibility_check(p, t, atom("s", {"a"})));
  CHECK(fol_compatibility_check(p, t, atom("s", {"b"})));
  CHECK(classify(p, t, {pos(atom("s", {"b"}))}).value == TruthValue4::True);
  CHECK(classify(p, t, {pos(atom("r", {"b"}))}).value == TruthValue4::ModelDependent);
  CHECK_THROWS_AS(fol_compatibility_check(game().program, *game().theory, atom("w", {"a"})), ContractError);
}
