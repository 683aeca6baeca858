#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "hyrule/cet.hpp"
#include "hyrule/errors.hpp"
#include "hyrule/parser.hpp"
#include "hyrule/printer.hpp"
#include "suites.hpp"
#include "support.hpp"

using namespace hyrule;
using namespace hyrule::testing;

namespace {

Constraint random_ground_constraint(std::mt19937& rng, const FiniteGroundTheory& t, int depth) {
  const auto& dom = t.domain();
  auto constant = [&] { return dom[static_cast<std::size_t>(roll(rng, 0, static_cast<int>(dom.size()) - 1))]; };
  if (depth == 0 || chance(rng, 0.3)) {
    if (chance(rng, 0.2)) return Constraint::equal(constant(), constant());
    std::vector<std::pair<std::string, std::size_t>> preds(t.predicates().begin(), t.predicates().end());
    const auto& [p, n] = preds[static_cast<std::size_t>(roll(rng, 0, static_cast<int>(preds.size()) - 1))];
    std::vector<Term> args;
    for (std::size_t i = 0; i < n; ++i) args.push_back(chance(rng, 0.3) ? Term::variable("X") : constant());
    return Constraint::atom(p, args);
  }
  switch (roll(rng, 0, 3)) {
    case 0:
      return Constraint::negation(random_ground_constraint(rng, t, depth - 1));
    case 1:
      return Constraint::conjunction({random_ground_constraint(rng, t, depth - 1), random_ground_constraint(rng, t, depth - 1)});
    case 2:
      return Constraint::disjunction({random_ground_constraint(rng, t, depth - 1), random_ground_constraint(rng, t, depth - 1)});
    default:
      return Constraint::exists({"X"}, random_ground_constraint(rng, t, depth - 1));
  }
}

// A closed constraint: free X is closed existentially.
Constraint closed(const Constraint& c) { return restrict_to(c, {}); }

}  // namespace

TEST_CASE("geo theory") {
  auto f = hybrid_game();
  const auto& t = *f.theory;
  CHECK(t.capabilities().witness_property);
  CHECK(t.capabilities().models_enumerable);
  CHECK(t.consistent());
  CHECK(t.entails(parse_constraint("fi(b)")));
  CHECK(t.entails(parse_constraint("e_cls(b)")));
  CHECK(t.entails(parse_constraint("e_cls(c)")));
  CHECK(!t.entails(parse_constraint("fi(f)")));
  CHECK(!t.entails(parse_constraint("not fi(f)")));
  CHECK(t.entails(parse_constraint("not fi(f) or e_cls(f)")));
  CHECK(t.entails(parse_constraint("exists X: fi(X)")));
  CHECK(t.satisfiable(parse_constraint("fi(f) and not e_cls(f)")) == Sat::Unsat);
  CHECK(t.satisfiable(parse_constraint("fi(X) and X = f")) == Sat::Sat);
  CHECK(t.valid(parse_constraint("not fi(X) or e_cls(X)")));
  CHECK_THROWS_AS(t.entails(parse_constraint("fi(X)")), ContractError);
}

TEST_CASE("equality is syntactic") {
  auto t = game().theory->entails(parse_constraint("not a = b"));
  CHECK(t);
  CHECK(game().theory->entails(parse_constraint("a = a")));
  CHECK(game().theory->entails(parse_constraint("exists X: X = a")));
}

TEST_CASE("empty domain makes existentials false") {
  auto p = parse_program("#constraintpreds q/1.\np :- { q(X) }, r.\n");
  FiniteGroundTheory t(TheorySpec{}, p.signature);
  CHECK(t.domain().empty());
  CHECK(t.satisfiable(parse_constraint("exists X: q(X)")) == Sat::Unsat);
}

TEST_CASE("entailment agrees with model enumeration") {
  std::mt19937 rng(21);
  int checked = 0;
  while (checked < 60) {
    auto g = next_program(rng);
    if (g.theory->predicates().empty() || g.theory->domain().empty()) continue;
    ++checked;
    std::vector<TheoryModel> models;
    g.theory->enumerate_models([&](const TheoryModel& m) { models.push_back(m); });
    CHECK(models.size() == g.theory->count_models());
    for (int i = 0; i < 10; ++i) {
      auto c = closed(random_ground_constraint(rng, *g.theory, 3));
      bool all = true, some = false;
      for (const auto& m : models) {
        bool h = g.theory->holds(c, m);
        all = all && h;
        some = some || h;
      }
      CHECK_MESSAGE(g.theory->entails(c) == all, (to_string(c) + "\n" + g.text));
      CHECK_MESSAGE((g.theory->satisfiable(c) == Sat::Sat) == some, (to_string(c) + "\n" + g.text));
      CHECK((g.theory->satisfiable(c) == Sat::Sat) == !g.theory->entails(make_not(c)));
    }
  }
}

TEST_CASE("bound_to") {
  auto c = parse_constraint("X = a and Y = Z and q(Y)");
  auto b = bound_to(c, "X");
  CHECK(b.kind == Binding::Kind::GroundTerm);
  CHECK(b.term == Term::constant("a"));
  CHECK(bound_to(c, "Y").kind == Binding::Kind::Variable);
  CHECK(bound_to(parse_constraint("q(W)"), "W").kind == Binding::Kind::Unbound);
  CHECK(bound_to(parse_constraint("X = Y and Y = f(b)"), "X").term == parse_term("f(b)"));
  // Under a disjunction nothing is reported.
  CHECK(bound_to(parse_constraint("X = a or X = b"), "X").kind == Binding::Kind::Unbound);
}

TEST_CASE("bound_to is sound") {
  std::mt19937 rng(4);
  auto f = hybrid_game();
  const auto& t = *f.theory;
  const auto& dom = t.domain();
  for (int i = 0; i < 300; ++i) {
    std::vector<Constraint> parts;
    for (int k = 0, n = roll(rng, 1, 4); k < n; ++k) {
      auto side = [&] {
        return chance(rng, 0.5) ? Term::variable(std::string(1, "XYZ"[roll(rng, 0, 2)]))
                                : dom[static_cast<std::size_t>(roll(rng, 0, 5))];
      };
      if (chance(rng, 0.7)) parts.push_back(Constraint::equal(side(), side()));
      else parts.push_back(Constraint::atom("fi", {side()}));
    }
    auto c = Constraint::conjunction(parts);
    for (const char* x : {"X", "Y", "Z"}) {
      auto b = bound_to(c, x);
      if (b.kind != Binding::Kind::GroundTerm) continue;
      auto implied = make_or({make_not(c), Constraint::equal(Term::variable(x), b.term)});
      CHECK_MESSAGE(t.valid(implied), (to_string(c) + " binds " + x + " to " + to_string(b.term)));
    }
  }
}

TEST_CASE("simplification preserves meaning") {
  std::mt19937 rng(13);
  int checked = 0;
  while (checked < 40) {
    auto g = next_program(rng);
    if (g.theory->predicates().empty() || g.theory->domain().empty()) continue;
    ++checked;
    for (int i = 0; i < 10; ++i) {
      auto c = closed(random_ground_constraint(rng, *g.theory, 3));
      auto s = simplify(c);
      auto iff = make_and({make_or({make_not(c), s}), make_or({make_not(s), c})});
      CHECK_MESSAGE(g.theory->entails(iff), (to_string(c) + " became " + to_string(s)));
    }
  }
}

TEST_CASE("simplifier eliminates defined variables") {
  auto s = simplify(parse_constraint("exists Y: Y = a and q(Y)"));
  CHECK(s == parse_constraint("q(a)"));
  CHECK(simplify(parse_constraint("a = b")).is_false());
  CHECK(simplify(parse_constraint("f(X) = f(a) and q(X)")) == simplify(parse_constraint("X = a and q(a)")));
}

TEST_CASE("solved forms are equivalent on every grounding") {
  std::mt19937 rng(17);
  int checked = 0;
  while (checked < 40) {
    auto g = next_program(rng);
    if (g.theory->predicates().empty() || g.theory->domain().empty()) continue;
    ++checked;
    std::vector<TheoryModel> models;
    g.theory->enumerate_models([&](const TheoryModel& m) { models.push_back(m); });
    for (int i = 0; i < 5; ++i) {
      auto c = random_ground_constraint(rng, *g.theory, 2);
      if (!free_variables(c).empty()) c = Constraint::conjunction({c, Constraint::equal(Term::variable("X"), g.theory->domain()[0])});
      auto forms = to_solved_forms(c, free_variables(c), g.theory->domain());
      auto d = to_constraint(forms);
      for (const auto& x : g.theory->domain()) {
        Substitution theta{{"X", x}};
        auto cg = substitute(c, theta), dg = substitute(d, theta);
        for (const auto& m : models) CHECK_MESSAGE(g.theory->holds(cg, m) == g.theory->holds(dg, m), (to_string(c)));
      }
    }
  }
}

TEST_CASE("CET against brute force") {
  std::mt19937 rng(1234);
  SuiteResult r;
  for (int i = 0; i < 300; ++i) check_cet(rng, r);
  CHECK_MESSAGE(r.ok(), (r.first));
}

TEST_CASE("CET examples") {
  auto t = [](const char* s) { return parse_term(s); };
  CHECK(cet_solve({{t("f(X,b)"), t("f(a,Y)")}}, {}).sat);
  CHECK(!cet_solve({{t("X"), t("f(X)")}}, {}).sat);
  CHECK(!cet_solve({{t("X"), t("a")}}, {{t("X"), t("a")}}).sat);
  // With only a and b, three distinct values do not exist.
  std::map<std::string, std::size_t> ab{{"a", 0}, {"b", 0}};
  CHECK(!cet_solve({}, {{t("X"), t("Y")}, {t("Y"), t("Z")}, {t("X"), t("Z")}}, ab).sat);
  CHECK(cet_solve({}, {{t("X"), t("Y")}}, ab).sat);
  // A unary function gives infinitely many values.
  CHECK(cet_solve({}, {{t("X"), t("Y")}, {t("Y"), t("Z")}, {t("X"), t("Z")}}, {{"a", 0}, {"f", 1}}).sat);
}

TEST_CASE("registry") {
  auto& reg = TheoryRegistry::global();
  reg.add("unit_test_theory", parse_theory("fi(b).\n"));
  CHECK(reg.contains("unit_test_theory"));
  CHECK(reg.get("unit_test_theory").clauses.size() == 1);
  CHECK_THROWS_AS(reg.get("no_such_theory"), ContractError);
}

TEST_CASE("atom cap") {
  auto p = parse_program("#rulepreds p/0.\n#constraintpreds q/2.\n#constants a b c d e f.\np :- { q(a,b) }.\n");
  FiniteGroundTheory t(TheorySpec{}, p.signature, FiniteGroundTheory::Options{8, 1u << 20});
  CHECK_THROWS_AS(t.enumerate_models([](const TheoryModel&) {}), ResourceError);
}
