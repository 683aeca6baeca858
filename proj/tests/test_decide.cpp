#include <random>

#include "doctest.h"
#include "hyrule/decide.hpp"
#include "hyrule/errors.hpp"
#include "hyrule/parser.hpp"
#include "hyrule/printer.hpp"
#include "hyrule/trace.hpp"
#include "suites.hpp"
#include "support.hpp"

using namespace hyrule;
using namespace hyrule::testing;

namespace {

bool equivalent(const TheoryInterface& t, const Constraint& a, const Constraint& b) {
  return t.entails(make_and({make_or({make_not(a), b}), make_or({make_not(b), a})}));
}

}  // namespace

TEST_CASE("decisions for the hybrid game") {
  auto f = hybrid_game();
  GroundDecider d(f.program, *f.theory);
  auto v = [&](const char* x) { return d.decide_atom(atom("w", {x})); };
  CHECK(v("a").verdict == Verdict::Neither);
  CHECK(v("b").verdict == Verdict::Neither);
  CHECK(v("c").verdict == Verdict::True);
  CHECK(v("c").true_if.is_true());
  CHECK(v("f").verdict == Verdict::False);
  CHECK(v("f").false_if.is_true());

  // w(e) holds exactly when e_cls(f) does, w(d) exactly when it does not.
  auto e = v("e"), dd = v("d");
  CHECK(e.verdict == Verdict::Neither);
  CHECK(equivalent(*f.theory, e.true_if, parse_constraint("e_cls(f)")));
  CHECK(equivalent(*f.theory, e.false_if, parse_constraint("not e_cls(f)")));
  CHECK(equivalent(*f.theory, dd.true_if, parse_constraint("not e_cls(f)")));
  CHECK(equivalent(*f.theory, dd.false_if, parse_constraint("e_cls(f)")));
  // w(a) and w(b) are undefined in every model.
  CHECK(v("a").true_if.is_false());
  CHECK(v("a").false_if.is_false());
  CHECK(d.final_rank() >= 1);
}

TEST_CASE("decisions match answers and pseudo-answers") {
  auto f = hybrid_game();
  GroundDecider d(f.program, *f.theory);
  const auto k = d.final_rank();
  for (const auto& a : d.grounding().herbrand_base) {
    auto dec = d.decide_atom(a);
    CHECK(dec.true_models == d.answer_models(TreeKind::T, a, k));
    CHECK(dec.false_models == ~d.answer_models(TreeKind::TU, a, k));
  }
}

TEST_CASE("maximal trees") {
  auto f = hybrid_game();
  for (auto sel : {SelectionRule::Leftmost, SelectionRule::Rightmost, SelectionRule::NegativeLast}) {
    GroundDecider d(f.program, *f.theory, {}, GroundDecider::Options{sel, 10000});
    const auto k = d.final_rank();
    for (const auto& a : d.grounding().herbrand_base)
      for (auto kind : {TreeKind::T, TreeKind::TU}) {
        auto t = d.maximal_tree(kind, a, k);
        CHECK(t.answer == d.answer_models(kind, a, k));
        CHECK(t.nodes[0].literals == std::vector<RuleLiteral>{pos(a)});
      }
  }
  // The maximal tu-tree for w(d) has the pseudo-answer not e_cls(f).
  GroundDecider d(f.program, *f.theory);
  auto tu = d.maximal_tree(TreeKind::TU, atom("w", {"d"}), d.final_rank());
  CHECK(equivalent(*f.theory, model_set_to_dnf(tu.answer, d.table()), parse_constraint("not e_cls(f)")));
  auto text = trace_text(tu, d.table());
  CHECK(text.rfind("% maximal tu-tree of rank", 0) == 0);
}

TEST_CASE("answers stabilize") {
  auto f = game();
  GroundDecider d(f.program, *f.theory);
  const auto k = d.final_rank();
  for (const auto& a : d.grounding().herbrand_base) {
    CHECK(d.answer_models(TreeKind::T, a, k) == d.answer_models(TreeKind::T, a, k + 1));
    CHECK(d.answer_models(TreeKind::TU, a, k) == d.answer_models(TreeKind::TU, a, k + 1));
    // Finite answers grow and pseudo-answers shrink with the rank.
    for (std::size_t r = 1; r <= k; ++r) {
      CHECK(d.answer_models(TreeKind::T, a, r - 1).subset_of(d.answer_models(TreeKind::T, a, r)));
      CHECK(d.answer_models(TreeKind::TU, a, r).subset_of(d.answer_models(TreeKind::TU, a, r - 1)));
    }
  }
}

TEST_CASE("ground goals") {
  auto f = hybrid_game();
  GroundDecider d(f.program, *f.theory, {Atom{"fi", {Term::constant("f")}}});
  auto g = d.decide_goal(parse_goal("{ fi(f) } w(e), ~w(f)"));
  CHECK(g.verdict == Verdict::Neither);
  // fi(f) forces e_cls(f), so w(e) holds wherever the constraint does.
  CHECK(equivalent(*f.theory, g.true_if, parse_constraint("fi(f)")));
  CHECK(d.decide_goal(parse_goal("~w(f)")).verdict == Verdict::True);
  CHECK_THROWS_AS(d.decide_goal(parse_goal("{ fi(X) } w(c)")), ContractError);
  CHECK_THROWS_AS(d.decide_goal(parse_goal("w(X)")), ContractError);
}

TEST_CASE("refusals") {
  auto u = load_fixture("unsafe.hr");
  CHECK_THROWS_AS(GroundDecider(u.program, *u.theory), Refusal);
  auto p = parse_program("#rulepreds n/1.\nn(z).\nn(s(X)) :- n(X).\n");
  FiniteGroundTheory t(TheorySpec{}, p.signature);
  CHECK_THROWS_AS(GroundDecider(p, t), Refusal);
}

TEST_CASE("model sets to formulas") {
  auto f = hybrid_game();
  auto table = f.theory->project({Atom{"e_cls", {Term::constant("f")}}, Atom{"fi", {Term::constant("f")}}});
  // Models: neither, e_cls(f) only, both.
  CHECK(table->size() == 3);
  auto all = ModelSet::full(table->size());
  CHECK(model_set_to_dnf(all, *table).is_true());
  CHECK(model_set_to_dnf(ModelSet(table->size()), *table).is_false());
  for (std::size_t i = 0; i < table->size(); ++i) {
    ModelSet one(table->size());
    one.set(i);
    CHECK(f.theory->models_of(model_set_to_dnf(one, *table), *table) == one);
    CHECK(f.theory->models_of(model_set_to_dnf(~one, *table), *table) == ~one);
  }
}

TEST_CASE("completeness on random programs") {
  std::mt19937 rng(73);
  SuiteResult r;
  for (int i = 0; i < 40; ++i) {
    auto g = next_program(rng);
    for (auto sel : {SelectionRule::Leftmost, SelectionRule::Rightmost, SelectionRule::NegativeLast})
      check_completeness(g, sel, r);
  }
  CHECK_MESSAGE(r.ok(), (r.first));
  CHECK(r.trees > 0);
}
