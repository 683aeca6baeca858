#pragma once

// Property checks shared by the unit tests and the acceptance binary.

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "hyrule/cet.hpp"
#include "hyrule/decide.hpp"
#include "hyrule/declarative.hpp"
#include "hyrule/errors.hpp"
#include "hyrule/operational.hpp"
#include "hyrule/parser.hpp"
#include "hyrule/printer.hpp"
#include "oracles.hpp"

namespace hyrule::testing {

struct SuiteResult {
  int cases = 0;
  long checks = 0;
  int violations = 0;
  long answers = 0;
  long trees = 0;
  long skipped = 0;
  std::string first;

  void fail(const std::string& what) {
    if (violations++ == 0) first = what;
  }
  bool ok() const { return violations == 0; }
};

/// Ground atoms of the rule predicates over the program constants.
inline std::vector<Atom> rule_atoms(const HybridProgram& p, const std::vector<Term>& domain) {
  std::vector<Atom> out;
  for (const auto& [pred, n] : p.signature.rule_predicates) {
    std::vector<std::size_t> idx(n, 0);
    if (n > 0 && domain.empty()) continue;
    for (;;) {
      Atom a{pred, {}};
      for (auto i : idx) a.args.push_back(domain[i]);
      out.push_back(a);
      std::size_t i = 0;
      while (i < n && ++idx[i] == domain.size()) idx[i++] = 0;
      if (i == n) break;
    }
  }
  return out;
}

struct Generated {
  HybridProgram program;
  TheorySpec spec;
  std::unique_ptr<FiniteGroundTheory> theory;
  std::string text;
};

/// Next generated program whose theory has at least one model.
inline Generated next_program(std::mt19937& rng) {
  for (;;) {
    auto g = random_hybrid_program(rng);
    Generated out;
    out.text = g.text;
    out.program = parse_program(g.text);
    out.spec = out.program.inline_theory.value_or(TheorySpec{});
    out.theory = std::make_unique<FiniteGroundTheory>(out.spec, out.program.signature);
    if (out.theory->consistent()) return out;
  }
}

inline int brute_value(const BruteForceOracle& bf, std::size_t i, const Atom& a) { return bf.value(i, {RuleLiteral{true, a}}); }

/// Operational answers against the brute-force oracle, and the library
/// classifier against the brute-force one.
inline void check_soundness(const Generated& g, const QueryOptions& opts, SuiteResult& out) {
  BruteForceOracle bf(g.program, g.spec);
  DeclarativeOracle lib(g.program, *g.theory);
  ++out.cases;
  auto where = [&](const Atom& a) { return to_string(a) + " in\n" + g.text; };
  for (const auto& a : rule_atoms(g.program, g.theory->domain())) {
    std::vector<RuleLiteral> lits{RuleLiteral{true, a}};
    auto expected = bf.classify(lits);
    ++out.checks;
    if (lib.classify(lits).value != expected)
      out.fail(std::string("classify ") + to_string(lib.classify(lits).value) + " vs brute force " + to_string(expected) +
               " for " + where(a));

    auto r = query(g.program, *g.theory, Goal{Constraint::truth(), lits}, opts);
    for (const auto& ans : r.answers) {
      ++out.answers;
      for (std::size_t i = 0; i < bf.model_count(); ++i) {
        if (!bf.holds(i, ans.constraint)) continue;
        ++out.checks;
        int v = brute_value(bf, i, a);
        if (ans.positive ? v != 2 : v != 0)
          out.fail(std::string(ans.positive ? "answer " : "negative answer ") + to_string(ans.constraint) +
                   " holds in a model where the value is " + std::to_string(v) + " for " + where(a));
      }
      if (ans.status == AnswerStatus::Entailed && expected != TruthValue4::True)
        out.fail("entailed answer for a goal classified " + std::string(to_string(expected)) + ": " + where(a));
      if (ans.status == AnswerStatus::NegativeEntailed && expected != TruthValue4::False)
        out.fail("entailed negative answer for a goal classified " + std::string(to_string(expected)) + ": " + where(a));
    }
  }
  // Open goals: every listed instance must be true.
  for (const auto& [pred, n] : g.program.signature.rule_predicates) {
    if (n == 0) continue;
    Atom open{pred, {}};
    for (std::size_t i = 0; i < n; ++i) open.args.push_back(Term::variable("Q" + std::to_string(i)));
    auto r = query(g.program, *g.theory, Goal{Constraint::truth(), {RuleLiteral{true, open}}}, opts);
    for (const auto& ans : r.answers)
      for (const auto& inst : ans.entailed_instances) {
        Atom ground = substitute(open, inst);
        ++out.checks;
        if (!ans.positive) continue;
        if (bf.classify({RuleLiteral{true, ground}}) != TruthValue4::True)
          out.fail("entailed instance " + to_string(ground) + " is not true in\n" + g.text);
      }
  }
}

/// Decision procedure against the declarative oracle for one selection rule.
inline void check_completeness(const Generated& g, SelectionRule sel, SuiteResult& out) {
  BruteForceOracle bf(g.program, g.spec);
  DeclarativeOracle lib(g.program, *g.theory);
  GroundDecider dec(g.program, *g.theory, {}, GroundDecider::Options{sel, 4000});
  ++out.cases;
  const bool same_table = dec.table().atoms() == lib.table().atoms() && dec.table().models() == lib.table().models();
  for (const auto& a : rule_atoms(g.program, g.theory->domain())) {
    std::vector<RuleLiteral> lits{RuleLiteral{true, a}};
    auto expected = bf.classify(lits);
    auto d = dec.decide_atom(a);
    ++out.checks;
    bool t = d.verdict == Verdict::True, f = d.verdict == Verdict::False;
    if (t != (expected == TruthValue4::True) || f != (expected == TruthValue4::False))
      out.fail(std::string("decide ") + to_string(d.verdict) + " vs oracle " + to_string(expected) + " for " +
               to_string(a) + " (" + to_string(sel) + ") in\n" + g.text);
    // The maximal trees at the final rank, built with this selection rule,
    // must have the answers the decider uses. Trees above the budget are
    // skipped.
    const std::size_t k = dec.final_rank();
    for (auto kind : {TreeKind::T, TreeKind::TU}) {
      try {
        auto tree = dec.maximal_tree(kind, a, k);
        ++out.trees;
        ++out.checks;
        if (tree.answer != dec.answer_models(kind, a, k))
          out.fail(std::string("maximal ") + to_string(kind) + "-tree answer differs for " + to_string(a) + " (" +
                   to_string(sel) + ") in\n" + g.text);
      } catch (const ResourceError&) {
        ++out.skipped;
      }
    }
    if (!same_table) continue;
    for (std::size_t i = 0; i < lib.model_count(); ++i) {
      ++out.checks;
      Truth v = lib.value(i, lits);
      if (d.true_models.test(i) != (v == Truth::True) || d.false_models.test(i) != (v == Truth::False))
        out.fail("per-model decision differs from the well-founded model for " + to_string(a) + " in\n" + g.text);
    }
  }
}

/// Psi monotonicity, fixpoint, consistency and agreement with the
/// alternating fixpoint on one random ground program.
inline void check_psi(std::mt19937& rng, SuiteResult& out) {
  auto g = random_ground_program(rng);
  ++out.cases;
  const auto n = static_cast<std::size_t>(g.atoms);
  auto j = random_interpretation(rng, n);
  auto i = random_subset(rng, j);
  ++out.checks;
  if (!psi(g.program, i).subset_of(psi(g.program, j))) out.fail("psi is not monotone");
  auto wf = well_founded_model(g.program);
  ++out.checks;
  if (!(psi(g.program, wf) == wf)) out.fail("well-founded model is not a fixpoint");
  ++out.checks;
  if (!wf.consistent()) out.fail("well-founded model is inconsistent");
  auto ref = alternating_fixpoint(g.atoms, g.rules);
  for (std::size_t a = 0; a < n; ++a) {
    ++out.checks;
    int v = wf.value(static_cast<int>(a)) == Truth::True ? 2 : wf.value(static_cast<int>(a)) == Truth::False ? 0 : 1;
    if (v != ref[a]) out.fail("well-founded model differs from the alternating fixpoint");
  }
}

inline std::string describe(const CetSystem& s) {
  std::ostringstream o;
  for (const auto& [l, r] : s.eqs) o << to_string(l) << " = " << to_string(r) << "; ";
  for (const auto& [l, r] : s.diseqs) o << to_string(l) << " != " << to_string(r) << "; ";
  o << "symbols:";
  for (const auto& [f, n] : s.functions) o << " " << f << "/" << n;
  return o.str();
}

inline void check_cet(std::mt19937& rng, SuiteResult& out) {
  auto s = random_cet_system(rng);
  ++out.cases;
  ++out.checks;
  bool lib = cet_solve(s.eqs, s.diseqs, s.functions).sat;
  bool ref = BruteForceCet(s.functions).satisfiable(s.eqs, s.diseqs);
  if (lib != ref) out.fail(std::string("cet_solve says ") + (lib ? "sat" : "unsat") + " for " + describe(s));
}

}  // namespace hyrule::testing
