#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hyrule/constraint.hpp"
#include "hyrule/term.hpp"

namespace hyrule {

using Equation = std::pair<Term, Term>;

struct CetResult {
  bool sat = false;
  /// Most general unifier of the equations when sat.
  Substitution mgu;
};

/// Solves a conjunction of equations and disequations in the free term
/// algebra. `functions` lists the function symbols with arities; symbols
/// occurring in the input are added. When every symbol is a constant the
/// universe is finite and remaining variables are enumerated over it (weak
/// domain closure); otherwise disequations are independent and only fail
/// when the unifier makes both sides identical.
CetResult cet_solve(const std::vector<Equation>& equations, const std::vector<Equation>& disequations,
                    const std::map<std::string, std::size_t>& functions = {});

struct Binding {
  enum class Kind { GroundTerm, Variable, Unbound };
  Kind kind = Kind::Unbound;
  Term term;
};

/// What `x` is bound to by the equalities of the top-level conjunction of `c`.
/// Only unifier-derived bindings are reported, so the answer is sound but
/// may say Unbound where the theory would entail more.
Binding bound_to(const Constraint& c, const std::string& x);

/// Variables equal to `x` through the top-level equalities (including `x`),
/// and the ground term of the class if there is one.
struct EqualityClass {
  VarSet members;
  std::optional<Term> ground;
};
EqualityClass equality_class(const Constraint& c, const std::string& x);

/// Equalities of the top-level conjunction; empty list for non-conjunctions
/// other than a single equation.
std::vector<Equation> top_level_equalities(const Constraint& c);

/// Equivalence-preserving simplification under CET: flattening, unit
/// absorption, equality solving and propagation, ground equality evaluation,
/// clash detection, and elimination of existentially bound variables that
/// are defined by an equality.
Constraint simplify(const Constraint& c);

/// Negation normal form with quantifiers expanded over `domain`; the
/// result only has And/Or over literals (atoms, equations and their
/// negations) and True/False.
Constraint expand_over(const Constraint& c, const std::vector<Term>& domain);

/// A disjunct of a solved form: goal-variable bindings plus ground theory
/// literals.
struct SolvedForm {
  std::vector<std::pair<std::string, Term>> equalities;
  std::vector<std::pair<bool, Constraint>> literals;  // (positive, ground atom)
};

/// Rewrites `c` into an equivalent disjunction of solved forms over the
/// finite `domain`: variables are bound to constants, the bindings are
/// applied, the rest is put in disjunctive normal form, valid ground
/// equalities are dropped and equalities for variables outside `keep` are
/// eliminated. Throws ContractError when a variable is not bound to a
/// constant. Contradictory disjuncts are removed.
std::vector<SolvedForm> to_solved_forms(const Constraint& c, const VarSet& keep, const std::vector<Term>& domain,
                                        std::size_t max_disjuncts = 1u << 16);

Constraint to_constraint(const SolvedForm& s);
Constraint to_constraint(const std::vector<SolvedForm>& forms);

}  // namespace hyrule
