#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hyrule/term.hpp"

namespace hyrule {

/// First-order formula over constraint predicates and syntactic equality,
/// closed under negation, conjunction, disjunction and existential
/// quantification. Immutable; copies share structure.
class Constraint {
 public:
  enum class Kind { True, False, Atom, Eq, Not, And, Or, Exists };

  /// Defaults to `true`, the omitted rule constraint.
  Constraint();

  static Constraint truth();
  static Constraint falsity();
  static Constraint atom(std::string predicate, std::vector<Term> args = {});
  static Constraint equal(Term lhs, Term rhs);
  static Constraint negation(Constraint operand);
  /// Zero operands give `true`, one operand is returned unchanged.
  static Constraint conjunction(std::vector<Constraint> operands);
  /// Zero operands give `false`, one operand is returned unchanged.
  static Constraint disjunction(std::vector<Constraint> operands);
  /// No variables returns the body unchanged.
  static Constraint exists(std::vector<std::string> vars, Constraint body);

  Kind kind() const noexcept;
  bool is_true() const noexcept { return kind() == Kind::True; }
  bool is_false() const noexcept { return kind() == Kind::False; }

  /// Atom predicate name (`=` for equalities).
  const std::string& predicate() const;
  /// Atom arguments; for Eq the two sides.
  const std::vector<Term>& args() const;
  const Term& lhs() const { return args()[0]; }
  const Term& rhs() const { return args()[1]; }
  /// Operand of Not / body of Exists.
  const Constraint& operand() const;
  const std::vector<Constraint>& operands() const;
  const std::vector<std::string>& bound() const;

  /// Number of formula nodes.
  std::size_t size() const;

  friend bool operator==(const Constraint& a, const Constraint& b);
  friend bool operator<(const Constraint& a, const Constraint& b);

 private:
  struct Node;
  explicit Constraint(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

VarSet free_variables(const Constraint& c);
/// Free and bound variable names.
VarSet all_variables(const Constraint& c);
/// Constraint predicate names occurring in `c` (not including `=`).
std::set<std::string> predicates(const Constraint& c);
bool contains_quantifier(const Constraint& c);

/// Capture-avoiding application of `theta` to the free variables of `c`.
/// Bound variables clashing with the range of `theta` are renamed through
/// `fresh`.
Constraint substitute(const Constraint& c, const Substitution& theta, FreshNames& fresh);
Constraint substitute(const Constraint& c, const Substitution& theta);

/// Existential closure of the free variables outside `keep`.
Constraint restrict_to(const Constraint& c, const VarSet& keep);

/// Convenience builders that flatten nested connectives and absorb
/// `true`/`false` units.
Constraint make_and(std::vector<Constraint> operands);
Constraint make_or(std::vector<Constraint> operands);
Constraint make_not(const Constraint& c);

}  // namespace hyrule
