#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hyrule/constraint.hpp"
#include "hyrule/term.hpp"

namespace hyrule {

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  bool is_ground() const;
  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

struct RuleLiteral {
  bool positive = true;
  Atom atom;

  friend bool operator==(const RuleLiteral&, const RuleLiteral&) = default;
  friend auto operator<=>(const RuleLiteral&, const RuleLiteral&) = default;
};

/// H <- C, L1, ..., Ln
struct HybridRule {
  Atom head;
  Constraint constraint;
  std::vector<RuleLiteral> body;

  friend bool operator==(const HybridRule&, const HybridRule&) = default;
};

/// Conjunction C, L1, ..., Ln.
struct Goal {
  Constraint constraint;
  std::vector<RuleLiteral> literals;

  friend bool operator==(const Goal&, const Goal&) = default;
};

/// Predicate and function symbols with arities. Rule and constraint
/// predicates are disjoint.
struct Signature {
  std::map<std::string, std::size_t> rule_predicates;
  std::map<std::string, std::size_t> constraint_predicates;
  std::map<std::string, std::size_t> functions;

  /// All function symbols nullary.
  bool is_datalog() const;
  std::vector<std::string> constants() const;

  friend bool operator==(const Signature&, const Signature&) = default;
};

/// Universally quantified clause L1 | ... | Ln over constraint atoms.
struct TheoryClause {
  std::vector<std::pair<bool, Atom>> literals;  // (positive, atom)

  friend bool operator==(const TheoryClause&, const TheoryClause&) = default;
};

struct TheorySpec {
  std::vector<TheoryClause> clauses;
  std::map<std::string, std::size_t> predicates;
  std::map<std::string, std::size_t> functions;

  friend bool operator==(const TheorySpec&, const TheorySpec&) = default;
};

struct HybridProgram {
  std::vector<HybridRule> rules;
  Signature signature;
  /// Name of a registered theory (`#theory name`); empty when inline or absent.
  std::string theory_ref;
  std::optional<TheorySpec> inline_theory;

  friend bool operator==(const HybridProgram&, const HybridProgram&) = default;
};

VarSet variables(const Atom& a);
VarSet variables(const RuleLiteral& l);
/// Free variables of the rule (head, constraint, body).
VarSet variables(const HybridRule& r);
VarSet variables(const Goal& g);

Atom substitute(const Atom& a, const Substitution& theta);
RuleLiteral substitute(const RuleLiteral& l, const Substitution& theta);
Goal substitute(const Goal& g, const Substitution& theta, FreshNames& fresh);
HybridRule substitute(const HybridRule& r, const Substitution& theta, FreshNames& fresh);

/// Variant of `r` whose variables are all fresh.
HybridRule rename_apart(const HybridRule& r, FreshNames& fresh);

/// Every ground instance of `r` over `universe` (the constants of a
/// Datalog program). Enumerates |universe|^#vars instances.
void for_each_ground_instance(const HybridRule& r, const std::vector<Term>& universe,
                              const std::function<void(HybridRule)>& yield);
std::vector<HybridRule> ground_instances(const HybridRule& r, const std::vector<Term>& universe);

/// Rebuilds the signature from the symbols used, keeping declared entries.
/// Throws ParseError(0,0) on arity clashes or predicates in both classes.
void infer_signature(HybridProgram& program);

}  // namespace hyrule
