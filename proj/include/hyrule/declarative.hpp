#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hyrule/program.hpp"
#include "hyrule/theory.hpp"

namespace hyrule {

/// Ground normal program over an interned Herbrand base.
struct GroundNormalProgram {
  struct Rule {
    int head = 0;
    std::vector<int> positive;
    std::vector<int> negative;
  };

  std::vector<Atom> atoms;
  std::map<Atom, int> index;
  std::vector<Rule> rules;

  int intern(const Atom& a);
  /// Index of `a` or -1.
  int id(const Atom& a) const;
  std::size_t size() const noexcept { return atoms.size(); }
};

/// Definite program over H and the negated atoms, ¬A being a fresh
/// predicate: literal i < n is atom i, literal n + i is ¬atom i.
struct DefiniteProgram {
  struct Clause {
    int head = 0;
    std::vector<int> body;
  };
  std::size_t atoms = 0;
  std::vector<Clause> clauses;
};

enum class Truth { False, Undefined, True };
const char* to_string(Truth t);

/// Consistent set of ground literals, stored as two bit vectors over the
/// Herbrand base of a GroundNormalProgram.
struct ThreeValuedInterpretation {
  std::vector<bool> true_atoms;
  std::vector<bool> false_atoms;

  static ThreeValuedInterpretation empty(std::size_t n);
  Truth value(int atom) const;
  bool consistent() const;
  /// Literal-set inclusion.
  bool subset_of(const ThreeValuedInterpretation& o) const;

  friend bool operator==(const ThreeValuedInterpretation&, const ThreeValuedInterpretation&) = default;
};

/// Least model as a bit vector over the 2n literals.
std::vector<bool> least_herbrand_model(const DefiniteProgram& q);
DefiniteProgram p_slash_t(const GroundNormalProgram& q, const ThreeValuedInterpretation& i);
DefiniteProgram p_slash_tu(const GroundNormalProgram& q, const ThreeValuedInterpretation& i);
ThreeValuedInterpretation psi(const GroundNormalProgram& q, const ThreeValuedInterpretation& i);
/// Least fixpoint of psi from the empty interpretation.
ThreeValuedInterpretation well_founded_model(const GroundNormalProgram& q);

/// A ground instance of a hybrid rule.
struct GroundHybridRule {
  Atom head;
  Constraint constraint;  // closed
  std::vector<RuleLiteral> body;
};

/// ground(P) with the Herbrand base of P.
struct HybridGrounding {
  std::vector<GroundHybridRule> rules;
  /// Ground rule atoms over the predicates and universe of P, sorted.
  std::vector<Atom> herbrand_base;
  std::vector<Term> universe;
};

/// Grounds a Datalog program over `domain`. Non-Datalog programs need
/// `depth_bound`, the maximal nesting of ground terms; without it they are
/// refused. Instances whose constraint simplifies to false are dropped.
HybridGrounding ground_program(const HybridProgram& p, const std::vector<Term>& domain,
                               std::optional<std::size_t> depth_bound = std::nullopt);

/// P/M0: ground rules whose constraint holds in `m0`, constraints removed.
GroundNormalProgram reduce(const HybridGrounding& g, const FiniteGroundTheory& theory, const TheoryModel& m0);

enum class TruthValue4 { True, False, Undefined, ModelDependent };
const char* to_string(TruthValue4 v);

struct Classification {
  TruthValue4 value = TruthValue4::Undefined;
  /// For ModelDependent: two theory models (restricted to the relevant
  /// atoms) in which the query has different values.
  std::optional<std::pair<TheoryModel, TheoryModel>> witness;
  std::optional<std::pair<Truth, Truth>> witness_values;
};

/// Declarative semantics of a Datalog hybrid program: the well-founded
/// model of P/M0 for each theory model M0. Models that agree on the ground
/// atoms of the rule constraints give the same reduct, so one
/// representative per restriction is evaluated.
class DeclarativeOracle {
 public:
  /// `extra_atoms` are added to the model restriction, for goal constraints.
  DeclarativeOracle(const HybridProgram& p, const FiniteGroundTheory& theory, std::vector<Atom> extra_atoms = {});

  const HybridGrounding& grounding() const noexcept { return grounding_; }
  const ModelTable& table() const noexcept { return *table_; }
  /// Models of table() in which each ground rule's constraint holds.
  const std::vector<ModelSet>& rule_models() const noexcept { return rule_models_; }

  std::size_t model_count() const noexcept { return table_->size(); }
  const GroundNormalProgram& reduct(std::size_t model) const { return reducts_.at(model); }
  const ThreeValuedInterpretation& wf(std::size_t model) const { return wf_.at(model); }
  TheoryModel model(std::size_t i) const;

  /// Value of a ground literal conjunction (with an optional closed
  /// constraint) in the well-founded model of one theory model.
  Truth value(std::size_t model, const std::vector<RuleLiteral>& literals,
              const Constraint& constraint = Constraint::truth()) const;

  /// Four-valued classification over all theory models. Throws
  /// ContractError for non-ground literals or a non-closed constraint.
  Classification classify(const std::vector<RuleLiteral>& literals,
                          const Constraint& constraint = Constraint::truth()) const;

 private:
  const FiniteGroundTheory& theory_;
  HybridGrounding grounding_;
  std::shared_ptr<const ModelTable> table_;
  std::vector<ModelSet> rule_models_;
  std::vector<GroundNormalProgram> reducts_;
  std::vector<ThreeValuedInterpretation> wf_;
};

/// Convenience wrapper around DeclarativeOracle::classify.
Classification classify(const HybridProgram& p, const FiniteGroundTheory& theory,
                        const std::vector<RuleLiteral>& literals);

/// For a negation-free program: if A is classified true then A is in the
/// least model of P/M0 for every model M0, computed by naive forward
/// chaining. Throws ContractError when P has negative literals.
bool fol_compatibility_check(const HybridProgram& p, const FiniteGroundTheory& theory, const Atom& a);

}  // namespace hyrule
