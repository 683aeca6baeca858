#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "hyrule/program.hpp"
#include "hyrule/theory.hpp"

namespace hyrule {

enum class TreeKind { T, TU };
const char* to_string(TreeKind k);

enum class SelectionRule { Leftmost, Rightmost, NegativeLast };
const char* to_string(SelectionRule s);
/// Parses "leftmost", "rightmost" or "negative-last".
std::optional<SelectionRule> parse_selection_rule(const std::string& name);
/// Index of the selected literal, or nullopt for a goal without literals.
std::optional<std::size_t> select_literal(SelectionRule rule, const std::vector<RuleLiteral>& literals);

/// The goal derived from `g` by `r` with the positive literal `selected`
/// resolved, or nullopt when the heads do not match or the new constraint
/// is unsatisfiable. `r` must share no variables with `g`. Unknown
/// satisfiability keeps the goal.
std::optional<Goal> derive_step(const Goal& g, const HybridRule& r, std::size_t selected, const TheoryInterface& theory);

struct TreeNode;
struct DerivationTree;

struct NegationEvidence {
  TreeKind subsidiary_kind = TreeKind::TU;
  std::size_t subsidiary_rank = 0;
  /// The atom the subsidiary tree was built for.
  Atom atom;
  /// Constraint conjoined to the child: the negative answer (t-tree) or
  /// the negated answer (tu-tree), in the variables of the node.
  Constraint used = Constraint::truth();
  std::shared_ptr<const DerivationTree> tree;
};

struct TreeNode {
  enum class State { Open, Expanded, Successful, Leaf };

  Goal goal;
  std::optional<std::size_t> selected;
  std::vector<std::size_t> children;
  std::optional<std::size_t> parent;
  State state = State::Open;
  /// Rule head for positive steps, "neg" for negation steps.
  std::string edge_label;
  std::optional<NegationEvidence> negation;
};

struct DerivationTree {
  TreeKind kind = TreeKind::T;
  std::size_t rank = 0;
  /// False when the node budget stopped the construction; open nodes
  /// remain.
  bool complete = true;
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const Goal& root() const { return nodes.at(0).goal; }
  std::vector<std::size_t> successful_leaves() const;
  /// Subsidiary trees referenced by negation steps.
  std::vector<std::shared_ptr<const DerivationTree>> subsidiaries() const;
};

/// (C1 or ... or Cn)|G over the given successful leaves; false for none.
/// Throws ContractError when an index is not a successful leaf.
Constraint extract_answer(const DerivationTree& tree, const std::vector<std::size_t>& leaves);
/// Answer from every successful leaf.
Constraint extract_answer(const DerivationTree& tree);

/// not(C1|G) and ... and not(Cn|G) over a cross-section. Throws
/// ContractError naming a successful leaf whose branch misses the set, and
/// for incomplete trees.
Constraint extract_negative_answer(const DerivationTree& tree, const std::set<std::size_t>& cross_section);
/// Negative answer from the cross-section of all successful leaves, or
/// nullopt for an incomplete tree.
std::optional<Constraint> extract_negative_answer(const DerivationTree& tree);

/// A negative answer D for A becomes a negative answer not C or D for C,A.
Constraint lift_negative_answer(const Constraint& d, const Constraint& c);

struct SafetyResult {
  bool safe = true;
  std::string witness;  // an offending variable
};

/// Each head variable, negative-literal variable and free constraint
/// variable must be bound in the constraint to a ground term or to a
/// variable of a positive body literal. Variables in `apart_of` are exempt.
SafetyResult check_safe(const HybridRule& r, const VarSet& apart_of = {});
/// Safety of the rule p <- G.
SafetyResult check_safe(const Goal& g, const VarSet& apart_of = {});
/// First unsafe rule of the program, if any.
std::optional<std::pair<std::size_t, SafetyResult>> find_unsafe_rule(const HybridProgram& p);

struct CongruenceResult {
  bool passes = true;
  std::string reason;
};
/// Head arguments are distinct variables and no variable occurs twice in
/// the head and body literals together.
std::vector<CongruenceResult> check_congruent_syntactic(const HybridProgram& p);

class OperationalEngine {
 public:
  struct Options {
    SelectionRule selection = SelectionRule::Leftmost;
    std::size_t node_budget = 10000;
    /// Run the safeness check on construction and refuse unsafe programs.
    bool require_safe = true;
    /// Simplify node constraints after each step.
    bool simplify = true;
  };

  /// Throws Refusal for unsafe programs when required.
  OperationalEngine(const HybridProgram& p, const TheoryInterface& theory);
  OperationalEngine(const HybridProgram& p, const TheoryInterface& theory, Options options);

  std::shared_ptr<const DerivationTree> build_t_tree(const Goal& g, std::size_t rank);
  std::shared_ptr<const DerivationTree> build_tu_tree(const Goal& g, std::size_t rank);
  std::shared_ptr<const DerivationTree> build(TreeKind kind, const Goal& g, std::size_t rank);

  const HybridProgram& program() const noexcept { return program_; }
  const Options& options() const noexcept { return options_; }
  /// Number of cached subsidiary trees.
  std::size_t cache_size() const noexcept { return cache_.size(); }

 private:
  std::shared_ptr<const DerivationTree> subsidiary(TreeKind kind, const Atom& a, std::size_t rank);

  HybridProgram program_;
  const TheoryInterface& theory_;
  Options options_;
  FreshNames fresh_;
  std::map<std::tuple<TreeKind, std::size_t, Atom>, std::shared_ptr<const DerivationTree>> cache_;
};

enum class AnswerStatus { Entailed, Conditional, NegativeEntailed };
const char* to_string(AnswerStatus s);

struct Answer {
  bool positive = true;
  Constraint constraint = Constraint::truth();
  Goal source;
  AnswerStatus status = AnswerStatus::Conditional;
  /// The theory returned unknown when checking entailment.
  bool theory_checked = true;
  /// For open answers over a finite domain: goal-variable bindings under
  /// which the answer is entailed.
  std::vector<Substitution> entailed_instances;
  bool complete = true;
};

struct QueryOptions {
  std::size_t max_rank = 8;
  std::size_t node_budget = 10000;
  SelectionRule selection = SelectionRule::Leftmost;
  /// Also build a tu-tree and report its negative answer.
  bool negative = true;
};

struct QueryResult {
  std::vector<Answer> answers;
  std::shared_ptr<const DerivationTree> t_tree;
  std::shared_ptr<const DerivationTree> tu_tree;
};

/// Builds the t-tree (and tu-tree) for the goal at the maximal rank and
/// reports satisfiable answers with their entailment status. Throws
/// Refusal for unsafe programs or goals.
QueryResult query(const HybridProgram& p, const TheoryInterface& theory, const Goal& g, const QueryOptions& options = {});

/// Readable form of an answer: solved forms over the goal variables when
/// the domain is finite, the simplified constraint otherwise.
Constraint present_answer(const Constraint& c, const Goal& g, const std::vector<Term>& domain);

}  // namespace hyrule
