#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hyrule/declarative.hpp"
#include "hyrule/operational.hpp"
#include "hyrule/program.hpp"
#include "hyrule/theory.hpp"

namespace hyrule {

/// Smallest DNF found over the atoms of `table` that holds exactly in the
/// models of `set`. Assignments that are not theory models are free.
Constraint model_set_to_dnf(const ModelSet& set, const ModelTable& table);

/// Maximal tree over ground(P). Node constraints are represented by the
/// set of theory models (restricted to the table atoms) that satisfy them.
struct MaximalTree {
  struct Node {
    std::vector<RuleLiteral> literals;
    ModelSet models;
    std::optional<std::size_t> selected;
    std::vector<std::size_t> children;
    bool successful = false;
  };

  TreeKind kind = TreeKind::T;
  std::size_t rank = 0;
  Atom root;
  std::vector<Node> nodes;
  /// Finite answer (t-tree) or finite pseudo-answer (tu-tree): models of
  /// the disjunction of the successful leaves.
  ModelSet answer;
};

enum class Verdict { True, False, Neither };
const char* to_string(Verdict v);

struct Decision {
  Verdict verdict = Verdict::Neither;
  /// Models in which the query is true, and in which it is false.
  ModelSet true_models;
  ModelSet false_models;
  /// DNF certificates: the query holds when `true_if` holds and fails when
  /// `false_if` holds.
  Constraint true_if = Constraint::falsity();
  Constraint false_if = Constraint::falsity();
};

/// Decision procedure for safe Datalog programs: finite answers and
/// pseudo-answers of the maximal t- and tu-trees for every atom of
/// ground(P), rank by rank, until they stop changing. The answers are
/// computed as a least fixpoint over model sets, which every selection rule
/// reaches; maximal_tree() builds the trees themselves.
class GroundDecider {
 public:
  struct Options {
    SelectionRule selection = SelectionRule::Leftmost;
    /// Node cap per maximal tree built by maximal_tree(); ResourceError
    /// above it.
    std::size_t node_budget = 200000;
  };

  /// Refuses non-Datalog or unsafe programs. `extra_atoms` are added to the
  /// model table (atoms of goal constraints).
  GroundDecider(const HybridProgram& p, const FiniteGroundTheory& theory, std::vector<Atom> extra_atoms = {});
  GroundDecider(const HybridProgram& p, const FiniteGroundTheory& theory, std::vector<Atom> extra_atoms,
                Options options);

  /// Runs ranks until the answers are stable; idempotent.
  void run();
  /// Rank at which the answers stabilized.
  std::size_t final_rank();

  Decision decide_atom(const Atom& a);
  /// Ground goal: closed constraint and ground literals.
  Decision decide_goal(const Goal& g);
  /// Every atom of the Herbrand base.
  std::map<Atom, Decision> decide_all();

  /// Maximal tree for `a` at `rank`, built from the rank - 1 answers.
  MaximalTree maximal_tree(TreeKind kind, const Atom& a, std::size_t rank);
  /// Finite answer (t) or finite pseudo-answer (tu) of the maximal tree.
  ModelSet answer_models(TreeKind kind, const Atom& a, std::size_t rank);

  const ModelTable& table() const noexcept { return *table_; }
  const HybridGrounding& grounding() const noexcept { return grounding_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }

 private:
  struct Rank {
    std::vector<ModelSet> t;
    std::vector<ModelSet> tu;
  };

  int atom_id(const Atom& a) const;
  void ensure_rank(std::size_t k);
  MaximalTree build(TreeKind kind, int atom, std::size_t rank);
  std::vector<ModelSet> answers(TreeKind kind, std::size_t rank) const;

  const FiniteGroundTheory& theory_;
  Options options_;
  HybridGrounding grounding_;
  std::shared_ptr<const ModelTable> table_;
  std::vector<Atom> atoms_;
  std::map<Atom, int> ids_;
  /// Ground rules by head atom id: (rule models, body).
  std::vector<std::vector<std::pair<ModelSet, std::vector<RuleLiteral>>>> rules_by_head_;
  std::vector<Rank> ranks_;
  std::optional<std::size_t> stable_;
};

}  // namespace hyrule
