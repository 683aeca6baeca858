#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "hyrule/constraint.hpp"
#include "hyrule/program.hpp"

namespace hyrule {

enum class Sat { Sat, Unsat, Unknown };

const char* to_string(Sat s);

struct TheoryCapabilities {
  bool entails_closed_decidable = false;
  bool models_enumerable = false;
  bool witness_property = false;
};

/// An external first-order theory extended with CET for `=`.
class TheoryInterface {
 public:
  virtual ~TheoryInterface() = default;

  virtual TheoryCapabilities capabilities() const = 0;

  /// Satisfiability of the existential closure of `c`.
  virtual Sat satisfiable(const Constraint& c) const = 0;

  /// T |= c for closed `c`; throws ContractError on free variables.
  /// Unknown satisfiability of the negation counts as not entailed.
  bool entails(const Constraint& c) const;

  /// T |= forall-closure of `c`.
  bool valid(const Constraint& c) const;
};

/// Truth assignment on ground constraint atoms.
struct TheoryModel {
  std::map<Atom, bool> assignment;

  bool value(const Atom& a) const;
};

/// Distinct restrictions of the theory models to a fixed list of ground
/// atoms (at most 64). Bit i of a model mask is the value of atoms()[i].
class ModelTable {
 public:
  ModelTable(std::vector<Atom> atoms, std::vector<std::uint64_t> models);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::vector<std::uint64_t>& models() const noexcept { return models_; }
  std::size_t size() const noexcept { return models_.size(); }
  /// Position of `a` in atoms(), or -1.
  int index_of(const Atom& a) const;

 private:
  std::vector<Atom> atoms_;
  std::map<Atom, int> index_;
  std::vector<std::uint64_t> models_;
};

/// Set of models of a ModelTable.
class ModelSet {
 public:
  ModelSet() = default;
  explicit ModelSet(std::size_t n, bool full = false);

  static ModelSet full(std::size_t n) { return ModelSet(n, true); }

  std::size_t universe() const noexcept { return n_; }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool empty() const;
  bool is_full() const;
  std::size_t count() const;

  ModelSet operator&(const ModelSet& o) const;
  ModelSet operator|(const ModelSet& o) const;
  ModelSet operator~() const;
  ModelSet& operator&=(const ModelSet& o);
  ModelSet& operator|=(const ModelSet& o);
  bool subset_of(const ModelSet& o) const;

  friend bool operator==(const ModelSet&, const ModelSet&) = default;
  friend auto operator<=>(const ModelSet&, const ModelSet&) = default;

 private:
  void trim();
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Closed-world finite theory: universal clauses over constraint predicates,
/// interpreted in Herbrand models over a finite set of constants. Models
/// are enumerated exactly, so satisfiability and entailment are decided for
/// Datalog constraints. With non-constant function symbols in the signature
/// the theory answers in best-effort mode (CET solving plus ground-atom
/// checks) and may return Unknown.
class FiniteGroundTheory : public TheoryInterface {
 public:
  struct Options {
    /// Cap on ground atoms per enumerated component and for full
    /// enumeration.
    std::size_t max_atoms = 24;
    /// Cap on the number of distinct projected models.
    std::size_t max_models = std::size_t{1} << 20;
  };

  FiniteGroundTheory(TheorySpec spec, const Signature& signature);
  FiniteGroundTheory(TheorySpec spec, const Signature& signature, Options options);
  ~FiniteGroundTheory() override;

  TheoryCapabilities capabilities() const override;
  Sat satisfiable(const Constraint& c) const override;

  bool datalog() const noexcept { return datalog_; }
  /// Constants of the signature and the theory, sorted.
  const std::vector<Term>& domain() const noexcept { return domain_; }
  const TheorySpec& spec() const noexcept { return spec_; }
  /// Constraint predicates of the signature and the theory.
  const std::map<std::string, std::size_t>& predicates() const noexcept { return predicates_; }

  /// All ground constraint atoms, sorted.
  std::vector<Atom> ground_atoms() const;
  /// Theory has at least one model.
  bool consistent() const;

  /// Every model over ground_atoms() in deterministic order; throws
  /// ResourceError above the atom cap.
  void enumerate_models(const std::function<void(const TheoryModel&)>& visit) const;
  std::size_t count_models() const;

  /// Distinct model restrictions to `atoms` (ground, over the domain).
  std::shared_ptr<const ModelTable> project(std::vector<Atom> atoms) const;

  /// Models of `table` satisfying the closed constraint `c`.
  ModelSet models_of(const Constraint& c, const ModelTable& table) const;
  /// Ground atoms whose values decide the closed constraint `c`.
  std::set<Atom> relevant_atoms(const Constraint& c) const;

  /// Direct evaluation of a closed constraint in a full model.
  bool holds(const Constraint& c, const TheoryModel& m) const;

 private:
  struct Impl;
  TheorySpec spec_;
  Options options_;
  bool datalog_ = true;
  std::map<std::string, std::size_t> predicates_;
  std::map<std::string, std::size_t> functions_;
  std::vector<Term> domain_;
  std::unique_ptr<Impl> impl_;
};

/// Named theories referenced from program files with `#theory name`.
class TheoryRegistry {
 public:
  static TheoryRegistry& global();

  void add(const std::string& name, TheorySpec spec);
  bool contains(const std::string& name) const;
  /// Throws ContractError for unknown names.
  TheorySpec get(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, TheorySpec> theories_;
};

}  // namespace hyrule
