#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hyrule {

using VarSet = std::set<std::string>;

/// A first-order term: a variable or a function symbol applied to arguments.
/// Constants are nullary function applications.
class Term {
 public:
  Term() = default;

  static Term variable(std::string name);
  static Term function(std::string symbol, std::vector<Term> args = {});
  static Term constant(std::string symbol) { return function(std::move(symbol)); }

  bool is_variable() const noexcept { return is_var_; }
  bool is_constant() const noexcept { return !is_var_ && args_.empty(); }
  const std::string& name() const noexcept { return name_; }
  const std::vector<Term>& args() const noexcept { return args_; }
  std::size_t arity() const noexcept { return args_.size(); }

  bool is_ground() const;
  /// Nesting depth; variables and constants have depth 0.
  std::size_t depth() const;
  bool occurs(std::string_view var) const;
  void collect_variables(VarSet& out) const;

  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  bool is_var_ = false;
  std::string name_;
  std::vector<Term> args_;
};

VarSet variables(const Term& t);

/// Finite map from variable names to terms. Application is a single
/// simultaneous replacement; callers that need idempotence build it so.
class Substitution {
 public:
  Substitution() = default;
  Substitution(std::initializer_list<std::pair<const std::string, Term>> init)
      : bindings_(init) {}

  void bind(const std::string& var, Term value) { bindings_[var] = std::move(value); }
  void erase(const std::string& var) { bindings_.erase(var); }
  const Term* find(const std::string& var) const;
  bool contains(const std::string& var) const { return bindings_.count(var) != 0; }
  bool empty() const noexcept { return bindings_.empty(); }
  std::size_t size() const noexcept { return bindings_.size(); }

  Term apply(const Term& t) const;
  /// Variables occurring in the bound terms.
  VarSet range_variables() const;
  VarSet domain() const;

  auto begin() const { return bindings_.begin(); }
  auto end() const { return bindings_.end(); }

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  std::map<std::string, Term> bindings_;
};

/// Deterministic generator of fresh variable names `Base_N`.
class FreshNames {
 public:
  FreshNames() = default;
  explicit FreshNames(VarSet reserved) : reserved_(std::move(reserved)) {}

  std::string next(std::string_view base);
  void reserve(const VarSet& names);
  void reset() { counter_ = 0; }
  std::size_t counter() const noexcept { return counter_; }

 private:
  std::size_t counter_ = 0;
  VarSet reserved_;
};

/// Robinson unification with occurs check over a list of equations.
/// Returns an idempotent most general unifier, or nothing on clash.
std::optional<Substitution> unify(const std::vector<std::pair<Term, Term>>& equations);

}  // namespace hyrule
