#include "hyrule/term.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

namespace hyrule {

Term Term::variable(std::string name) {
  Term t;
  t.is_var_ = true;
  t.name_ = std::move(name);
  return t;
}

Term Term::function(std::string symbol, std::vector<Term> args) {
  Term t;
  t.name_ = std::move(symbol);
  t.args_ = std::move(args);
  return t;
}

bool Term::is_ground() const {
  if (is_var_) return false;
  return std::all_of(args_.begin(), args_.end(), [](const Term& a) { return a.is_ground(); });
}

std::size_t Term::depth() const {
  std::size_t d = 0;
  for (const auto& a : args_) d = std::max(d, a.depth() + 1);
  return d;
}

bool Term::occurs(std::string_view var) const {
  if (is_var_) return name_ == var;
  return std::any_of(args_.begin(), args_.end(), [&](const Term& a) { return a.occurs(var); });
}

void Term::collect_variables(VarSet& out) const {
  if (is_var_) {
    out.insert(name_);
    return;
  }
  for (const auto& a : args_) a.collect_variables(out);
}

bool operator==(const Term& a, const Term& b) {
  return a.is_var_ == b.is_var_ && a.name_ == b.name_ && a.args_ == b.args_;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  // Variables sort before function terms.
  if (a.is_var_ != b.is_var_) return a.is_var_ ? std::strong_ordering::less : std::strong_ordering::greater;
  if (auto c = a.name_ <=> b.name_; c != 0) return c;
  if (auto c = a.args_.size() <=> b.args_.size(); c != 0) return c;
  for (std::size_t i = 0; i < a.args_.size(); ++i) {
    if (auto c = a.args_[i] <=> b.args_[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

VarSet variables(const Term& t) {
  VarSet out;
  t.collect_variables(out);
  return out;
}

const Term* Substitution::find(const std::string& var) const {
  auto it = bindings_.find(var);
  return it == bindings_.end() ? nullptr : &it->second;
}

Term Substitution::apply(const Term& t) const {
  if (t.is_variable()) {
    const Term* b = find(t.name());
    return b ? *b : t;
  }
  if (t.args().empty()) return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const auto& a : t.args()) args.push_back(apply(a));
  return Term::function(t.name(), std::move(args));
}

VarSet Substitution::range_variables() const {
  VarSet out;
  for (const auto& [_, t] : bindings_) t.collect_variables(out);
  return out;
}

VarSet Substitution::domain() const {
  VarSet out;
  for (const auto& [v, _] : bindings_) out.insert(v);
  return out;
}

std::string FreshNames::next(std::string_view base) {
  // Strip a previous `_N` suffix so renamed variables keep short names.
  std::string stem(base);
  auto us = stem.rfind('_');
  if (us != std::string::npos && us > 0 && us + 1 < stem.size() &&
      std::all_of(stem.begin() + static_cast<std::ptrdiff_t>(us) + 1, stem.end(),
                  [](unsigned char c) { return std::isdigit(c) != 0; })) {
    stem.resize(us);
  }
  if (stem.empty()) stem = "V";
  for (;;) {
    std::string name = stem + "_" + std::to_string(++counter_);
    if (!reserved_.count(name)) return name;
  }
}

void FreshNames::reserve(const VarSet& names) { reserved_.insert(names.begin(), names.end()); }

namespace {

Term resolve(const Term& t, const std::map<std::string, Term>& sigma) {
  if (t.is_variable()) {
    auto it = sigma.find(t.name());
    return it == sigma.end() ? t : resolve(it->second, sigma);
  }
  if (t.args().empty()) return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const auto& a : t.args()) args.push_back(resolve(a, sigma));
  return Term::function(t.name(), std::move(args));
}

}  // namespace

std::optional<Substitution> unify(const std::vector<std::pair<Term, Term>>& equations) {
  std::vector<std::pair<Term, Term>> work(equations.rbegin(), equations.rend());
  std::map<std::string, Term> sigma;  // triangular form
  while (!work.empty()) {
    auto [l, r] = std::move(work.back());
    work.pop_back();
    l = resolve(l, sigma);
    r = resolve(r, sigma);
    if (l == r) continue;
    if (!l.is_variable() && r.is_variable()) std::swap(l, r);
    if (l.is_variable()) {
      if (r.occurs(l.name())) return std::nullopt;
      sigma[l.name()] = r;
      continue;
    }
    if (l.name() != r.name() || l.arity() != r.arity()) return std::nullopt;
    for (std::size_t i = l.arity(); i-- > 0;) work.emplace_back(l.args()[i], r.args()[i]);
  }
  Substitution out;
  for (const auto& [v, t] : sigma) out.bind(v, resolve(t, sigma));
  return out;
}

}  // namespace hyrule
