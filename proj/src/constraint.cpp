#include "hyrule/constraint.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace hyrule {

struct Constraint::Node {
  Kind kind = Kind::True;
  std::string predicate;
  std::vector<Term> args;
  std::vector<Constraint> operands;
  std::vector<std::string> bound;
};

Constraint::Constraint() : Constraint(truth()) {}

Constraint Constraint::truth() {
  static const auto node = std::make_shared<const Node>(Node{Kind::True, {}, {}, {}, {}});
  return Constraint(node);
}

Constraint Constraint::falsity() {
  static const auto node = std::make_shared<const Node>(Node{Kind::False, {}, {}, {}, {}});
  return Constraint(node);
}

Constraint Constraint::atom(std::string predicate, std::vector<Term> args) {
  return Constraint(std::make_shared<const Node>(Node{Kind::Atom, std::move(predicate), std::move(args), {}, {}}));
}

Constraint Constraint::equal(Term lhs, Term rhs) {
  std::vector<Term> args;
  args.push_back(std::move(lhs));
  args.push_back(std::move(rhs));
  return Constraint(std::make_shared<const Node>(Node{Kind::Eq, "=", std::move(args), {}, {}}));
}

Constraint Constraint::negation(Constraint operand) {
  std::vector<Constraint> ops;
  ops.push_back(std::move(operand));
  return Constraint(std::make_shared<const Node>(Node{Kind::Not, {}, {}, std::move(ops), {}}));
}

Constraint Constraint::conjunction(std::vector<Constraint> operands) {
  if (operands.empty()) return truth();
  if (operands.size() == 1) return operands.front();
  return Constraint(std::make_shared<const Node>(Node{Kind::And, {}, {}, std::move(operands), {}}));
}

Constraint Constraint::disjunction(std::vector<Constraint> operands) {
  if (operands.empty()) return falsity();
  if (operands.size() == 1) return operands.front();
  return Constraint(std::make_shared<const Node>(Node{Kind::Or, {}, {}, std::move(operands), {}}));
}

Constraint Constraint::exists(std::vector<std::string> vars, Constraint body) {
  if (vars.empty()) return body;
  std::vector<Constraint> ops;
  ops.push_back(std::move(body));
  return Constraint(std::make_shared<const Node>(Node{Kind::Exists, {}, {}, std::move(ops), std::move(vars)}));
}

Constraint::Kind Constraint::kind() const noexcept { return node_->kind; }

const std::string& Constraint::predicate() const {
  if (kind() != Kind::Atom && kind() != Kind::Eq) throw std::logic_error("predicate() on non-atomic constraint");
  return node_->predicate;
}

const std::vector<Term>& Constraint::args() const {
  if (kind() != Kind::Atom && kind() != Kind::Eq) throw std::logic_error("args() on non-atomic constraint");
  return node_->args;
}

const Constraint& Constraint::operand() const {
  if (kind() != Kind::Not && kind() != Kind::Exists) throw std::logic_error("operand() on non-unary constraint");
  return node_->operands.front();
}

const std::vector<Constraint>& Constraint::operands() const { return node_->operands; }

const std::vector<std::string>& Constraint::bound() const { return node_->bound; }

std::size_t Constraint::size() const {
  std::size_t n = 1;
  for (const auto& o : node_->operands) n += o.size();
  return n;
}

bool operator==(const Constraint& a, const Constraint& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  return x.kind == y.kind && x.predicate == y.predicate && x.args == y.args && x.bound == y.bound &&
         x.operands == y.operands;
}

bool operator<(const Constraint& a, const Constraint& b) {
  if (a.node_ == b.node_) return false;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return x.kind < y.kind;
  if (x.predicate != y.predicate) return x.predicate < y.predicate;
  if (x.args != y.args) return x.args < y.args;
  if (x.bound != y.bound) return x.bound < y.bound;
  return std::lexicographical_compare(x.operands.begin(), x.operands.end(), y.operands.begin(), y.operands.end());
}

namespace {

void collect_free(const Constraint& c, VarSet& bound, VarSet& out) {
  using K = Constraint::Kind;
  switch (c.kind()) {
    case K::True:
    case K::False:
      return;
    case K::Atom:
    case K::Eq: {
      VarSet vs;
      for (const auto& t : c.args()) t.collect_variables(vs);
      for (const auto& v : vs)
        if (!bound.count(v)) out.insert(v);
      return;
    }
    case K::Not:
    case K::And:
    case K::Or:
      for (const auto& o : c.operands()) collect_free(o, bound, out);
      return;
    case K::Exists: {
      std::vector<std::string> added;
      for (const auto& v : c.bound())
        if (bound.insert(v).second) added.push_back(v);
      collect_free(c.operand(), bound, out);
      for (const auto& v : added) bound.erase(v);
      return;
    }
  }
}

void collect_predicates(const Constraint& c, std::set<std::string>& out) {
  if (c.kind() == Constraint::Kind::Atom) {
    out.insert(c.predicate());
    return;
  }
  for (const auto& o : c.operands()) collect_predicates(o, out);
}

void collect_all(const Constraint& c, VarSet& out) {
  if (c.kind() == Constraint::Kind::Atom || c.kind() == Constraint::Kind::Eq) {
    for (const auto& t : c.args()) t.collect_variables(out);
    return;
  }
  if (c.kind() == Constraint::Kind::Exists) out.insert(c.bound().begin(), c.bound().end());
  for (const auto& o : c.operands()) collect_all(o, out);
}

}  // namespace

VarSet free_variables(const Constraint& c) {
  VarSet bound, out;
  collect_free(c, bound, out);
  return out;
}

VarSet all_variables(const Constraint& c) {
  VarSet out;
  collect_all(c, out);
  return out;
}

std::set<std::string> predicates(const Constraint& c) {
  std::set<std::string> out;
  collect_predicates(c, out);
  return out;
}

bool contains_quantifier(const Constraint& c) {
  if (c.kind() == Constraint::Kind::Exists) return true;
  return std::any_of(c.operands().begin(), c.operands().end(), contains_quantifier);
}

Constraint substitute(const Constraint& c, const Substitution& theta, FreshNames& fresh) {
  using K = Constraint::Kind;
  if (theta.empty()) return c;
  switch (c.kind()) {
    case K::True:
    case K::False:
      return c;
    case K::Atom: {
      std::vector<Term> args;
      for (const auto& t : c.args()) args.push_back(theta.apply(t));
      return Constraint::atom(c.predicate(), std::move(args));
    }
    case K::Eq:
      return Constraint::equal(theta.apply(c.lhs()), theta.apply(c.rhs()));
    case K::Not:
      return Constraint::negation(substitute(c.operand(), theta, fresh));
    case K::And:
    case K::Or: {
      std::vector<Constraint> ops;
      ops.reserve(c.operands().size());
      for (const auto& o : c.operands()) ops.push_back(substitute(o, theta, fresh));
      return c.kind() == K::And ? Constraint::conjunction(std::move(ops)) : Constraint::disjunction(std::move(ops));
    }
    case K::Exists: {
      // Bindings for the bound variables do not apply inside; bound
      // variables that would capture a range variable are renamed.
      Substitution inner;
      const VarSet body_free = free_variables(c.operand());
      for (const auto& [v, t] : theta) {
        if (std::find(c.bound().begin(), c.bound().end(), v) != c.bound().end()) continue;
        if (body_free.count(v)) inner.bind(v, t);
      }
      if (inner.empty()) return c;
      const VarSet range = inner.range_variables();
      std::vector<std::string> vars;
      for (const auto& v : c.bound()) {
        if (range.count(v)) {
          std::string renamed = fresh.next(v);
          inner.bind(v, Term::variable(renamed));
          vars.push_back(std::move(renamed));
        } else {
          vars.push_back(v);
        }
      }
      return Constraint::exists(std::move(vars), substitute(c.operand(), inner, fresh));
    }
  }
  return c;
}

Constraint substitute(const Constraint& c, const Substitution& theta) {
  FreshNames fresh(all_variables(c));
  fresh.reserve(theta.range_variables());
  return substitute(c, theta, fresh);
}

Constraint restrict_to(const Constraint& c, const VarSet& keep) {
  std::vector<std::string> vars;
  for (const auto& v : free_variables(c))
    if (!keep.count(v)) vars.push_back(v);
  return Constraint::exists(std::move(vars), c);
}

Constraint make_and(std::vector<Constraint> operands) {
  std::vector<Constraint> flat;
  for (auto& o : operands) {
    if (o.is_true()) continue;
    if (o.is_false()) return Constraint::falsity();
    if (o.kind() == Constraint::Kind::And) {
      for (const auto& x : o.operands()) flat.push_back(x);
    } else {
      flat.push_back(std::move(o));
    }
  }
  return Constraint::conjunction(std::move(flat));
}

Constraint make_or(std::vector<Constraint> operands) {
  std::vector<Constraint> flat;
  for (auto& o : operands) {
    if (o.is_false()) continue;
    if (o.is_true()) return Constraint::truth();
    if (o.kind() == Constraint::Kind::Or) {
      for (const auto& x : o.operands()) flat.push_back(x);
    } else {
      flat.push_back(std::move(o));
    }
  }
  return Constraint::disjunction(std::move(flat));
}

Constraint make_not(const Constraint& c) {
  if (c.is_true()) return Constraint::falsity();
  if (c.is_false()) return Constraint::truth();
  if (c.kind() == Constraint::Kind::Not) return c.operand();
  return Constraint::negation(c);
}

}  // namespace hyrule
