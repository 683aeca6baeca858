#include "hyrule/program.hpp"

#include <algorithm>

#include "hyrule/errors.hpp"

namespace hyrule {

bool Atom::is_ground() const {
  return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_ground(); });
}

bool Signature::is_datalog() const {
  return std::all_of(functions.begin(), functions.end(), [](const auto& f) { return f.second == 0; });
}

std::vector<std::string> Signature::constants() const {
  std::vector<std::string> out;
  for (const auto& [name, arity] : functions)
    if (arity == 0) out.push_back(name);
  return out;
}

VarSet variables(const Atom& a) {
  VarSet out;
  for (const auto& t : a.args) t.collect_variables(out);
  return out;
}

VarSet variables(const RuleLiteral& l) { return variables(l.atom); }

VarSet variables(const HybridRule& r) {
  VarSet out = variables(r.head);
  VarSet cv = free_variables(r.constraint);
  out.insert(cv.begin(), cv.end());
  for (const auto& l : r.body)
    for (const auto& t : l.atom.args) t.collect_variables(out);
  return out;
}

VarSet variables(const Goal& g) {
  VarSet out = free_variables(g.constraint);
  for (const auto& l : g.literals)
    for (const auto& t : l.atom.args) t.collect_variables(out);
  return out;
}

Atom substitute(const Atom& a, const Substitution& theta) {
  Atom out{a.predicate, {}};
  out.args.reserve(a.args.size());
  for (const auto& t : a.args) out.args.push_back(theta.apply(t));
  return out;
}

RuleLiteral substitute(const RuleLiteral& l, const Substitution& theta) {
  return RuleLiteral{l.positive, substitute(l.atom, theta)};
}

Goal substitute(const Goal& g, const Substitution& theta, FreshNames& fresh) {
  Goal out{substitute(g.constraint, theta, fresh), {}};
  for (const auto& l : g.literals) out.literals.push_back(substitute(l, theta));
  return out;
}

HybridRule substitute(const HybridRule& r, const Substitution& theta, FreshNames& fresh) {
  HybridRule out{substitute(r.head, theta), substitute(r.constraint, theta, fresh), {}};
  for (const auto& l : r.body) out.body.push_back(substitute(l, theta));
  return out;
}

HybridRule rename_apart(const HybridRule& r, FreshNames& fresh) {
  Substitution theta;
  for (const auto& v : variables(r)) theta.bind(v, Term::variable(fresh.next(v)));
  HybridRule out = substitute(r, theta, fresh);
  return out;
}

void for_each_ground_instance(const HybridRule& r, const std::vector<Term>& universe,
                              const std::function<void(HybridRule)>& yield) {
  const VarSet vs = variables(r);
  const std::vector<std::string> vars(vs.begin(), vs.end());
  if (vars.empty()) {
    yield(r);
    return;
  }
  if (universe.empty()) throw ContractError("cannot ground a rule with variables over an empty universe");
  std::vector<std::size_t> idx(vars.size(), 0);
  FreshNames fresh(all_variables(r.constraint));
  for (;;) {
    Substitution theta;
    for (std::size_t i = 0; i < vars.size(); ++i) theta.bind(vars[i], universe[idx[i]]);
    yield(substitute(r, theta, fresh));
    std::size_t i = 0;
    while (i < idx.size() && ++idx[i] == universe.size()) idx[i++] = 0;
    if (i == idx.size()) return;
  }
}

std::vector<HybridRule> ground_instances(const HybridRule& r, const std::vector<Term>& universe) {
  std::vector<HybridRule> out;
  for_each_ground_instance(r, universe, [&](HybridRule g) { out.push_back(std::move(g)); });
  return out;
}

namespace {

void note_arity(std::map<std::string, std::size_t>& table, const std::string& name, std::size_t arity,
                const char* what) {
  auto [it, inserted] = table.emplace(name, arity);
  if (!inserted && it->second != arity)
    throw ParseError(std::string(what) + " '" + name + "' used with arities " + std::to_string(it->second) +
                         " and " + std::to_string(arity),
                     0, 0);
}

void note_term(Signature& sig, const Term& t) {
  if (t.is_variable()) return;
  note_arity(sig.functions, t.name(), t.arity(), "function symbol");
  for (const auto& a : t.args()) note_term(sig, a);
}

void note_constraint(Signature& sig, const Constraint& c) {
  using K = Constraint::Kind;
  if (c.kind() == K::Atom) note_arity(sig.constraint_predicates, c.predicate(), c.args().size(), "predicate");
  if (c.kind() == K::Atom || c.kind() == K::Eq) {
    for (const auto& t : c.args()) note_term(sig, t);
    return;
  }
  for (const auto& o : c.operands()) note_constraint(sig, o);
}

}  // namespace

void infer_signature(HybridProgram& program) {
  Signature& sig = program.signature;
  for (const auto& r : program.rules) {
    note_arity(sig.rule_predicates, r.head.predicate, r.head.args.size(), "predicate");
    for (const auto& t : r.head.args) note_term(sig, t);
    note_constraint(sig, r.constraint);
    for (const auto& l : r.body) {
      note_arity(sig.rule_predicates, l.atom.predicate, l.atom.args.size(), "predicate");
      for (const auto& t : l.atom.args) note_term(sig, t);
    }
  }
  if (program.inline_theory) {
    for (const auto& [p, n] : program.inline_theory->predicates) note_arity(sig.constraint_predicates, p, n, "predicate");
    for (const auto& [f, n] : program.inline_theory->functions) note_arity(sig.functions, f, n, "function symbol");
  }
  for (const auto& [p, _] : sig.rule_predicates)
    if (sig.constraint_predicates.count(p))
      throw ParseError("predicate '" + p + "' is both a rule and a constraint predicate", 0, 0);
}

}  // namespace hyrule
