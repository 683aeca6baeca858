#include "hyrule/cet.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "hyrule/errors.hpp"
#include "hyrule/printer.hpp"

namespace hyrule {

namespace {

using K = Constraint::Kind;

void collect_symbols(const Term& t, std::map<std::string, std::size_t>& out) {
  if (t.is_variable()) return;
  out.emplace(t.name(), t.arity());
  for (const auto& a : t.args()) collect_symbols(a, out);
}

}  // namespace

CetResult cet_solve(const std::vector<Equation>& equations, const std::vector<Equation>& disequations,
                    const std::map<std::string, std::size_t>& functions) {
  auto mgu = unify(equations);
  if (!mgu) return {};
  std::vector<Equation> open;
  for (const auto& [s, t] : disequations) {
    Term a = mgu->apply(s), b = mgu->apply(t);
    if (a == b) return {};
    if (!unify({{a, b}})) continue;  // can never become equal
    open.emplace_back(std::move(a), std::move(b));
  }
  std::map<std::string, std::size_t> symbols = functions;
  for (const auto& [s, t] : equations) {
    collect_symbols(s, symbols);
    collect_symbols(t, symbols);
  }
  for (const auto& [s, t] : disequations) {
    collect_symbols(s, symbols);
    collect_symbols(t, symbols);
  }
  const bool finite = std::all_of(symbols.begin(), symbols.end(), [](const auto& f) { return f.second == 0; });
  if (open.empty() || !finite) return {true, *mgu};

  // Finite universe: search for constants distinguishing every disequation.
  std::vector<Term> universe;
  for (const auto& [name, _] : symbols) universe.push_back(Term::constant(name));
  if (universe.empty()) universe.push_back(Term::constant("_"));
  VarSet vs;
  for (const auto& [a, b] : open) {
    a.collect_variables(vs);
    b.collect_variables(vs);
  }
  const std::vector<std::string> vars(vs.begin(), vs.end());
  // Disequation i is checked once its last variable is assigned.
  std::vector<std::vector<std::size_t>> due(vars.size());
  for (std::size_t i = 0; i < open.size(); ++i) {
    VarSet own = variables(open[i].first);
    open[i].second.collect_variables(own);
    std::size_t last = 0;
    for (std::size_t v = 0; v < vars.size(); ++v)
      if (own.count(vars[v])) last = v;
    due[last].push_back(i);
  }
  Substitution theta;
  std::function<bool(std::size_t)> search = [&](std::size_t k) -> bool {
    if (k == vars.size()) return true;
    for (const auto& c : universe) {
      theta.bind(vars[k], c);
      bool ok = std::all_of(due[k].begin(), due[k].end(),
                            [&](std::size_t i) { return theta.apply(open[i].first) != theta.apply(open[i].second); });
      if (ok && search(k + 1)) return true;
    }
    theta.erase(vars[k]);
    return false;
  };
  if (!search(0)) return {};
  return {true, *mgu};
}

std::vector<Equation> top_level_equalities(const Constraint& c) {
  std::vector<Equation> out;
  std::function<void(const Constraint&)> walk = [&](const Constraint& x) {
    if (x.kind() == K::Eq) out.emplace_back(x.lhs(), x.rhs());
    if (x.kind() == K::And)
      for (const auto& o : x.operands()) walk(o);
  };
  walk(c);
  return out;
}

EqualityClass equality_class(const Constraint& c, const std::string& x) {
  EqualityClass out;
  out.members.insert(x);
  auto eqs = top_level_equalities(c);
  auto mgu = unify(eqs);
  if (!mgu) return out;
  const Term rep = mgu->apply(Term::variable(x));
  if (rep.is_ground()) out.ground = rep;
  VarSet vs;
  for (const auto& [a, b] : eqs) {
    a.collect_variables(vs);
    b.collect_variables(vs);
  }
  for (const auto& v : vs)
    if (mgu->apply(Term::variable(v)) == rep) out.members.insert(v);
  return out;
}

Binding bound_to(const Constraint& c, const std::string& x) {
  if (!free_variables(c).count(x)) return {Binding::Kind::Variable, Term::variable(x)};
  EqualityClass cls = equality_class(c, x);
  if (cls.ground) return {Binding::Kind::GroundTerm, *cls.ground};
  for (const auto& v : cls.members)
    if (v != x) return {Binding::Kind::Variable, Term::variable(v)};
  return {};
}

namespace {

void flatten(const Constraint& c, K kind, std::vector<Constraint>& out) {
  if (c.kind() == kind) {
    for (const auto& o : c.operands()) flatten(o, kind, out);
  } else {
    out.push_back(c);
  }
}

void dedupe(std::vector<Constraint>& xs) {
  std::set<Constraint> seen;
  std::vector<Constraint> out;
  for (auto& x : xs)
    if (seen.insert(x).second) out.push_back(std::move(x));
  xs = std::move(out);
}

class Simplifier {
 public:
  explicit Simplifier(const Constraint& root) : fresh_(all_variables(root)) {}

  Constraint run(const Constraint& c) {
    switch (c.kind()) {
      case K::True:
      case K::False:
      case K::Atom:
        return c;
      case K::Eq:
        return equation(c.lhs(), c.rhs());
      case K::Not:
        return negation(run(c.operand()));
      case K::And: {
        std::vector<Constraint> ops;
        for (const auto& o : c.operands()) ops.push_back(run(o));
        return conjunction(std::move(ops));
      }
      case K::Or: {
        std::vector<Constraint> ops;
        for (const auto& o : c.operands()) ops.push_back(run(o));
        return disjunction(std::move(ops));
      }
      case K::Exists:
        return exists(c.bound(), run(c.operand()));
    }
    return c;
  }

 private:
  Constraint equation(const Term& l, const Term& r) {
    if (l == r) return Constraint::truth();
    auto mgu = unify({{l, r}});
    if (!mgu) return Constraint::falsity();
    std::vector<Constraint> eqs;
    for (const auto& [v, t] : *mgu) eqs.push_back(Constraint::equal(Term::variable(v), t));
    return Constraint::conjunction(std::move(eqs));
  }

  static Constraint negation(const Constraint& s) {
    if (s.is_true()) return Constraint::falsity();
    if (s.is_false()) return Constraint::truth();
    if (s.kind() == K::Not) return s.operand();
    return Constraint::negation(s);
  }

  static Constraint disjunction(std::vector<Constraint> in) {
    std::vector<Constraint> ops;
    for (const auto& o : in) flatten(o, K::Or, ops);
    std::vector<Constraint> kept;
    for (auto& o : ops) {
      if (o.is_true()) return Constraint::truth();
      if (!o.is_false()) kept.push_back(std::move(o));
    }
    dedupe(kept);
    std::set<Constraint> present(kept.begin(), kept.end());
    for (const auto& o : kept)
      if (o.kind() == K::Not && present.count(o.operand())) return Constraint::truth();
    return Constraint::disjunction(std::move(kept));
  }

  Constraint conjunction(std::vector<Constraint> in) {
    std::vector<Constraint> ops;
    for (const auto& o : in) flatten(o, K::And, ops);
    for (int round = 0; round < 16; ++round) {
      std::vector<Equation> eqs;
      std::vector<Constraint> others;
      for (auto& o : ops) {
        if (o.is_false()) return Constraint::falsity();
        if (o.is_true()) continue;
        if (o.kind() == K::Eq)
          eqs.emplace_back(o.lhs(), o.rhs());
        else
          others.push_back(std::move(o));
      }
      auto mgu = unify(eqs);
      if (!mgu) return Constraint::falsity();
      bool changed = false;
      std::vector<Constraint> next;
      for (const auto& [v, t] : *mgu) next.push_back(Constraint::equal(Term::variable(v), t));
      if (next.size() != eqs.size()) changed = true;
      std::vector<Constraint> rest;
      for (auto& o : others) {
        if (!mgu->empty()) {
          Constraint s = substitute(o, *mgu, fresh_);
          if (!(s == o)) {
            changed = true;
            o = run(s);
          }
        }
        flatten(o, K::And, rest);
      }
      if (rest.size() != others.size()) changed = true;
      dedupe(rest);
      // Propagate conjuncts into negations and disjunctions.
      std::set<Constraint> units(next.begin(), next.end());
      units.insert(rest.begin(), rest.end());
      auto implied = [&](const Constraint& x) {
        if (units.count(x)) return true;
        if (x.kind() == K::And)
          return std::all_of(x.operands().begin(), x.operands().end(),
                             [&](const Constraint& y) { return units.count(y) != 0; });
        return false;
      };
      for (auto& o : rest) {
        if (o.kind() == K::Not && implied(o.operand())) return Constraint::falsity();
        if (o.kind() != K::Or) continue;
        std::vector<Constraint> kept;
        bool satisfied = false;
        for (const auto& d : o.operands()) {
          if (units.count(d)) satisfied = true;
          if (d.kind() == K::Not && implied(d.operand())) continue;
          kept.push_back(d);
        }
        if (satisfied) {
          o = Constraint::truth();
          changed = true;
        } else if (kept.size() != o.operands().size()) {
          o = run(disjunction(std::move(kept)));
          changed = true;
        }
      }
      for (auto& o : rest) next.push_back(std::move(o));
      ops = std::move(next);
      if (!changed) break;
    }
    std::vector<Constraint> kept;
    for (auto& o : ops) {
      if (o.is_false()) return Constraint::falsity();
      if (!o.is_true()) flatten(o, K::And, kept);
    }
    dedupe(kept);
    return Constraint::conjunction(std::move(kept));
  }

  Constraint exists(std::vector<std::string> vars, Constraint body) {
    for (;;) {
      const VarSet fv = free_variables(body);
      std::vector<std::string> used;
      for (const auto& v : vars)
        if (fv.count(v) && std::find(used.begin(), used.end(), v) == used.end()) used.push_back(v);
      vars = std::move(used);
      if (vars.empty() || body.is_true() || body.is_false()) return body;
      auto bound = [&](const std::string& v) { return std::find(vars.begin(), vars.end(), v) != vars.end(); };

      if (body.kind() == K::Or) {
        std::vector<Constraint> ops;
        for (const auto& d : body.operands()) ops.push_back(exists(vars, d));
        return disjunction(std::move(ops));
      }
      if (body.kind() == K::Exists) {
        // Merge nested quantifiers unless an inner variable shadows an outer one.
        const auto& inner = body.bound();
        bool clash = std::any_of(inner.begin(), inner.end(), bound);
        if (!clash) {
          std::vector<std::string> all = vars;
          all.insert(all.end(), inner.begin(), inner.end());
          vars = std::move(all);
          body = body.operand();
          continue;
        }
        return Constraint::exists(vars, body);
      }

      std::vector<Constraint> conj;
      flatten(body, K::And, conj);
      // One-point rule: exists x (x = t and F) is F[x/t] when x is not in t.
      std::optional<Substitution> point;
      std::size_t at = 0;
      for (std::size_t i = 0; i < conj.size() && !point; ++i) {
        const auto& e = conj[i];
        if (e.kind() != K::Eq) continue;
        const Term& l = e.lhs();
        const Term& r = e.rhs();
        if (l.is_variable() && bound(l.name()) && !r.occurs(l.name())) {
          point = Substitution{{l.name(), r}};
        } else if (r.is_variable() && bound(r.name()) && !l.occurs(r.name())) {
          point = Substitution{{r.name(), l}};
        }
        at = i;
      }
      if (point) {
        conj.erase(conj.begin() + static_cast<std::ptrdiff_t>(at));
        std::vector<Constraint> substituted;
        for (const auto& x : conj) substituted.push_back(substitute(x, *point, fresh_));
        const std::string gone = point->begin()->first;
        vars.erase(std::find(vars.begin(), vars.end(), gone));
        body = run(Constraint::conjunction(std::move(substituted)));
        continue;
      }
      // Miniscoping: conjuncts without bound variables move out, and
      // conjuncts sharing no bound variable get separate quantifiers.
      std::vector<Constraint> outer;
      std::vector<std::pair<VarSet, std::vector<Constraint>>> groups;
      for (auto& x : conj) {
        VarSet mine;
        for (const auto& v : free_variables(x))
          if (bound(v)) mine.insert(v);
        if (mine.empty()) {
          outer.push_back(std::move(x));
          continue;
        }
        std::pair<VarSet, std::vector<Constraint>> merged{mine, {std::move(x)}};
        for (auto it = groups.begin(); it != groups.end();) {
          bool shares = std::any_of(it->first.begin(), it->first.end(), [&](const std::string& v) { return mine.count(v) != 0; });
          if (!shares) {
            ++it;
            continue;
          }
          merged.first.insert(it->first.begin(), it->first.end());
          for (auto& y : it->second) merged.second.push_back(std::move(y));
          it = groups.erase(it);
        }
        groups.push_back(std::move(merged));
      }
      if (outer.empty() && groups.size() == 1) return Constraint::exists(vars, body);
      for (auto& [vs, xs] : groups) {
        std::vector<std::string> own;
        for (const auto& v : vars)
          if (vs.count(v)) own.push_back(v);
        outer.push_back(exists(own, Constraint::conjunction(std::move(xs))));
      }
      return conjunction(std::move(outer));
    }
    return Constraint::exists(vars, body);
  }

  FreshNames fresh_;
};

}  // namespace

Constraint simplify(const Constraint& c) {
  Simplifier s(c);
  return s.run(c);
}

namespace {

Constraint nnf(const Constraint& c, bool positive, const std::vector<Term>& domain, FreshNames& fresh) {
  switch (c.kind()) {
    case K::True:
      return positive ? c : Constraint::falsity();
    case K::False:
      return positive ? c : Constraint::truth();
    case K::Atom:
    case K::Eq:
      return positive ? c : Constraint::negation(c);
    case K::Not:
      return nnf(c.operand(), !positive, domain, fresh);
    case K::And:
    case K::Or: {
      std::vector<Constraint> ops;
      for (const auto& o : c.operands()) ops.push_back(nnf(o, positive, domain, fresh));
      return (c.kind() == K::And) == positive ? make_and(std::move(ops)) : make_or(std::move(ops));
    }
    case K::Exists: {
      std::vector<Constraint> ops;
      const auto& vars = c.bound();
      std::vector<std::size_t> idx(vars.size(), 0);
      if (!domain.empty()) {
        for (;;) {
          Substitution theta;
          for (std::size_t i = 0; i < vars.size(); ++i) theta.bind(vars[i], domain[idx[i]]);
          ops.push_back(nnf(substitute(c.operand(), theta, fresh), positive, domain, fresh));
          std::size_t i = 0;
          while (i < idx.size() && ++idx[i] == domain.size()) idx[i++] = 0;
          if (i == idx.size()) break;
        }
      }
      return positive ? make_or(std::move(ops)) : make_and(std::move(ops));
    }
  }
  return c;
}

using Dnf = std::vector<std::vector<Constraint>>;

Dnf to_dnf(const Constraint& c, std::size_t cap) {
  switch (c.kind()) {
    case K::True:
      return {{}};
    case K::False:
      return {};
    case K::Or: {
      Dnf out;
      for (const auto& o : c.operands()) {
        Dnf d = to_dnf(o, cap);
        out.insert(out.end(), d.begin(), d.end());
        if (out.size() > cap) throw ResourceError("disjunctive normal form exceeds " + std::to_string(cap) + " disjuncts");
      }
      return out;
    }
    case K::And: {
      Dnf acc{{}};
      for (const auto& o : c.operands()) {
        Dnf d = to_dnf(o, cap);
        Dnf next;
        for (const auto& a : acc)
          for (const auto& b : d) {
            auto x = a;
            x.insert(x.end(), b.begin(), b.end());
            next.push_back(std::move(x));
            if (next.size() > cap)
              throw ResourceError("disjunctive normal form exceeds " + std::to_string(cap) + " disjuncts");
          }
        acc = std::move(next);
      }
      return acc;
    }
    default:
      return {{c}};
  }
}

}  // namespace

Constraint expand_over(const Constraint& c, const std::vector<Term>& domain) {
  FreshNames fresh(all_variables(c));
  return nnf(c, true, domain, fresh);
}

std::vector<SolvedForm> to_solved_forms(const Constraint& c, const VarSet& keep, const std::vector<Term>& domain,
                                        std::size_t max_disjuncts) {
  const Constraint expanded = expand_over(simplify(c), domain);
  std::vector<SolvedForm> out;
  std::set<std::string> seen;
  for (const auto& conj : to_dnf(expanded, max_disjuncts)) {
    std::vector<Equation> eqs;
    for (const auto& lit : conj)
      if (lit.kind() == K::Eq) eqs.emplace_back(lit.lhs(), lit.rhs());
    auto mgu = unify(eqs);
    if (!mgu) continue;
    VarSet vs;
    for (const auto& lit : conj) {
      VarSet lv = free_variables(lit);
      vs.insert(lv.begin(), lv.end());
    }
    for (const auto& v : vs)
      if (!mgu->apply(Term::variable(v)).is_ground())
        throw ContractError("variable " + v + " is not bound to a constant in " + to_string(c));
    SolvedForm form;
    std::set<std::pair<bool, Constraint>> lits;
    bool consistent = true;
    for (const auto& lit : conj) {
      if (lit.kind() == K::Eq) continue;
      bool positive = lit.kind() != K::Not;
      const Constraint& a = positive ? lit : lit.operand();
      Constraint g = substitute(a, *mgu);
      if (g.kind() == K::Eq) {
        if ((g.lhs() == g.rhs()) != positive) consistent = false;
        continue;
      }
      if (lits.count({!positive, g})) consistent = false;
      if (lits.insert({positive, g}).second) form.literals.emplace_back(positive, g);
    }
    if (!consistent) continue;
    for (const auto& v : keep)
      if (const Term* t = mgu->find(v)) form.equalities.emplace_back(v, *t);
    std::sort(form.literals.begin(), form.literals.end());
    std::string key = to_string(to_constraint(form));
    if (seen.insert(key).second) out.push_back(std::move(form));
  }
  return out;
}

Constraint to_constraint(const SolvedForm& s) {
  std::vector<Constraint> ops;
  for (const auto& [v, t] : s.equalities) ops.push_back(Constraint::equal(Term::variable(v), t));
  for (const auto& [pos, a] : s.literals) ops.push_back(pos ? a : Constraint::negation(a));
  return Constraint::conjunction(std::move(ops));
}

Constraint to_constraint(const std::vector<SolvedForm>& forms) {
  std::vector<Constraint> ops;
  for (const auto& f : forms) ops.push_back(to_constraint(f));
  return Constraint::disjunction(std::move(ops));
}

}  // namespace hyrule
