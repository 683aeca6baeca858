#pragma once

// Reference implementations used only by the tests. They share data types
// with the library but none of its reasoning code.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyrule/declarative.hpp"
#include "hyrule/program.hpp"

namespace hyrule::testing {

struct GroundRule {
  int head = 0;
  std::vector<int> pos;
  std::vector<int> neg;
};

/// Least model of the rules whose negative atoms are all outside `assumed`.
inline std::vector<bool> gamma(int n, const std::vector<GroundRule>& rules, const std::vector<bool>& assumed) {
  std::vector<bool> m(static_cast<std::size_t>(n), false);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : rules) {
      if (m[static_cast<std::size_t>(r.head)]) continue;
      bool ok = std::none_of(r.neg.begin(), r.neg.end(), [&](int a) { return assumed[static_cast<std::size_t>(a)]; }) &&
                std::all_of(r.pos.begin(), r.pos.end(), [&](int a) { return m[static_cast<std::size_t>(a)]; });
      if (ok) {
        m[static_cast<std::size_t>(r.head)] = true;
        changed = true;
      }
    }
  }
  return m;
}

/// Well-founded model by the alternating fixpoint: 0 false, 1 undefined,
/// 2 true.
inline std::vector<int> alternating_fixpoint(int n, const std::vector<GroundRule>& rules) {
  std::vector<bool> t(static_cast<std::size_t>(n), false);
  for (;;) {
    auto next = gamma(n, rules, gamma(n, rules, t));
    if (next == t) break;
    t = next;
  }
  auto possible = gamma(n, rules, t);
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a)
    out[static_cast<std::size_t>(a)] = t[static_cast<std::size_t>(a)] ? 2 : possible[static_cast<std::size_t>(a)] ? 1 : 0;
  return out;
}

/// Perfect model of a program stratified by `level`: negative body atoms
/// have a strictly smaller level than the head, positive ones at most equal.
inline std::vector<bool> stratified_model(int n, const std::vector<GroundRule>& rules, const std::vector<int>& level) {
  std::vector<bool> m(static_cast<std::size_t>(n), false);
  int top = 0;
  for (int l : level) top = std::max(top, l);
  for (int s = 0; s <= top; ++s) {
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& r : rules) {
        if (level[static_cast<std::size_t>(r.head)] != s || m[static_cast<std::size_t>(r.head)]) continue;
        bool ok = std::none_of(r.neg.begin(), r.neg.end(), [&](int a) { return m[static_cast<std::size_t>(a)]; }) &&
                  std::all_of(r.pos.begin(), r.pos.end(), [&](int a) { return m[static_cast<std::size_t>(a)]; });
        if (ok) {
          m[static_cast<std::size_t>(r.head)] = true;
          changed = true;
        }
      }
    }
  }
  return m;
}

using Env = std::map<std::string, std::string>;

inline std::string ground_text(const Term& t, const Env& env) {
  if (t.is_variable()) {
    auto it = env.find(t.name());
    if (it == env.end()) throw std::logic_error("unbound variable " + t.name());
    return it->second;
  }
  std::string s = t.name();
  if (!t.args().empty()) {
    s += "(";
    for (std::size_t i = 0; i < t.args().size(); ++i) s += (i ? "," : "") + ground_text(t.args()[i], env);
    s += ")";
  }
  return s;
}

inline std::string atom_text(const std::string& p, const std::vector<Term>& args, const Env& env) {
  std::string s = p + "(";
  for (std::size_t i = 0; i < args.size(); ++i) s += (i ? "," : "") + ground_text(args[i], env);
  return s + ")";
}

/// Classification by definition: every Herbrand model of the theory over
/// the program constants is scanned, ground(P) is reduced by direct
/// evaluation of the constraints, and the reduct's well-founded model is
/// computed by the alternating fixpoint.
class BruteForceOracle {
 public:
  BruteForceOracle(const HybridProgram& p, const TheorySpec& spec) {
    std::set<std::string> consts;
    auto walk = [&](const Term& t, auto&& self) -> void {
      if (t.is_variable()) return;
      if (t.args().empty()) consts.insert(t.name());
      for (const auto& a : t.args()) self(a, self);
    };
    std::function<void(const Constraint&)> walk_c = [&](const Constraint& c) {
      switch (c.kind()) {
        case Constraint::Kind::Atom:
        case Constraint::Kind::Eq:
          for (const auto& t : c.args()) walk(t, walk);
          break;
        case Constraint::Kind::Not:
        case Constraint::Kind::Exists:
          walk_c(c.operand());
          break;
        case Constraint::Kind::And:
        case Constraint::Kind::Or:
          for (const auto& o : c.operands()) walk_c(o);
          break;
        default:
          break;
      }
    };
    for (const auto& [f, n] : p.signature.functions)
      if (n == 0) consts.insert(f);
    for (const auto& [f, n] : spec.functions)
      if (n == 0) consts.insert(f);
    for (const auto& r : p.rules) {
      for (const auto& t : r.head.args) walk(t, walk);
      for (const auto& l : r.body)
        for (const auto& t : l.atom.args) walk(t, walk);
      walk_c(r.constraint);
    }
    std::map<std::string, std::size_t> cpreds = p.signature.constraint_predicates;
    for (const auto& [q, n] : spec.predicates) cpreds.emplace(q, n);
    for (const auto& cl : spec.clauses)
      for (const auto& [positive, a] : cl.literals) {
        cpreds.emplace(a.predicate, a.args.size());
        for (const auto& t : a.args) walk(t, walk);
      }
    domain_.assign(consts.begin(), consts.end());

    for (const auto& [q, n] : cpreds) {
      for_each_tuple(n, [&](const std::vector<std::string>& tuple) {
        std::string s = q + "(";
        for (std::size_t i = 0; i < tuple.size(); ++i) s += (i ? "," : "") + tuple[i];
        letter_.emplace(s + ")", static_cast<int>(letter_.size()));
      });
    }
    if (letter_.size() > 20) throw std::runtime_error("brute-force oracle limited to 20 theory atoms");
    const std::uint32_t total = std::uint32_t{1} << letter_.size();
    for (std::uint32_t m = 0; m < total; ++m) {
      bool ok = true;
      for (const auto& cl : spec.clauses) {
        VarSet vs;
        for (const auto& [positive, a] : cl.literals)
          for (const auto& t : a.args)
            if (t.is_variable()) vs.insert(t.name());
        std::vector<std::string> vars(vs.begin(), vs.end());
        for_each_tuple(vars.size(), [&](const std::vector<std::string>& tuple) {
          if (!ok) return;
          Env env;
          for (std::size_t i = 0; i < vars.size(); ++i) env[vars[i]] = tuple[i];
          bool sat = false;
          for (const auto& [positive, a] : cl.literals) sat = sat || (truth(m, atom_text(a.predicate, a.args, env)) == positive);
          ok = sat;
        });
        if (!ok) break;
      }
      if (ok) models_.push_back(m);
    }

    for (const auto& r : p.rules) {
      VarSet vs = variables(r);
      std::vector<std::string> vars(vs.begin(), vs.end());
      for_each_tuple(vars.size(), [&](const std::vector<std::string>& tuple) {
        Env env;
        for (std::size_t i = 0; i < vars.size(); ++i) env[vars[i]] = tuple[i];
        Instance inst;
        inst.head = intern(atom_text(r.head.predicate, r.head.args, env));
        for (const auto& l : r.body) (l.positive ? inst.pos : inst.neg).push_back(intern(atom_text(l.atom.predicate, l.atom.args, env)));
        inst.constraint = r.constraint;
        inst.env = env;
        instances_.push_back(std::move(inst));
      });
    }
    for (auto m : models_) {
      std::vector<GroundRule> reduct;
      for (const auto& inst : instances_)
        if (eval(inst.constraint, m, inst.env)) reduct.push_back({inst.head, inst.pos, inst.neg});
      wf_.push_back(alternating_fixpoint(static_cast<int>(atoms_.size()), reduct));
    }
  }

  std::size_t model_count() const { return models_.size(); }
  const std::vector<std::string>& domain() const { return domain_; }

  /// Value (0, 1, 2) of a ground literal conjunction with a closed
  /// constraint in model i.
  int value(std::size_t i, const std::vector<RuleLiteral>& lits, const Constraint& c = Constraint::truth()) const {
    if (!eval(c, models_[i], {})) return 0;
    int v = 2;
    for (const auto& l : lits) {
      auto it = atoms_.find(atom_text(l.atom.predicate, l.atom.args, {}));
      int x = it == atoms_.end() ? 0 : wf_[i][static_cast<std::size_t>(it->second)];
      v = std::min(v, l.positive ? x : 2 - x);
    }
    return v;
  }

  TruthValue4 classify(const std::vector<RuleLiteral>& lits, const Constraint& c = Constraint::truth()) const {
    std::set<int> seen;
    for (std::size_t i = 0; i < models_.size(); ++i) seen.insert(value(i, lits, c));
    if (seen.size() > 1) return TruthValue4::ModelDependent;
    if (seen.empty() || *seen.begin() == 2) return TruthValue4::True;
    return *seen.begin() == 0 ? TruthValue4::False : TruthValue4::Undefined;
  }

  /// Whether the closed constraint holds in model i.
  bool holds(std::size_t i, const Constraint& c) const { return eval(c, models_[i], {}); }

 private:
  struct Instance {
    int head = 0;
    std::vector<int> pos, neg;
    Constraint constraint = Constraint::truth();
    Env env;
  };

  void for_each_tuple(std::size_t n, const std::function<void(const std::vector<std::string>&)>& f) const {
    std::vector<std::size_t> idx(n, 0);
    if (n > 0 && domain_.empty()) return;
    for (;;) {
      std::vector<std::string> tuple;
      for (auto i : idx) tuple.push_back(domain_[i]);
      f(tuple);
      std::size_t i = 0;
      while (i < n && ++idx[i] == domain_.size()) idx[i++] = 0;
      if (i == n) return;
    }
  }

  bool truth(std::uint32_t m, const std::string& key) const {
    auto it = letter_.find(key);
    return it != letter_.end() && ((m >> it->second) & 1u);
  }

  int intern(const std::string& key) { return atoms_.emplace(key, static_cast<int>(atoms_.size())).first->second; }

  bool eval(const Constraint& c, std::uint32_t m, const Env& env) const {
    switch (c.kind()) {
      case Constraint::Kind::True:
        return true;
      case Constraint::Kind::False:
        return false;
      case Constraint::Kind::Atom:
        return truth(m, atom_text(c.predicate(), c.args(), env));
      case Constraint::Kind::Eq:
        return ground_text(c.lhs(), env) == ground_text(c.rhs(), env);
      case Constraint::Kind::Not:
        return !eval(c.operand(), m, env);
      case Constraint::Kind::And:
        return std::all_of(c.operands().begin(), c.operands().end(), [&](const Constraint& o) { return eval(o, m, env); });
      case Constraint::Kind::Or:
        return std::any_of(c.operands().begin(), c.operands().end(), [&](const Constraint& o) { return eval(o, m, env); });
      case Constraint::Kind::Exists: {
        bool found = false;
        const auto& vars = c.bound();
        for_each_tuple(vars.size(), [&](const std::vector<std::string>& tuple) {
          if (found) return;
          Env inner = env;
          for (std::size_t i = 0; i < vars.size(); ++i) inner[vars[i]] = tuple[i];
          found = eval(c.operand(), m, inner);
        });
        return found;
      }
    }
    return false;
  }

  std::vector<std::string> domain_;
  std::map<std::string, int> letter_;
  std::vector<std::uint32_t> models_;
  std::map<std::string, int> atoms_;
  std::vector<Instance> instances_;
  std::vector<std::vector<int>> wf_;
};

/// Satisfiability of equations and disequations over the ground terms of
/// `functions` by search: sides that are ground are compared, a variable
/// facing a ground term takes its value, two applications are split by
/// symbol, and the remaining variables are guessed over the terms up to a
/// depth that offers more values than there are disequations.
class BruteForceCet {
 public:
  explicit BruteForceCet(std::map<std::string, std::size_t> functions) : functions_(std::move(functions)) {}

  bool satisfiable(const std::vector<std::pair<Term, Term>>& eqs, const std::vector<std::pair<Term, Term>>& diseqs) {
    std::map<std::string, std::size_t> fs = functions_;
    VarSet vars;
    auto collect = [&](const Term& t, auto&& self) -> void {
      if (t.is_variable()) {
        vars.insert(t.name());
        return;
      }
      fs.emplace(t.name(), t.args().size());
      for (const auto& a : t.args()) self(a, self);
    };
    for (const auto& [a, b] : eqs) collect(a, collect), collect(b, collect);
    for (const auto& [a, b] : diseqs) collect(a, collect), collect(b, collect);
    bool has_constant = std::any_of(fs.begin(), fs.end(), [](const auto& f) { return f.second == 0; });
    if (!has_constant) return vars.empty() && eqs.empty() && diseqs.empty();
    bool finite = std::all_of(fs.begin(), fs.end(), [](const auto& f) { return f.second == 0; });
    candidates_.clear();
    std::vector<Term> layer;
    for (const auto& [f, n] : fs)
      if (n == 0) layer.push_back(Term::constant(f));
    candidates_ = layer;
    while (!finite && candidates_.size() < diseqs.size() + 1) {
      std::vector<Term> next = candidates_;
      for (const auto& [f, n] : fs) {
        if (n == 0) continue;
        std::vector<std::size_t> idx(n, 0);
        for (;;) {
          std::vector<Term> args;
          for (auto i : idx) args.push_back(candidates_[i]);
          Term t = Term::function(f, args);
          if (std::find(next.begin(), next.end(), t) == next.end()) next.push_back(t);
          std::size_t i = 0;
          while (i < n && ++idx[i] == candidates_.size()) idx[i++] = 0;
          if (i == n) break;
        }
      }
      candidates_ = next;
    }
    diseqs_ = diseqs;
    all_vars_.assign(vars.begin(), vars.end());
    return search(eqs, {});
  }

 private:
  static Term apply(const Term& t, const std::map<std::string, Term>& a) {
    if (t.is_variable()) {
      auto it = a.find(t.name());
      return it == a.end() ? t : it->second;
    }
    std::vector<Term> args;
    for (const auto& x : t.args()) args.push_back(apply(x, a));
    return Term::function(t.name(), args);
  }

  bool search(std::vector<std::pair<Term, Term>> eqs, std::map<std::string, Term> a) {
    // Propagate until nothing changes.
    for (bool progress = true; progress;) {
      progress = false;
      std::vector<std::pair<Term, Term>> rest;
      for (auto [l, r] : eqs) {
        l = apply(l, a);
        r = apply(r, a);
        if (l.is_ground() && r.is_ground()) {
          if (!(l == r)) return false;
          progress = true;
        } else if (l.is_variable() && r.is_ground()) {
          a[l.name()] = r;
          progress = true;
        } else if (r.is_variable() && l.is_ground()) {
          a[r.name()] = l;
          progress = true;
        } else if (!l.is_variable() && !r.is_variable()) {
          if (l.name() != r.name() || l.args().size() != r.args().size()) return false;
          for (std::size_t i = 0; i < l.args().size(); ++i) rest.emplace_back(l.args()[i], r.args()[i]);
          progress = true;
        } else {
          rest.emplace_back(l, r);
        }
      }
      eqs = std::move(rest);
    }
    std::string pick;
    if (!eqs.empty()) {
      // Prefer variables that no equation defines as a bare side.
      VarSet defined, open;
      for (const auto& [l, r] : eqs) {
        if (l.is_variable()) defined.insert(l.name());
        if (r.is_variable()) defined.insert(r.name());
        for (const auto& v : variables(l)) open.insert(v);
        for (const auto& v : variables(r)) open.insert(v);
      }
      for (const auto& v : open)
        if (!defined.count(v)) {
          pick = v;
          break;
        }
      if (pick.empty()) pick = *open.begin();
    } else {
      for (const auto& v : all_vars_)
        if (!a.count(v)) {
          pick = v;
          break;
        }
      if (pick.empty()) {
        for (const auto& [l, r] : diseqs_)
          if (apply(l, a) == apply(r, a)) return false;
        return true;
      }
    }
    for (const auto& t : candidates_) {
      auto b = a;
      b[pick] = t;
      if (search(eqs, b)) return true;
    }
    return false;
  }

  std::map<std::string, std::size_t> functions_;
  std::vector<Term> candidates_;
  std::vector<std::pair<Term, Term>> diseqs_;
  std::vector<std::string> all_vars_;
};

}  // namespace hyrule::testing
