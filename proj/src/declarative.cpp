#include "hyrule/declarative.hpp"

#include <algorithm>
#include <set>

#include "hyrule/cet.hpp"
#include "hyrule/errors.hpp"
#include "hyrule/printer.hpp"

namespace hyrule {

int GroundNormalProgram::intern(const Atom& a) {
  auto [it, inserted] = index.emplace(a, static_cast<int>(atoms.size()));
  if (inserted) atoms.push_back(a);
  return it->second;
}

int GroundNormalProgram::id(const Atom& a) const {
  auto it = index.find(a);
  return it == index.end() ? -1 : it->second;
}

const char* to_string(Truth t) {
  switch (t) {
    case Truth::True:
      return "true";
    case Truth::False:
      return "false";
    case Truth::Undefined:
      return "undefined";
  }
  return "?";
}

const char* to_string(TruthValue4 v) {
  switch (v) {
    case TruthValue4::True:
      return "true";
    case TruthValue4::False:
      return "false";
    case TruthValue4::Undefined:
      return "undefined";
    case TruthValue4::ModelDependent:
      return "model-dependent";
  }
  return "?";
}

ThreeValuedInterpretation ThreeValuedInterpretation::empty(std::size_t n) {
  return {std::vector<bool>(n, false), std::vector<bool>(n, false)};
}

Truth ThreeValuedInterpretation::value(int atom) const {
  if (atom < 0) return Truth::False;
  auto i = static_cast<std::size_t>(atom);
  if (i < true_atoms.size() && true_atoms[i]) return Truth::True;
  if (i < false_atoms.size() && false_atoms[i]) return Truth::False;
  return Truth::Undefined;
}

bool ThreeValuedInterpretation::consistent() const {
  for (std::size_t i = 0; i < true_atoms.size() && i < false_atoms.size(); ++i)
    if (true_atoms[i] && false_atoms[i]) return false;
  return true;
}

bool ThreeValuedInterpretation::subset_of(const ThreeValuedInterpretation& o) const {
  for (std::size_t i = 0; i < true_atoms.size(); ++i)
    if (true_atoms[i] && !(i < o.true_atoms.size() && o.true_atoms[i])) return false;
  for (std::size_t i = 0; i < false_atoms.size(); ++i)
    if (false_atoms[i] && !(i < o.false_atoms.size() && o.false_atoms[i])) return false;
  return true;
}

std::vector<bool> least_herbrand_model(const DefiniteProgram& q) {
  const std::size_t lits = 2 * q.atoms;
  std::vector<bool> model(lits, false);
  std::vector<std::size_t> missing(q.clauses.size());
  std::vector<std::vector<std::size_t>> watchers(lits);
  std::vector<int> queue;
  for (std::size_t c = 0; c < q.clauses.size(); ++c) {
    const auto& cl = q.clauses[c];
    std::set<int> body(cl.body.begin(), cl.body.end());
    missing[c] = body.size();
    for (int l : body) watchers[static_cast<std::size_t>(l)].push_back(c);
    if (body.empty() && !model[static_cast<std::size_t>(cl.head)]) {
      model[static_cast<std::size_t>(cl.head)] = true;
      queue.push_back(cl.head);
    }
  }
  while (!queue.empty()) {
    int l = queue.back();
    queue.pop_back();
    for (std::size_t c : watchers[static_cast<std::size_t>(l)]) {
      if (--missing[c] == 0) {
        int h = q.clauses[c].head;
        if (!model[static_cast<std::size_t>(h)]) {
          model[static_cast<std::size_t>(h)] = true;
          queue.push_back(h);
        }
      }
    }
  }
  return model;
}

namespace {

DefiniteProgram definite_part(const GroundNormalProgram& q) {
  DefiniteProgram d;
  d.atoms = q.size();
  const int n = static_cast<int>(q.size());
  for (const auto& r : q.rules) {
    DefiniteProgram::Clause c{r.head, r.positive};
    for (int a : r.negative) c.body.push_back(n + a);
    d.clauses.push_back(std::move(c));
  }
  return d;
}

}  // namespace

DefiniteProgram p_slash_t(const GroundNormalProgram& q, const ThreeValuedInterpretation& i) {
  DefiniteProgram d = definite_part(q);
  const int n = static_cast<int>(q.size());
  for (int a = 0; a < n; ++a)
    if (i.value(a) == Truth::False) d.clauses.push_back({n + a, {}});
  return d;
}

DefiniteProgram p_slash_tu(const GroundNormalProgram& q, const ThreeValuedInterpretation& i) {
  DefiniteProgram d = definite_part(q);
  const int n = static_cast<int>(q.size());
  for (int a = 0; a < n; ++a)
    if (i.value(a) != Truth::True) d.clauses.push_back({n + a, {}});
  return d;
}

ThreeValuedInterpretation psi(const GroundNormalProgram& q, const ThreeValuedInterpretation& i) {
  const std::size_t n = q.size();
  auto mt = least_herbrand_model(p_slash_t(q, i));
  auto mtu = least_herbrand_model(p_slash_tu(q, i));
  ThreeValuedInterpretation out = ThreeValuedInterpretation::empty(n);
  for (std::size_t a = 0; a < n; ++a) {
    out.true_atoms[a] = mt[a];
    out.false_atoms[a] = !mtu[a];
  }
  return out;
}

ThreeValuedInterpretation well_founded_model(const GroundNormalProgram& q) {
  ThreeValuedInterpretation i = ThreeValuedInterpretation::empty(q.size());
  for (std::size_t round = 0; round <= q.size() + 1; ++round) {
    ThreeValuedInterpretation next = psi(q, i);
    if (next == i) return i;
    i = std::move(next);
  }
  return i;
}

namespace {

std::vector<Term> bounded_universe(const std::map<std::string, std::size_t>& functions, std::size_t depth) {
  std::vector<Term> terms;
  for (const auto& [f, n] : functions)
    if (n == 0) terms.push_back(Term::constant(f));
  for (std::size_t d = 1; d <= depth; ++d) {
    std::vector<Term> next = terms;
    for (const auto& [f, n] : functions) {
      if (n == 0) continue;
      std::vector<std::size_t> idx(n, 0);
      if (terms.empty()) break;
      for (;;) {
        std::vector<Term> args;
        for (auto i : idx) args.push_back(terms[i]);
        Term t = Term::function(f, std::move(args));
        if (t.depth() == d) next.push_back(std::move(t));
        std::size_t i = 0;
        while (i < idx.size() && ++idx[i] == terms.size()) idx[i++] = 0;
        if (i == idx.size()) break;
      }
    }
    terms = std::move(next);
  }
  std::sort(terms.begin(), terms.end());
  return terms;
}

}  // namespace

HybridGrounding ground_program(const HybridProgram& p, const std::vector<Term>& domain,
                               std::optional<std::size_t> depth_bound) {
  HybridGrounding g;
  if (p.signature.is_datalog()) {
    g.universe = domain;
  } else {
    if (!depth_bound) throw Refusal("grounding a program with function symbols needs a term depth bound");
    auto functions = p.signature.functions;
    for (const auto& t : domain) functions.emplace(t.name(), 0);
    g.universe = bounded_universe(functions, *depth_bound);
  }
  for (const auto& r : p.rules) {
    for_each_ground_instance(r, g.universe, [&](HybridRule inst) {
      Constraint c = simplify(inst.constraint);
      if (c.is_false()) return;
      g.rules.push_back({std::move(inst.head), std::move(c), std::move(inst.body)});
    });
  }
  const std::size_t n = g.universe.size();
  for (const auto& [pred, arity] : p.signature.rule_predicates) {
    if (arity > 0 && n == 0) continue;
    std::vector<std::size_t> idx(arity, 0);
    for (;;) {
      Atom a{pred, {}};
      for (auto i : idx) a.args.push_back(g.universe[i]);
      g.herbrand_base.push_back(std::move(a));
      std::size_t i = 0;
      while (i < idx.size() && ++idx[i] == n) idx[i++] = 0;
      if (i == idx.size()) break;
    }
  }
  std::sort(g.herbrand_base.begin(), g.herbrand_base.end());
  return g;
}

namespace {

GroundNormalProgram base_program(const HybridGrounding& g) {
  GroundNormalProgram q;
  for (const auto& a : g.herbrand_base) q.intern(a);
  return q;
}

void add_rule(GroundNormalProgram& q, const GroundHybridRule& r) {
  GroundNormalProgram::Rule nr;
  nr.head = q.intern(r.head);
  for (const auto& l : r.body) (l.positive ? nr.positive : nr.negative).push_back(q.intern(l.atom));
  q.rules.push_back(std::move(nr));
}

}  // namespace

GroundNormalProgram reduce(const HybridGrounding& g, const FiniteGroundTheory& theory, const TheoryModel& m0) {
  GroundNormalProgram q = base_program(g);
  for (const auto& r : g.rules) {
    if (!free_variables(r.constraint).empty())
      throw ContractError("ground rule with a non-closed constraint: " + to_string(r.constraint));
    if (theory.holds(r.constraint, m0)) add_rule(q, r);
  }
  return q;
}

DeclarativeOracle::DeclarativeOracle(const HybridProgram& p, const FiniteGroundTheory& theory,
                                     std::vector<Atom> extra_atoms)
    : theory_(theory) {
  if (!p.signature.is_datalog() || !theory.datalog())
    throw Refusal("the declarative semantics is only evaluated for Datalog programs");
  grounding_ = ground_program(p, theory.domain());
  std::set<Atom> atoms(extra_atoms.begin(), extra_atoms.end());
  for (const auto& r : grounding_.rules) {
    auto rel = theory.relevant_atoms(r.constraint);
    atoms.insert(rel.begin(), rel.end());
  }
  table_ = theory.project(std::vector<Atom>(atoms.begin(), atoms.end()));
  for (const auto& r : grounding_.rules) rule_models_.push_back(theory.models_of(r.constraint, *table_));
  for (std::size_t m = 0; m < table_->size(); ++m) {
    GroundNormalProgram q = base_program(grounding_);
    for (std::size_t r = 0; r < grounding_.rules.size(); ++r)
      if (rule_models_[r].test(m)) add_rule(q, grounding_.rules[r]);
    wf_.push_back(well_founded_model(q));
    reducts_.push_back(std::move(q));
  }
}

TheoryModel DeclarativeOracle::model(std::size_t i) const {
  TheoryModel m;
  const auto mask = table_->models().at(i);
  for (std::size_t k = 0; k < table_->atoms().size(); ++k) m.assignment.emplace(table_->atoms()[k], (mask >> k) & 1u);
  return m;
}

Truth DeclarativeOracle::value(std::size_t model, const std::vector<RuleLiteral>& literals,
                               const Constraint& constraint) const {
  Truth out = Truth::True;
  if (!constraint.is_true()) {
    if (!theory_.models_of(constraint, *table_).test(model)) return Truth::False;
  }
  for (const auto& l : literals) {
    if (!l.atom.is_ground()) throw ContractError("classification needs ground literals: " + to_string(l));
    Truth t = wf_[model].value(reducts_[model].id(l.atom));
    if (!l.positive) t = t == Truth::True ? Truth::False : t == Truth::False ? Truth::True : Truth::Undefined;
    out = std::min(out, t);
  }
  return out;
}

Classification DeclarativeOracle::classify(const std::vector<RuleLiteral>& literals, const Constraint& constraint) const {
  for (const auto& l : literals)
    if (!l.atom.is_ground()) throw ContractError("classification needs ground literals: " + to_string(l));
  if (!free_variables(constraint).empty())
    throw ContractError("classification needs a closed constraint: " + to_string(constraint));
  ModelSet cm = constraint.is_true() ? ModelSet::full(table_->size()) : theory_.models_of(constraint, *table_);
  std::vector<Truth> values;
  for (std::size_t m = 0; m < table_->size(); ++m) {
    if (!cm.test(m)) {
      values.push_back(Truth::False);
      continue;
    }
    values.push_back(value(m, literals));
  }
  Classification out;
  auto all = [&](Truth t) { return std::all_of(values.begin(), values.end(), [&](Truth v) { return v == t; }); };
  if (all(Truth::True)) {
    out.value = TruthValue4::True;
  } else if (all(Truth::False)) {
    out.value = TruthValue4::False;
  } else if (all(Truth::Undefined)) {
    out.value = TruthValue4::Undefined;
  } else {
    out.value = TruthValue4::ModelDependent;
    for (std::size_t j = 1; j < values.size(); ++j)
      if (values[j] != values[0]) {
        out.witness = std::make_pair(model(0), model(j));
        out.witness_values = std::make_pair(values[0], values[j]);
        break;
      }
  }
  return out;
}

Classification classify(const HybridProgram& p, const FiniteGroundTheory& theory,
                        const std::vector<RuleLiteral>& literals) {
  return DeclarativeOracle(p, theory).classify(literals);
}

bool fol_compatibility_check(const HybridProgram& p, const FiniteGroundTheory& theory, const Atom& a) {
  for (const auto& r : p.rules)
    for (const auto& l : r.body)
      if (!l.positive) throw ContractError("the compatibility check needs a negation-free program");
  DeclarativeOracle oracle(p, theory);
  if (oracle.classify({RuleLiteral{true, a}}).value != TruthValue4::True) return true;
  const auto& g = oracle.grounding();
  auto derives = [&](const TheoryModel& m0) {
    std::set<Atom> known;
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& r : g.rules) {
        if (known.count(r.head) || !theory.holds(r.constraint, m0)) continue;
        if (std::all_of(r.body.begin(), r.body.end(), [&](const RuleLiteral& l) { return known.count(l.atom) != 0; })) {
          known.insert(r.head);
          changed = true;
        }
      }
    }
    return known.count(a) != 0;
  };
  bool ok = true;
  try {
    theory.enumerate_models([&](const TheoryModel& m0) { ok = ok && derives(m0); });
  } catch (const ResourceError&) {
    ok = true;
    for (std::size_t i = 0; i < oracle.model_count() && ok; ++i) ok = derives(oracle.model(i));
  }
  return ok;
}

}  // namespace hyrule
