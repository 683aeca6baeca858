#include "hyrule/theory.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "hyrule/cet.hpp"
#include "hyrule/errors.hpp"
#include "hyrule/printer.hpp"

namespace hyrule {

const char* to_string(Sat s) {
  switch (s) {
    case Sat::Sat:
      return "sat";
    case Sat::Unsat:
      return "unsat";
    case Sat::Unknown:
      return "unknown";
  }
  return "?";
}

bool TheoryInterface::entails(const Constraint& c) const {
  if (!free_variables(c).empty()) throw ContractError("entails() needs a closed constraint: " + to_string(c));
  return satisfiable(make_not(c)) == Sat::Unsat;
}

bool TheoryInterface::valid(const Constraint& c) const { return satisfiable(make_not(c)) == Sat::Unsat; }

bool TheoryModel::value(const Atom& a) const {
  auto it = assignment.find(a);
  return it != assignment.end() && it->second;
}

ModelTable::ModelTable(std::vector<Atom> atoms, std::vector<std::uint64_t> models)
    : atoms_(std::move(atoms)), models_(std::move(models)) {
  for (std::size_t i = 0; i < atoms_.size(); ++i) index_.emplace(atoms_[i], static_cast<int>(i));
}

int ModelTable::index_of(const Atom& a) const {
  auto it = index_.find(a);
  return it == index_.end() ? -1 : it->second;
}

ModelSet::ModelSet(std::size_t n, bool full) : n_(n), words_((n + 63) / 64, full ? ~std::uint64_t{0} : 0) {
  trim();
}

void ModelSet::trim() {
  if (n_ % 64 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
}

bool ModelSet::empty() const {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

bool ModelSet::is_full() const { return count() == n_; }

std::size_t ModelSet::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

ModelSet ModelSet::operator&(const ModelSet& o) const {
  ModelSet r = *this;
  r &= o;
  return r;
}

ModelSet ModelSet::operator|(const ModelSet& o) const {
  ModelSet r = *this;
  r |= o;
  return r;
}

ModelSet ModelSet::operator~() const {
  ModelSet r = *this;
  for (auto& w : r.words_) w = ~w;
  r.trim();
  return r;
}

ModelSet& ModelSet::operator&=(const ModelSet& o) {
  if (o.n_ != n_) throw ContractError("model sets over different tables");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
  return *this;
}

ModelSet& ModelSet::operator|=(const ModelSet& o) {
  if (o.n_ != n_) throw ContractError("model sets over different tables");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
  return *this;
}

bool ModelSet::subset_of(const ModelSet& o) const { return (*this & ~o).empty(); }

namespace {

using K = Constraint::Kind;

// Constraint compiled against a ModelTable: variables become slots and
// atoms become bit positions (or per-instance position tables).
struct Compiled {
  K kind = K::True;
  int bit = -1;                     // ground atom
  std::vector<int> slots;           // atom argument slots (non-ground atom)
  std::vector<int> stride;          // mixed radix per slot
  std::vector<int> table;           // instance -> bit
  int lhs = 0, rhs = 0;             // Eq operands: >=0 constant id, <0 slot -(s+1)
  std::vector<Compiled> children;
  std::vector<int> bound;           // Exists slots
};

class Compiler {
 public:
  Compiler(const std::vector<Term>& domain, const ModelTable& table) : domain_(domain), table_(table) {
    for (std::size_t i = 0; i < domain.size(); ++i) ids_.emplace(domain[i].name(), static_cast<int>(i));
  }

  Compiled compile(const Constraint& c) {
    Compiled out;
    out.kind = c.kind();
    switch (c.kind()) {
      case K::True:
      case K::False:
        break;
      case K::Atom: {
        std::vector<int> slot_of_arg;
        std::vector<std::size_t> var_positions;
        for (std::size_t i = 0; i < c.args().size(); ++i) {
          const Term& t = c.args()[i];
          if (t.is_variable()) {
            out.slots.push_back(slot(t.name()));
            var_positions.push_back(i);
          }
        }
        const int n = static_cast<int>(domain_.size());
        std::vector<Term> args = c.args();
        if (out.slots.empty()) {
          out.bit = lookup(Atom{c.predicate(), args});
          break;
        }
        int size = 1;
        for (std::size_t k = 0; k < out.slots.size(); ++k) {
          out.stride.push_back(size);
          size *= n;
        }
        out.table.assign(static_cast<std::size_t>(size), -1);
        for (int code = 0; code < size; ++code) {
          int rest = code;
          for (std::size_t k = 0; k < var_positions.size(); ++k) {
            args[var_positions[k]] = domain_[static_cast<std::size_t>(rest % n)];
            rest /= n;
          }
          out.table[static_cast<std::size_t>(code)] = lookup(Atom{c.predicate(), args});
        }
        break;
      }
      case K::Eq:
        out.lhs = operand(c.lhs());
        out.rhs = operand(c.rhs());
        break;
      case K::Not:
      case K::And:
      case K::Or:
        for (const auto& o : c.operands()) out.children.push_back(compile(o));
        break;
      case K::Exists: {
        std::vector<std::pair<std::string, int>> saved;
        for (const auto& v : c.bound()) {
          auto it = scope_.find(v);
          saved.emplace_back(v, it == scope_.end() ? -1 : it->second);
          int s = next_slot_++;
          scope_[v] = s;
          out.bound.push_back(s);
        }
        out.children.push_back(compile(c.operand()));
        for (auto it = saved.rbegin(); it != saved.rend(); ++it) {
          if (it->second < 0)
            scope_.erase(it->first);
          else
            scope_[it->first] = it->second;
        }
        break;
      }
    }
    return out;
  }

  int slots() const { return next_slot_; }

 private:
  int slot(const std::string& v) {
    auto it = scope_.find(v);
    if (it == scope_.end()) throw ContractError("free variable " + v + " in a constraint evaluated in a model");
    return it->second;
  }

  int operand(const Term& t) {
    if (t.is_variable()) return -(slot(t.name()) + 1);
    if (!t.args().empty()) throw ContractError("function term " + to_string(t) + " in a Datalog constraint");
    auto it = ids_.find(t.name());
    if (it != ids_.end()) return it->second;
    // A constant outside the domain is still distinct from every other.
    auto [f, _] = foreign_.emplace(t.name(), static_cast<int>(domain_.size() + foreign_.size()));
    return f->second;
  }

  int lookup(const Atom& a) {
    int i = table_.index_of(a);
    if (i < 0) throw ContractError("atom " + to_string(a) + " is not in the model table");
    return i;
  }

  const std::vector<Term>& domain_;
  const ModelTable& table_;
  std::map<std::string, int> ids_;
  std::map<std::string, int> foreign_;
  std::map<std::string, int> scope_;
  int next_slot_ = 0;
};

bool eval(const Compiled& c, std::uint64_t model, std::vector<int>& env, int n) {
  switch (c.kind) {
    case K::True:
      return true;
    case K::False:
      return false;
    case K::Atom: {
      int bit = c.bit;
      if (bit < 0) {
        int code = 0;
        for (std::size_t k = 0; k < c.slots.size(); ++k) code += env[static_cast<std::size_t>(c.slots[k])] * c.stride[k];
        bit = c.table[static_cast<std::size_t>(code)];
      }
      return (model >> bit) & 1u;
    }
    case K::Eq: {
      int l = c.lhs < 0 ? env[static_cast<std::size_t>(-c.lhs - 1)] : c.lhs;
      int r = c.rhs < 0 ? env[static_cast<std::size_t>(-c.rhs - 1)] : c.rhs;
      return l == r;
    }
    case K::Not:
      return !eval(c.children.front(), model, env, n);
    case K::And:
      for (const auto& x : c.children)
        if (!eval(x, model, env, n)) return false;
      return true;
    case K::Or:
      for (const auto& x : c.children)
        if (eval(x, model, env, n)) return true;
      return false;
    case K::Exists: {
      const std::size_t k = c.bound.size();
      if (n == 0) return false;
      std::vector<int> idx(k, 0);
      for (;;) {
        for (std::size_t i = 0; i < k; ++i) env[static_cast<std::size_t>(c.bound[i])] = idx[i];
        if (eval(c.children.front(), model, env, n)) return true;
        std::size_t i = 0;
        while (i < k && ++idx[i] == n) idx[i++] = 0;
        if (i == k) return false;
      }
    }
  }
  return false;
}

struct UnionFind {
  std::vector<int> parent;
  int add() {
    parent.push_back(static_cast<int>(parent.size()));
    return parent.back();
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void join(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

}  // namespace

struct FiniteGroundTheory::Impl {
  // Ground atoms occurring in ground clauses.
  std::map<Atom, int> atom_ids;
  std::vector<Atom> atoms;
  std::vector<std::vector<std::pair<int, bool>>> clauses;
  bool has_empty_clause = false;
  std::vector<int> component;                 // atom id -> component id
  std::vector<std::vector<int>> comp_atoms;   // sorted atom ids
  std::vector<std::vector<int>> comp_clauses;

  mutable std::mutex mutex;
  mutable std::map<int, std::shared_ptr<const std::vector<std::uint64_t>>> comp_models;
  mutable int consistent = -1;
  mutable std::map<std::vector<Atom>, std::shared_ptr<const ModelTable>> projections;
  mutable std::map<Constraint, Sat> sat_cache;

  int intern(const Atom& a) {
    auto [it, inserted] = atom_ids.emplace(a, static_cast<int>(atoms.size()));
    if (inserted) atoms.push_back(a);
    return it->second;
  }
};

FiniteGroundTheory::FiniteGroundTheory(TheorySpec spec, const Signature& signature)
    : FiniteGroundTheory(std::move(spec), signature, Options{}) {}

FiniteGroundTheory::FiniteGroundTheory(TheorySpec spec, const Signature& signature, Options options)
    : spec_(std::move(spec)), options_(options), impl_(std::make_unique<Impl>()) {
  predicates_ = signature.constraint_predicates;
  for (const auto& [p, n] : spec_.predicates) {
    auto [it, inserted] = predicates_.emplace(p, n);
    if (!inserted && it->second != n) throw ParseError("predicate '" + p + "' has conflicting arities", 0, 0);
  }
  for (const auto& cl : spec_.clauses)
    for (const auto& [_, a] : cl.literals) {
      auto [it, inserted] = predicates_.emplace(a.predicate, a.args.size());
      if (!inserted && it->second != a.args.size())
        throw ParseError("predicate '" + a.predicate + "' has conflicting arities", 0, 0);
    }
  for (const auto& [p, _] : predicates_)
    if (signature.rule_predicates.count(p))
      throw ParseError("predicate '" + p + "' is both a rule and a constraint predicate", 0, 0);
  functions_ = signature.functions;
  for (const auto& [f, n] : spec_.functions) functions_.emplace(f, n);
  for (const auto& cl : spec_.clauses)
    for (const auto& [_, a] : cl.literals)
      for (const auto& t : a.args)
        if (!t.is_variable()) functions_.emplace(t.name(), t.arity());
  for (const auto& [f, n] : functions_) {
    if (n == 0)
      domain_.push_back(Term::constant(f));
    else
      datalog_ = false;
  }

  // Ground the clauses over the domain.
  Impl& im = *impl_;
  for (const auto& cl : spec_.clauses) {
    VarSet vs;
    for (const auto& [_, a] : cl.literals)
      for (const auto& t : a.args) t.collect_variables(vs);
    const std::vector<std::string> vars(vs.begin(), vs.end());
    if (!vars.empty() && domain_.empty()) continue;
    std::vector<std::size_t> idx(vars.size(), 0);
    for (;;) {
      Substitution theta;
      for (std::size_t i = 0; i < vars.size(); ++i) theta.bind(vars[i], domain_[idx[i]]);
      std::vector<std::pair<int, bool>> ground;
      bool tautology = false;
      for (const auto& [pos, a] : cl.literals) {
        int id = im.intern(substitute(a, theta));
        if (std::find(ground.begin(), ground.end(), std::make_pair(id, !pos)) != ground.end()) tautology = true;
        if (std::find(ground.begin(), ground.end(), std::make_pair(id, pos)) == ground.end())
          ground.emplace_back(id, pos);
      }
      if (ground.empty()) im.has_empty_clause = true;
      if (!tautology && !ground.empty()) im.clauses.push_back(std::move(ground));
      std::size_t i = 0;
      while (i < idx.size() && ++idx[i] == domain_.size()) idx[i++] = 0;
      if (i == idx.size()) break;
    }
  }
  UnionFind uf;
  for (std::size_t i = 0; i < im.atoms.size(); ++i) uf.add();
  for (const auto& cl : im.clauses)
    for (std::size_t i = 1; i < cl.size(); ++i) uf.join(cl[0].first, cl[i].first);
  std::map<int, int> comp_of_root;
  im.component.resize(im.atoms.size());
  for (std::size_t a = 0; a < im.atoms.size(); ++a) {
    int root = uf.find(static_cast<int>(a));
    auto [it, inserted] = comp_of_root.emplace(root, static_cast<int>(im.comp_atoms.size()));
    if (inserted) {
      im.comp_atoms.emplace_back();
      im.comp_clauses.emplace_back();
    }
    im.component[a] = it->second;
    im.comp_atoms[static_cast<std::size_t>(it->second)].push_back(static_cast<int>(a));
  }
  for (std::size_t c = 0; c < im.clauses.size(); ++c)
    im.comp_clauses[static_cast<std::size_t>(im.component[static_cast<std::size_t>(im.clauses[c][0].first)])]
        .push_back(static_cast<int>(c));
}

FiniteGroundTheory::~FiniteGroundTheory() = default;

TheoryCapabilities FiniteGroundTheory::capabilities() const {
  if (datalog_) return {true, true, true};
  return {false, false, false};
}

std::vector<Atom> FiniteGroundTheory::ground_atoms() const {
  std::vector<Atom> out;
  const std::size_t n = domain_.size();
  for (const auto& [p, arity] : predicates_) {
    if (arity > 0 && n == 0) continue;
    std::vector<std::size_t> idx(arity, 0);
    for (;;) {
      Atom a{p, {}};
      for (auto i : idx) a.args.push_back(domain_[i]);
      out.push_back(std::move(a));
      std::size_t i = 0;
      while (i < idx.size() && ++idx[i] == n) idx[i++] = 0;
      if (i == idx.size()) break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::vector<std::uint64_t> enumerate_component(const std::vector<int>& atoms,
                                               const std::vector<std::vector<std::pair<int, bool>>>& clauses,
                                               const std::vector<int>& clause_ids) {
  std::map<int, int> local;
  for (std::size_t i = 0; i < atoms.size(); ++i) local.emplace(atoms[i], static_cast<int>(i));
  // A clause is checked when its last atom (in local order) is assigned.
  std::vector<std::vector<std::vector<std::pair<int, bool>>>> due(atoms.size());
  for (int c : clause_ids) {
    std::vector<std::pair<int, bool>> lits;
    int last = 0;
    for (const auto& [a, pos] : clauses[static_cast<std::size_t>(c)]) {
      int l = local.at(a);
      lits.emplace_back(l, pos);
      last = std::max(last, l);
    }
    due[static_cast<std::size_t>(last)].push_back(std::move(lits));
  }
  std::vector<std::uint64_t> out;
  const std::size_t n = atoms.size();
  std::function<void(std::size_t, std::uint64_t)> go = [&](std::size_t k, std::uint64_t mask) {
    if (k == n) {
      out.push_back(mask);
      return;
    }
    for (int v = 0; v < 2; ++v) {
      std::uint64_t m = v ? mask | (std::uint64_t{1} << k) : mask;
      bool ok = true;
      for (const auto& cl : due[k]) {
        bool sat = false;
        for (const auto& [l, pos] : cl)
          if ((((m >> l) & 1u) != 0) == pos) {
            sat = true;
            break;
          }
        if (!sat) {
          ok = false;
          break;
        }
      }
      if (ok) go(k + 1, m);
    }
  };
  go(0, 0);
  return out;
}

}  // namespace

bool FiniteGroundTheory::consistent() const {
  Impl& im = *impl_;
  {
    std::lock_guard<std::mutex> lock(im.mutex);
    if (im.consistent >= 0) return im.consistent == 1;
  }
  bool ok = !im.has_empty_clause;
  for (std::size_t c = 0; ok && c < im.comp_atoms.size(); ++c) {
    if (im.comp_clauses[c].empty()) continue;
    if (im.comp_atoms[c].size() > options_.max_atoms)
      throw ResourceError("theory component with " + std::to_string(im.comp_atoms[c].size()) +
                          " ground atoms exceeds the cap of " + std::to_string(options_.max_atoms));
    std::shared_ptr<const std::vector<std::uint64_t>> models;
    {
      std::lock_guard<std::mutex> lock(im.mutex);
      auto it = im.comp_models.find(static_cast<int>(c));
      if (it != im.comp_models.end()) models = it->second;
    }
    if (!models) {
      models = std::make_shared<const std::vector<std::uint64_t>>(
          enumerate_component(im.comp_atoms[c], im.clauses, im.comp_clauses[c]));
      std::lock_guard<std::mutex> lock(im.mutex);
      im.comp_models.emplace(static_cast<int>(c), models);
    }
    if (models->empty()) ok = false;
  }
  std::lock_guard<std::mutex> lock(im.mutex);
  im.consistent = ok ? 1 : 0;
  return ok;
}

std::shared_ptr<const ModelTable> FiniteGroundTheory::project(std::vector<Atom> atoms) const {
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  Impl& im = *impl_;
  {
    std::lock_guard<std::mutex> lock(im.mutex);
    auto it = im.projections.find(atoms);
    if (it != im.projections.end()) return it->second;
  }
  if (atoms.size() > 64)
    throw ResourceError("projection onto " + std::to_string(atoms.size()) + " atoms exceeds 64");
  for (const auto& a : atoms)
    for (const auto& t : a.args)
      if (!t.is_constant() || !std::binary_search(domain_.begin(), domain_.end(), t))
        throw ContractError("atom " + to_string(a) + " is not a ground atom over the theory domain");

  std::vector<std::uint64_t> result;
  if (consistent()) {
    // Group requested atoms by clause component; the rest are free.
    std::map<int, std::vector<std::pair<int, int>>> groups;  // comp -> (local index in comp, table bit)
    std::vector<int> free_bits;
    for (std::size_t b = 0; b < atoms.size(); ++b) {
      auto it = im.atom_ids.find(atoms[b]);
      if (it == im.atom_ids.end()) {
        free_bits.push_back(static_cast<int>(b));
        continue;
      }
      int comp = im.component[static_cast<std::size_t>(it->second)];
      const auto& ca = im.comp_atoms[static_cast<std::size_t>(comp)];
      int local = static_cast<int>(std::lower_bound(ca.begin(), ca.end(), it->second) - ca.begin());
      groups[comp].emplace_back(local, static_cast<int>(b));
    }
    std::vector<std::uint64_t> acc{0};
    auto combine = [&](const std::vector<std::uint64_t>& options) {
      std::vector<std::uint64_t> next;
      next.reserve(acc.size() * options.size());
      for (auto a : acc)
        for (auto o : options) {
          next.push_back(a | o);
          if (next.size() > options_.max_models)
            throw ResourceError("more than " + std::to_string(options_.max_models) + " projected models");
        }
      acc = std::move(next);
    };
    for (const auto& [comp, members] : groups) {
      const auto& ca = im.comp_atoms[static_cast<std::size_t>(comp)];
      if (ca.size() > options_.max_atoms)
        throw ResourceError("theory component with " + std::to_string(ca.size()) + " ground atoms exceeds the cap of " +
                            std::to_string(options_.max_atoms));
      std::shared_ptr<const std::vector<std::uint64_t>> models;
      {
        std::lock_guard<std::mutex> lock(im.mutex);
        auto it = im.comp_models.find(comp);
        if (it != im.comp_models.end()) models = it->second;
      }
      if (!models) {
        models = std::make_shared<const std::vector<std::uint64_t>>(
            enumerate_component(ca, im.clauses, im.comp_clauses[static_cast<std::size_t>(comp)]));
        std::lock_guard<std::mutex> lock(im.mutex);
        im.comp_models.emplace(comp, models);
      }
      std::set<std::uint64_t> options;
      for (auto m : *models) {
        std::uint64_t p = 0;
        for (const auto& [local, bit] : members)
          if ((m >> local) & 1u) p |= std::uint64_t{1} << bit;
        options.insert(p);
      }
      combine(std::vector<std::uint64_t>(options.begin(), options.end()));
    }
    for (int b : free_bits) combine({0, std::uint64_t{1} << b});
    std::sort(acc.begin(), acc.end());
    result = std::move(acc);
  }
  auto table = std::make_shared<const ModelTable>(atoms, std::move(result));
  std::lock_guard<std::mutex> lock(im.mutex);
  return im.projections.emplace(std::move(atoms), table).first->second;
}

void FiniteGroundTheory::enumerate_models(const std::function<void(const TheoryModel&)>& visit) const {
  std::vector<Atom> atoms = ground_atoms();
  if (atoms.size() > options_.max_atoms)
    throw ResourceError("signature has " + std::to_string(atoms.size()) + " ground constraint atoms, above the cap of " +
                        std::to_string(options_.max_atoms));
  auto table = project(atoms);
  for (auto mask : table->models()) {
    TheoryModel m;
    for (std::size_t i = 0; i < table->atoms().size(); ++i) m.assignment.emplace(table->atoms()[i], (mask >> i) & 1u);
    visit(m);
  }
}

std::size_t FiniteGroundTheory::count_models() const {
  std::size_t n = 0;
  enumerate_models([&](const TheoryModel&) { ++n; });
  return n;
}

std::set<Atom> FiniteGroundTheory::relevant_atoms(const Constraint& c) const {
  std::set<Atom> out;
  std::function<void(const Constraint&)> walk = [&](const Constraint& x) {
    if (x.kind() == K::Atom) {
      std::vector<std::size_t> var_pos;
      for (std::size_t i = 0; i < x.args().size(); ++i)
        if (x.args()[i].is_variable()) var_pos.push_back(i);
      std::vector<Term> args = x.args();
      if (var_pos.empty()) {
        out.insert(Atom{x.predicate(), args});
        return;
      }
      if (domain_.empty()) return;
      std::vector<std::size_t> idx(var_pos.size(), 0);
      for (;;) {
        for (std::size_t k = 0; k < var_pos.size(); ++k) args[var_pos[k]] = domain_[idx[k]];
        out.insert(Atom{x.predicate(), args});
        std::size_t i = 0;
        while (i < idx.size() && ++idx[i] == domain_.size()) idx[i++] = 0;
        if (i == idx.size()) break;
      }
      return;
    }
    for (const auto& o : x.operands()) walk(o);
  };
  walk(c);
  return out;
}

ModelSet FiniteGroundTheory::models_of(const Constraint& c, const ModelTable& table) const {
  if (!free_variables(c).empty()) throw ContractError("models_of() needs a closed constraint: " + to_string(c));
  ModelSet out(table.size());
  if (c.is_true()) return ModelSet::full(table.size());
  if (c.is_false()) return out;
  Compiler compiler(domain_, table);
  Compiled code = compiler.compile(c);
  std::vector<int> env(static_cast<std::size_t>(compiler.slots()), 0);
  const int n = static_cast<int>(domain_.size());
  for (std::size_t i = 0; i < table.size(); ++i)
    if (eval(code, table.models()[i], env, n)) out.set(i);
  return out;
}

Sat FiniteGroundTheory::satisfiable(const Constraint& c) const {
  const Constraint closed = simplify(restrict_to(c, {}));
  if (closed.is_false()) return Sat::Unsat;
  if (!consistent()) return Sat::Unsat;
  if (closed.is_true()) return Sat::Sat;
  Impl& im = *impl_;
  {
    std::lock_guard<std::mutex> lock(im.mutex);
    auto it = im.sat_cache.find(closed);
    if (it != im.sat_cache.end()) return it->second;
  }
  Sat result = Sat::Unknown;
  if (datalog_) {
    auto atoms = relevant_atoms(closed);
    auto table = project(std::vector<Atom>(atoms.begin(), atoms.end()));
    result = models_of(closed, *table).empty() ? Sat::Unsat : Sat::Sat;
  } else {
    // Best effort: existential prefix, then DNF with CET solving.
    Constraint body = closed;
    while (body.kind() == K::Exists) body = body.operand();
    if (!contains_quantifier(body)) {
      try {
        Constraint nnf = expand_over(body, {});
        std::vector<std::vector<Constraint>> dnf;
        std::function<std::vector<std::vector<Constraint>>(const Constraint&)> to_dnf =
            [&](const Constraint& x) -> std::vector<std::vector<Constraint>> {
          if (x.is_true()) return {{}};
          if (x.is_false()) return {};
          if (x.kind() == K::Or) {
            std::vector<std::vector<Constraint>> out;
            for (const auto& o : x.operands()) {
              auto d = to_dnf(o);
              out.insert(out.end(), d.begin(), d.end());
            }
            return out;
          }
          if (x.kind() == K::And) {
            std::vector<std::vector<Constraint>> acc{{}};
            for (const auto& o : x.operands()) {
              auto d = to_dnf(o);
              std::vector<std::vector<Constraint>> next;
              for (const auto& a : acc)
                for (const auto& b : d) {
                  auto y = a;
                  y.insert(y.end(), b.begin(), b.end());
                  next.push_back(std::move(y));
                }
              acc = std::move(next);
              if (acc.size() > 4096) throw ResourceError("dnf too large");
            }
            return acc;
          }
          return {{x}};
        };
        bool unknown = false;
        result = Sat::Unsat;
        for (const auto& conj : to_dnf(nnf)) {
          std::vector<Equation> eqs, diseqs;
          std::vector<std::pair<bool, Constraint>> atoms;
          for (const auto& lit : conj) {
            if (lit.kind() == K::Eq)
              eqs.emplace_back(lit.lhs(), lit.rhs());
            else if (lit.kind() == K::Not && lit.operand().kind() == K::Eq)
              diseqs.emplace_back(lit.operand().lhs(), lit.operand().rhs());
            else if (lit.kind() == K::Not)
              atoms.emplace_back(false, lit.operand());
            else
              atoms.emplace_back(true, lit);
          }
          CetResult r = cet_solve(eqs, diseqs, functions_);
          if (!r.sat) continue;
          std::vector<Atom> ground;
          std::vector<std::pair<bool, Atom>> lits;
          bool checkable = true;
          for (const auto& [pos, a] : atoms) {
            Atom g{a.predicate(), {}};
            for (const auto& t : a.args()) g.args.push_back(r.mgu.apply(t));
            for (const auto& t : g.args)
              if (!t.is_constant() || !std::binary_search(domain_.begin(), domain_.end(), t)) checkable = false;
            ground.push_back(g);
            lits.emplace_back(pos, g);
          }
          if (!checkable) {
            unknown = true;
            continue;
          }
          auto table = project(ground);
          bool found = false;
          for (auto m : table->models()) {
            bool ok = std::all_of(lits.begin(), lits.end(), [&](const auto& l) {
              return (((m >> table->index_of(l.second)) & 1u) != 0) == l.first;
            });
            if (ok) {
              found = true;
              break;
            }
          }
          if (found) {
            result = Sat::Sat;
            break;
          }
        }
        if (result != Sat::Sat && unknown) result = Sat::Unknown;
      } catch (const ResourceError&) {
        result = Sat::Unknown;
      }
    }
  }
  std::lock_guard<std::mutex> lock(im.mutex);
  im.sat_cache.emplace(closed, result);
  return result;
}

bool FiniteGroundTheory::holds(const Constraint& c, const TheoryModel& m) const {
  switch (c.kind()) {
    case K::True:
      return true;
    case K::False:
      return false;
    case K::Atom: {
      Atom a{c.predicate(), c.args()};
      if (!a.is_ground()) throw ContractError("holds() needs a closed constraint: " + to_string(c));
      return m.value(a);
    }
    case K::Eq:
      if (!c.lhs().is_ground() || !c.rhs().is_ground())
        throw ContractError("holds() needs a closed constraint: " + to_string(c));
      return c.lhs() == c.rhs();
    case K::Not:
      return !holds(c.operand(), m);
    case K::And:
      return std::all_of(c.operands().begin(), c.operands().end(),
                         [&](const Constraint& o) { return holds(o, m); });
    case K::Or:
      return std::any_of(c.operands().begin(), c.operands().end(),
                         [&](const Constraint& o) { return holds(o, m); });
    case K::Exists: {
      const auto& vars = c.bound();
      if (domain_.empty()) return false;
      std::vector<std::size_t> idx(vars.size(), 0);
      for (;;) {
        Substitution theta;
        for (std::size_t i = 0; i < vars.size(); ++i) theta.bind(vars[i], domain_[idx[i]]);
        if (holds(substitute(c.operand(), theta), m)) return true;
        std::size_t i = 0;
        while (i < idx.size() && ++idx[i] == domain_.size()) idx[i++] = 0;
        if (i == idx.size()) return false;
      }
    }
  }
  return false;
}

TheoryRegistry& TheoryRegistry::global() {
  static TheoryRegistry registry;
  return registry;
}

void TheoryRegistry::add(const std::string& name, TheorySpec spec) {
  std::lock_guard<std::mutex> lock(mutex_);
  theories_[name] = std::move(spec);
}

bool TheoryRegistry::contains(const std::string& name) const {
  std::lock_guard<std::mutex> lock(mutex_);
  return theories_.count(name) != 0;
}

TheorySpec TheoryRegistry::get(const std::string& name) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = theories_.find(name);
  if (it == theories_.end()) throw ContractError("no theory registered under '" + name + "'");
  return it->second;
}

std::vector<std::string> TheoryRegistry::names() const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [n, _] : theories_) out.push_back(n);
  return out;
}

}  // namespace hyrule
