#include "hyrule/decide.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "hyrule/errors.hpp"
#include "hyrule/printer.hpp"

namespace hyrule {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::True:
      return "true";
    case Verdict::False:
      return "false";
    case Verdict::Neither:
      return "neither";
  }
  return "?";
}

Constraint model_set_to_dnf(const ModelSet& set, const ModelTable& table) {
  std::vector<std::uint64_t> on, off;
  for (std::size_t i = 0; i < table.size(); ++i) (set.test(i) ? on : off).push_back(table.models()[i]);
  if (on.empty()) return Constraint::falsity();
  if (off.empty()) return Constraint::truth();
  const std::size_t n = table.atoms().size();
  const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  auto hits_off = [&](std::uint64_t care, std::uint64_t values) {
    return std::any_of(off.begin(), off.end(), [&](std::uint64_t m) { return ((m ^ values) & care) == 0; });
  };
  // Expand each on-model to a prime implicant by dropping literals that do
  // not let the cube reach an off-model.
  std::set<std::pair<std::uint64_t, std::uint64_t>> primes;
  for (std::uint64_t m : on) {
    std::uint64_t care = all;
    for (std::size_t j = 0; j < n; ++j) {
      std::uint64_t trial = care & ~(std::uint64_t{1} << j);
      if (!hits_off(trial, m)) care = trial;
    }
    primes.emplace(care, m & care);
  }
  std::vector<std::pair<std::uint64_t, std::uint64_t>> cubes(primes.begin(), primes.end());
  std::vector<bool> covered(on.size(), false);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> chosen;
  for (;;) {
    std::size_t best = cubes.size(), best_count = 0;
    for (std::size_t c = 0; c < cubes.size(); ++c) {
      std::size_t count = 0;
      for (std::size_t i = 0; i < on.size(); ++i)
        if (!covered[i] && ((on[i] ^ cubes[c].second) & cubes[c].first) == 0) ++count;
      if (count > best_count ||
          (count == best_count && count > 0 && std::popcount(cubes[c].first) < std::popcount(cubes[best].first))) {
        best = c;
        best_count = count;
      }
    }
    if (best == cubes.size()) break;
    for (std::size_t i = 0; i < on.size(); ++i)
      if (((on[i] ^ cubes[best].second) & cubes[best].first) == 0) covered[i] = true;
    chosen.push_back(cubes[best]);
  }
  std::vector<Constraint> disjuncts;
  for (const auto& [care, values] : chosen) {
    std::vector<Constraint> lits;
    for (std::size_t j = 0; j < n; ++j) {
      if (!((care >> j) & 1u)) continue;
      const Atom& a = table.atoms()[j];
      Constraint atom = Constraint::atom(a.predicate, a.args);
      lits.push_back((values >> j) & 1u ? atom : make_not(atom));
    }
    disjuncts.push_back(make_and(std::move(lits)));
  }
  return make_or(std::move(disjuncts));
}

GroundDecider::GroundDecider(const HybridProgram& p, const FiniteGroundTheory& theory, std::vector<Atom> extra_atoms)
    : GroundDecider(p, theory, std::move(extra_atoms), Options{}) {}

GroundDecider::GroundDecider(const HybridProgram& p, const FiniteGroundTheory& theory, std::vector<Atom> extra_atoms,
                             Options options)
    : theory_(theory), options_(options) {
  if (!p.signature.is_datalog() || !theory.datalog())
    throw Refusal("the decision procedure needs a Datalog program (function symbols of arity > 0 found)");
  if (auto bad = find_unsafe_rule(p))
    throw Refusal("unsafe rule " + std::to_string(bad->first + 1) + " (" + to_string(p.rules[bad->first]) + "): variable " + bad->second.witness +
                      " is not bound to a ground term or a positive-literal variable",
                  bad->second.witness);
  grounding_ = ground_program(p, theory.domain());
  std::set<Atom> letters(extra_atoms.begin(), extra_atoms.end());
  for (const auto& r : grounding_.rules) {
    auto rel = theory.relevant_atoms(r.constraint);
    letters.insert(rel.begin(), rel.end());
  }
  table_ = theory.project(std::vector<Atom>(letters.begin(), letters.end()));
  auto intern = [&](const Atom& a) {
    auto [it, inserted] = ids_.emplace(a, static_cast<int>(atoms_.size()));
    if (inserted) {
      atoms_.push_back(a);
      rules_by_head_.emplace_back();
    }
    return it->second;
  };
  for (const auto& a : grounding_.herbrand_base) intern(a);
  for (const auto& r : grounding_.rules) {
    int h = intern(r.head);
    for (const auto& l : r.body) intern(l.atom);
    ModelSet m = theory.models_of(r.constraint, *table_);
    if (m.empty()) continue;
    rules_by_head_[static_cast<std::size_t>(h)].emplace_back(std::move(m), r.body);
  }
}

int GroundDecider::atom_id(const Atom& a) const {
  auto it = ids_.find(a);
  return it == ids_.end() ? -1 : it->second;
}

MaximalTree GroundDecider::build(TreeKind kind, int atom, std::size_t rank) {
  const Rank* prev = rank > 0 ? &ranks_.at(rank - 1) : nullptr;
  const std::size_t universe = table_->size();
  MaximalTree tree;
  tree.kind = kind;
  tree.rank = rank;
  tree.root = atoms_[static_cast<std::size_t>(atom)];
  tree.answer = ModelSet(universe);
  std::map<std::pair<std::vector<RuleLiteral>, ModelSet>, std::size_t> seen;
  auto add = [&](std::optional<std::size_t> parent, std::vector<RuleLiteral> lits, ModelSet models) {
    std::vector<RuleLiteral> dedup;
    for (auto& l : lits)
      if (std::find(dedup.begin(), dedup.end(), l) == dedup.end()) dedup.push_back(std::move(l));
    auto key = std::make_pair(dedup, models);
    if (seen.count(key)) return;
    if (tree.nodes.size() >= options_.node_budget)
      throw ResourceError("maximal tree for " + to_string(tree.root) + " exceeds the node budget of " +
                          std::to_string(options_.node_budget));
    seen.emplace(std::move(key), tree.nodes.size());
    tree.nodes.push_back({std::move(dedup), std::move(models), std::nullopt, {}, false});
    if (parent) tree.nodes[*parent].children.push_back(tree.nodes.size() - 1);
  };
  add(std::nullopt, {RuleLiteral{true, tree.root}}, ModelSet::full(universe));
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto lits = tree.nodes[i].literals;
    const ModelSet models = tree.nodes[i].models;
    auto sel = select_literal(options_.selection, lits);
    tree.nodes[i].selected = sel;
    if (!sel) {
      tree.nodes[i].successful = true;
      tree.answer |= models;
      continue;
    }
    const RuleLiteral& lit = lits[*sel];
    const int b = atom_id(lit.atom);
    std::vector<RuleLiteral> rest = lits;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(*sel));
    if (lit.positive) {
      if (b < 0) continue;
      for (const auto& [rm, body] : rules_by_head_[static_cast<std::size_t>(b)]) {
        ModelSet v = models & rm;
        if (v.empty()) continue;
        std::vector<RuleLiteral> next(lits.begin(), lits.begin() + static_cast<std::ptrdiff_t>(*sel));
        next.insert(next.end(), body.begin(), body.end());
        next.insert(next.end(), lits.begin() + static_cast<std::ptrdiff_t>(*sel) + 1, lits.end());
        add(i, std::move(next), std::move(v));
      }
      continue;
    }
    ModelSet v = models;
    if (kind == TreeKind::T) {
      if (!prev) continue;
      if (b >= 0) v &= ~prev->tu[static_cast<std::size_t>(b)];
    } else if (prev && b >= 0) {
      v &= ~prev->t[static_cast<std::size_t>(b)];
    }
    if (v.empty()) continue;
    add(i, std::move(rest), std::move(v));
  }
  return tree;
}

std::vector<ModelSet> GroundDecider::answers(TreeKind kind, std::size_t rank) const {
  const Rank* prev = rank > 0 ? &ranks_.at(rank - 1) : nullptr;
  const std::size_t universe = table_->size();
  // Per model, an atom has a successful branch iff it is in the least model
  // of the rules enabled in that model plus the negative literals the
  // subsidiary answers grant. All models are iterated at once.
  auto negative = [&](int b) {
    if (b < 0) return ModelSet::full(universe);
    if (kind == TreeKind::T) return prev ? ~prev->tu[static_cast<std::size_t>(b)] : ModelSet(universe);
    return prev ? ~prev->t[static_cast<std::size_t>(b)] : ModelSet::full(universe);
  };
  std::vector<ModelSet> neg(atoms_.size());
  for (std::size_t a = 0; a < atoms_.size(); ++a) neg[a] = negative(static_cast<int>(a));
  std::vector<ModelSet> ans(atoms_.size(), ModelSet(universe));
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t a = 0; a < atoms_.size(); ++a) {
      ModelSet acc = ans[a];
      for (const auto& [rm, body] : rules_by_head_[a]) {
        ModelSet v = rm;
        for (const auto& l : body) {
          if (v.empty()) break;
          const int b = atom_id(l.atom);
          if (l.positive) v &= b < 0 ? ModelSet(universe) : ans[static_cast<std::size_t>(b)];
          else v &= b < 0 ? ModelSet::full(universe) : neg[static_cast<std::size_t>(b)];
        }
        acc |= v;
      }
      if (acc != ans[a]) {
        ans[a] = std::move(acc);
        changed = true;
      }
    }
  }
  return ans;
}

void GroundDecider::ensure_rank(std::size_t k) {
  while (ranks_.size() <= k) {
    const std::size_t r = ranks_.size();
    Rank next;
    next.t = answers(TreeKind::T, r);
    next.tu = answers(TreeKind::TU, r);
    ranks_.push_back(std::move(next));
  }
}

void GroundDecider::run() {
  if (stable_) return;
  // Finite answers only grow and pseudo-answers only shrink with the rank,
  // so the sequence stabilizes after at most 2 |H| |models| changes.
  const std::size_t limit = 2 * atoms_.size() * std::max<std::size_t>(table_->size(), 1) + 2;
  for (std::size_t k = 0; k <= limit; ++k) {
    ensure_rank(k);
    if (k > 0 && ranks_[k].t == ranks_[k - 1].t && ranks_[k].tu == ranks_[k - 1].tu) {
      stable_ = k;
      return;
    }
  }
  throw ResourceError("maximal tree answers did not stabilize");
}

std::size_t GroundDecider::final_rank() {
  run();
  return *stable_;
}

MaximalTree GroundDecider::maximal_tree(TreeKind kind, const Atom& a, std::size_t rank) {
  if (rank > 0) ensure_rank(rank - 1);
  int id = atom_id(a);
  if (id < 0) {
    MaximalTree t;
    t.kind = kind;
    t.rank = rank;
    t.root = a;
    t.nodes.push_back({{RuleLiteral{true, a}}, ModelSet::full(table_->size()), 0, {}, false});
    t.answer = ModelSet(table_->size());
    return t;
  }
  return build(kind, id, rank);
}

ModelSet GroundDecider::answer_models(TreeKind kind, const Atom& a, std::size_t rank) {
  ensure_rank(rank);
  int id = atom_id(a);
  if (id < 0) return ModelSet(table_->size());
  const auto& r = ranks_[rank];
  return kind == TreeKind::T ? r.t[static_cast<std::size_t>(id)] : r.tu[static_cast<std::size_t>(id)];
}

namespace {

Decision finish(ModelSet truth, ModelSet falsity, const ModelTable& table) {
  Decision d;
  d.verdict = truth.is_full() ? Verdict::True : falsity.is_full() ? Verdict::False : Verdict::Neither;
  d.true_if = model_set_to_dnf(truth, table);
  d.false_if = model_set_to_dnf(falsity, table);
  d.true_models = std::move(truth);
  d.false_models = std::move(falsity);
  return d;
}

}  // namespace

Decision GroundDecider::decide_atom(const Atom& a) { return decide_goal(Goal{Constraint::truth(), {RuleLiteral{true, a}}}); }

Decision GroundDecider::decide_goal(const Goal& g) {
  if (!free_variables(g.constraint).empty())
    throw ContractError("decide_goal() needs a closed constraint: " + to_string(g.constraint));
  run();
  const Rank& fin = ranks_[*stable_];
  const std::size_t universe = table_->size();
  ModelSet truth = theory_.models_of(g.constraint, *table_);
  ModelSet falsity = ~truth;
  for (const auto& l : g.literals) {
    if (!l.atom.is_ground()) throw ContractError("decide_goal() needs ground literals: " + to_string(l));
    int id = atom_id(l.atom);
    ModelSet t = id < 0 ? ModelSet(universe) : fin.t[static_cast<std::size_t>(id)];
    ModelSet u = id < 0 ? ModelSet(universe) : fin.tu[static_cast<std::size_t>(id)];
    if (l.positive) {
      truth &= t;
      falsity |= ~u;
    } else {
      truth &= ~u;
      falsity |= t;
    }
  }
  return finish(std::move(truth), std::move(falsity), *table_);
}

std::map<Atom, Decision> GroundDecider::decide_all() {
  std::map<Atom, Decision> out;
  for (const auto& a : grounding_.herbrand_base) out.emplace(a, decide_atom(a));
  return out;
}

}  // namespace hyrule
