#include "hyrule/operational.hpp"

#include <algorithm>
#include <deque>

#include "hyrule/cet.hpp"
#include "hyrule/errors.hpp"
#include "hyrule/printer.hpp"

namespace hyrule {

const char* to_string(TreeKind k) { return k == TreeKind::T ? "t" : "tu"; }

const char* to_string(SelectionRule s) {
  switch (s) {
    case SelectionRule::Leftmost:
      return "leftmost";
    case SelectionRule::Rightmost:
      return "rightmost";
    case SelectionRule::NegativeLast:
      return "negative-last";
  }
  return "?";
}

std::optional<SelectionRule> parse_selection_rule(const std::string& name) {
  if (name == "leftmost") return SelectionRule::Leftmost;
  if (name == "rightmost") return SelectionRule::Rightmost;
  if (name == "negative-last") return SelectionRule::NegativeLast;
  return std::nullopt;
}

std::optional<std::size_t> select_literal(SelectionRule rule, const std::vector<RuleLiteral>& literals) {
  if (literals.empty()) return std::nullopt;
  switch (rule) {
    case SelectionRule::Leftmost:
      return 0;
    case SelectionRule::Rightmost:
      return literals.size() - 1;
    case SelectionRule::NegativeLast:
      for (std::size_t i = 0; i < literals.size(); ++i)
        if (literals[i].positive) return i;
      return 0;
  }
  return 0;
}

namespace {

std::optional<Goal> derive(const Goal& g, const HybridRule& r, std::size_t selected, const TheoryInterface& theory,
                           bool simplify_constraints) {
  if (selected >= g.literals.size()) throw ContractError("selected literal out of range");
  const RuleLiteral& lit = g.literals[selected];
  if (!lit.positive) throw ContractError("derivation steps need a positive selected literal");
  if (lit.atom.predicate != r.head.predicate || lit.atom.args.size() != r.head.args.size()) return std::nullopt;
  std::vector<Constraint> parts;
  for (std::size_t i = 0; i < lit.atom.args.size(); ++i) parts.push_back(Constraint::equal(lit.atom.args[i], r.head.args[i]));
  parts.push_back(g.constraint);
  parts.push_back(r.constraint);
  Constraint c = make_and(std::move(parts));
  if (simplify_constraints) c = simplify(c);
  if (c.is_false() || theory.satisfiable(c) == Sat::Unsat) return std::nullopt;
  Goal out{c, {}};
  out.literals.insert(out.literals.end(), g.literals.begin(), g.literals.begin() + static_cast<std::ptrdiff_t>(selected));
  out.literals.insert(out.literals.end(), r.body.begin(), r.body.end());
  out.literals.insert(out.literals.end(), g.literals.begin() + static_cast<std::ptrdiff_t>(selected) + 1, g.literals.end());
  return out;
}

}  // namespace

std::optional<Goal> derive_step(const Goal& g, const HybridRule& r, std::size_t selected, const TheoryInterface& theory) {
  return derive(g, r, selected, theory, true);
}

std::vector<std::size_t> DerivationTree::successful_leaves() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].state == TreeNode::State::Successful) out.push_back(i);
  return out;
}

std::vector<std::shared_ptr<const DerivationTree>> DerivationTree::subsidiaries() const {
  std::vector<std::shared_ptr<const DerivationTree>> out;
  for (const auto& n : nodes)
    if (n.negation && n.negation->tree) out.push_back(n.negation->tree);
  return out;
}

Constraint extract_answer(const DerivationTree& tree, const std::vector<std::size_t>& leaves) {
  std::vector<Constraint> parts;
  for (auto i : leaves) {
    if (i >= tree.nodes.size() || tree.nodes[i].state != TreeNode::State::Successful)
      throw ContractError("node " + std::to_string(i) + " is not a successful leaf");
    parts.push_back(tree.nodes[i].goal.constraint);
  }
  return simplify(restrict_to(make_or(std::move(parts)), variables(tree.root())));
}

Constraint extract_answer(const DerivationTree& tree) { return extract_answer(tree, tree.successful_leaves()); }

Constraint extract_negative_answer(const DerivationTree& tree, const std::set<std::size_t>& cross_section) {
  if (!tree.complete) throw ContractError("negative answers need a complete tree");
  for (auto i : cross_section)
    if (i >= tree.nodes.size()) throw ContractError("node " + std::to_string(i) + " is not in the tree");
  for (auto leaf : tree.successful_leaves()) {
    bool hit = false;
    for (std::optional<std::size_t> n = leaf; n && !hit; n = tree.nodes[*n].parent) hit = cross_section.count(*n) != 0;
    if (!hit)
      throw ContractError("not a cross-section: misses the successful branch ending at node " + std::to_string(leaf) +
                          " (" + to_string(tree.nodes[leaf].goal) + ")");
  }
  const VarSet root_vars = variables(tree.root());
  std::vector<Constraint> parts;
  for (auto i : cross_section) parts.push_back(make_not(restrict_to(tree.nodes[i].goal.constraint, root_vars)));
  return simplify(make_and(std::move(parts)));
}

std::optional<Constraint> extract_negative_answer(const DerivationTree& tree) {
  if (!tree.complete) return std::nullopt;
  auto leaves = tree.successful_leaves();
  return extract_negative_answer(tree, std::set<std::size_t>(leaves.begin(), leaves.end()));
}

Constraint lift_negative_answer(const Constraint& d, const Constraint& c) { return make_or({make_not(c), d}); }

namespace {

SafetyResult check_safe_parts(const Atom* head, const Constraint& c, const std::vector<RuleLiteral>& body,
                              const VarSet& apart_of) {
  VarSet positive;
  VarSet needed = free_variables(c);
  if (head) {
    auto hv = variables(*head);
    needed.insert(hv.begin(), hv.end());
  }
  for (const auto& l : body) {
    auto lv = variables(l.atom);
    (l.positive ? positive : needed).insert(lv.begin(), lv.end());
  }
  for (const auto& x : needed) {
    if (apart_of.count(x)) continue;
    EqualityClass ec = equality_class(c, x);
    if (ec.ground) continue;
    if (std::any_of(ec.members.begin(), ec.members.end(), [&](const std::string& y) { return positive.count(y) != 0; }))
      continue;
    return {false, x};
  }
  return {};
}

}  // namespace

SafetyResult check_safe(const HybridRule& r, const VarSet& apart_of) {
  return check_safe_parts(&r.head, r.constraint, r.body, apart_of);
}

SafetyResult check_safe(const Goal& g, const VarSet& apart_of) {
  return check_safe_parts(nullptr, g.constraint, g.literals, apart_of);
}

std::optional<std::pair<std::size_t, SafetyResult>> find_unsafe_rule(const HybridProgram& p) {
  for (std::size_t i = 0; i < p.rules.size(); ++i) {
    auto s = check_safe(p.rules[i]);
    if (!s.safe) return std::make_pair(i, s);
  }
  return std::nullopt;
}

std::vector<CongruenceResult> check_congruent_syntactic(const HybridProgram& p) {
  std::vector<CongruenceResult> out;
  for (const auto& r : p.rules) {
    CongruenceResult res;
    for (const auto& t : r.head.args) {
      if (!t.is_variable()) {
        res = {false, "head argument " + to_string(t) + " is not a variable"};
        break;
      }
    }
    if (res.passes) {
      std::map<std::string, int> seen;
      auto count = [&](const Term& t, auto&& self) -> void {
        if (t.is_variable()) {
          ++seen[t.name()];
          return;
        }
        for (const auto& a : t.args()) self(a, self);
      };
      for (const auto& t : r.head.args) count(t, count);
      for (const auto& l : r.body)
        for (const auto& t : l.atom.args) count(t, count);
      for (const auto& [v, n] : seen) {
        if (n > 1) {
          res = {false, "variable " + v + " occurs " + std::to_string(n) + " times in the head and body literals"};
          break;
        }
      }
    }
    out.push_back(std::move(res));
  }
  return out;
}

namespace {

VarSet program_variables(const HybridProgram& p) {
  VarSet out;
  for (const auto& r : p.rules) {
    auto v = variables(r);
    out.insert(v.begin(), v.end());
    auto cv = all_variables(r.constraint);
    out.insert(cv.begin(), cv.end());
  }
  return out;
}

/// Replaces variables bound to ground terms in `c` and renames the rest to
/// V1, V2, ... in order of occurrence. `back` maps canonical names to the
/// original variables.
Atom canonical_atom(const Atom& a, const Constraint& c, Substitution& back) {
  Substitution ground;
  for (const auto& v : variables(a)) {
    Binding b = bound_to(c, v);
    if (b.kind == Binding::Kind::GroundTerm) ground.bind(v, b.term);
  }
  Atom g = substitute(a, ground);
  Substitution rename;
  std::size_t n = 0;
  auto visit = [&](const Term& t, auto&& self) -> void {
    if (t.is_variable()) {
      if (!rename.contains(t.name())) {
        std::string name = "V" + std::to_string(++n);
        rename.bind(t.name(), Term::variable(name));
        back.bind(name, t);
      }
      return;
    }
    for (const auto& x : t.args()) self(x, self);
  };
  for (const auto& t : g.args) visit(t, visit);
  return substitute(g, rename);
}

const VarSet& canonical_names() {
  static const VarSet names = [] {
    VarSet s;
    for (int i = 1; i <= 64; ++i) s.insert("V" + std::to_string(i));
    return s;
  }();
  return names;
}

}  // namespace

OperationalEngine::OperationalEngine(const HybridProgram& p, const TheoryInterface& theory)
    : OperationalEngine(p, theory, Options{}) {}

OperationalEngine::OperationalEngine(const HybridProgram& p, const TheoryInterface& theory, Options options)
    : program_(p), theory_(theory), options_(options) {
  if (options_.node_budget == 0) throw ContractError("node budget must be at least 1");
  if (options_.require_safe) {
    if (auto bad = find_unsafe_rule(program_))
      throw Refusal("unsafe rule " + std::to_string(bad->first + 1) + " (" + to_string(program_.rules[bad->first]) + "): variable " + bad->second.witness +
                        " is not bound to a ground term or a positive-literal variable",
                    bad->second.witness);
  }
  fresh_ = FreshNames(program_variables(program_));
  fresh_.reserve(canonical_names());
}

std::shared_ptr<const DerivationTree> OperationalEngine::build_t_tree(const Goal& g, std::size_t rank) {
  return build(TreeKind::T, g, rank);
}

std::shared_ptr<const DerivationTree> OperationalEngine::build_tu_tree(const Goal& g, std::size_t rank) {
  return build(TreeKind::TU, g, rank);
}

std::shared_ptr<const DerivationTree> OperationalEngine::subsidiary(TreeKind kind, const Atom& a, std::size_t rank) {
  auto key = std::make_tuple(kind, rank, a);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  auto tree = build(kind, Goal{Constraint::truth(), {RuleLiteral{true, a}}}, rank);
  cache_.emplace(key, tree);
  return tree;
}

std::shared_ptr<const DerivationTree> OperationalEngine::build(TreeKind kind, const Goal& g, std::size_t rank) {
  fresh_.reserve(variables(g));
  fresh_.reserve(all_variables(g.constraint));
  auto tree = std::make_shared<DerivationTree>();
  tree->kind = kind;
  tree->rank = rank;
  tree->nodes.push_back(TreeNode{g, std::nullopt, {}, std::nullopt, TreeNode::State::Open, {}, std::nullopt});
  auto finish = [&](Constraint c) { return options_.simplify ? simplify(c) : c; };
  // Variables that occur neither in the root nor in the remaining literals
  // are existentially closed, which keeps constraints small on long branches.
  const VarSet root_vars = variables(g);
  auto project = [&](Goal& child) {
    if (!options_.simplify) return;
    // Eliminate non-root variables fixed by a top-level equation.
    Substitution theta;
    for (auto [l, r] : top_level_equalities(child.constraint)) {
      l = theta.apply(l);
      r = theta.apply(r);
      if (l == r) continue;
      std::optional<std::pair<std::string, Term>> b;
      if (l.is_variable() && !root_vars.count(l.name()) && !r.occurs(l.name())) b.emplace(l.name(), r);
      else if (r.is_variable() && !root_vars.count(r.name()) && !l.occurs(r.name())) b.emplace(r.name(), l);
      if (!b) continue;
      const Substitution one{{b->first, b->second}};
      Substitution next;
      for (const auto& [v, t] : theta) next.bind(v, one.apply(t));
      next.bind(b->first, b->second);
      theta = std::move(next);
    }
    if (!theta.empty()) {
      for (auto& lit : child.literals) lit = substitute(lit, theta);
      child.constraint = substitute(child.constraint, theta, fresh_);
    }
    VarSet keep = root_vars;
    for (const auto& l : child.literals)
      for (const auto& v : variables(l)) keep.insert(v);
    child.constraint = simplify(restrict_to(child.constraint, keep));
  };
  auto add_child = [&](std::size_t parent, Goal goal, std::string label, std::optional<NegationEvidence> ev) {
    TreeNode n{std::move(goal), std::nullopt, {}, parent, TreeNode::State::Open, std::move(label), std::move(ev)};
    tree->nodes.push_back(std::move(n));
    tree->nodes[parent].children.push_back(tree->nodes.size() - 1);
  };
  for (std::size_t i = 0; i < tree->nodes.size(); ++i) {
    if (tree->nodes.size() >= options_.node_budget && tree->nodes[i].state == TreeNode::State::Open &&
        !tree->nodes[i].goal.literals.empty()) {
      tree->complete = false;
      break;
    }
    const Goal goal = tree->nodes[i].goal;
    auto sel = select_literal(options_.selection, goal.literals);
    tree->nodes[i].selected = sel;
    if (!sel) {
      tree->nodes[i].state = TreeNode::State::Successful;
      continue;
    }
    tree->nodes[i].state = TreeNode::State::Expanded;
    const RuleLiteral& lit = goal.literals[*sel];
    Goal rest{goal.constraint, goal.literals};
    rest.literals.erase(rest.literals.begin() + static_cast<std::ptrdiff_t>(*sel));
    if (lit.positive) {
      for (const auto& r : program_.rules) {
        if (r.head.predicate != lit.atom.predicate || r.head.args.size() != lit.atom.args.size()) continue;
        HybridRule variant = rename_apart(r, fresh_);
        if (auto child = derive(goal, variant, *sel, theory_, options_.simplify)) {
          project(*child);
          add_child(i, std::move(*child), to_string(r.head), std::nullopt);
        }
      }
      continue;
    }
    if (kind == TreeKind::T && rank == 0) {
      tree->nodes[i].state = TreeNode::State::Leaf;
      continue;
    }
    if (kind == TreeKind::TU && rank == 0) {
      NegationEvidence ev{TreeKind::T, 0, lit.atom, Constraint::truth(), nullptr};
      add_child(i, rest, "neg", std::move(ev));
      continue;
    }
    Substitution back;
    Atom canon = canonical_atom(lit.atom, goal.constraint, back);
    const TreeKind sub_kind = kind == TreeKind::T ? TreeKind::TU : TreeKind::T;
    auto sub = subsidiary(sub_kind, canon, rank - 1);
    Constraint used;
    if (kind == TreeKind::T) {
      auto d = extract_negative_answer(*sub);
      if (!d) {
        tree->nodes[i].state = TreeNode::State::Leaf;
        continue;
      }
      used = substitute(*d, back, fresh_);
    } else {
      used = make_not(substitute(extract_answer(*sub), back, fresh_));
    }
    Constraint c = finish(make_and({used, goal.constraint}));
    if (c.is_false() || theory_.satisfiable(c) == Sat::Unsat) {
      tree->nodes[i].state = TreeNode::State::Leaf;
      tree->nodes[i].negation = NegationEvidence{sub_kind, rank - 1, canon, used, sub};
      continue;
    }
    rest.constraint = c;
    project(rest);
    add_child(i, std::move(rest), "neg", NegationEvidence{sub_kind, rank - 1, canon, used, sub});
  }
  return tree;
}

const char* to_string(AnswerStatus s) {
  switch (s) {
    case AnswerStatus::Entailed:
      return "entailed";
    case AnswerStatus::Conditional:
      return "conditional";
    case AnswerStatus::NegativeEntailed:
      return "negative-entailed";
  }
  return "?";
}

Constraint present_answer(const Constraint& c, const Goal& g, const std::vector<Term>& domain) {
  Constraint s = simplify(c);
  if (domain.empty()) return s;
  try {
    return simplify(to_constraint(to_solved_forms(s, variables(g), domain)));
  } catch (const ContractError&) {
    return s;
  } catch (const ResourceError&) {
    return s;
  }
}

namespace {

void fill_instances(Answer& a, const Goal& g, const TheoryInterface& theory) {
  const auto* finite = dynamic_cast<const FiniteGroundTheory*>(&theory);
  if (!finite || !finite->datalog()) return;
  VarSet vs;
  for (const auto& v : free_variables(a.constraint))
    if (variables(g).count(v)) vs.insert(v);
  const std::vector<std::string> vars(vs.begin(), vs.end());
  const auto& dom = finite->domain();
  if (vars.empty() || dom.empty()) return;
  std::size_t total = 1;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    total *= dom.size();
    if (total > 4096) return;
  }
  std::vector<std::size_t> idx(vars.size(), 0);
  for (;;) {
    Substitution theta;
    for (std::size_t i = 0; i < vars.size(); ++i) theta.bind(vars[i], dom[idx[i]]);
    Constraint inst = substitute(a.constraint, theta);
    if (free_variables(inst).empty() && theory.entails(inst)) a.entailed_instances.push_back(theta);
    std::size_t i = 0;
    while (i < idx.size() && ++idx[i] == dom.size()) idx[i++] = 0;
    if (i == idx.size()) break;
  }
}

}  // namespace

QueryResult query(const HybridProgram& p, const TheoryInterface& theory, const Goal& g, const QueryOptions& options) {
  auto unsafe = check_safe(g);
  if (!unsafe.safe)
    throw Refusal("unsafe goal: variable " + unsafe.witness + " is not bound to a ground term or a positive-literal variable",
                  unsafe.witness);
  OperationalEngine::Options eo;
  eo.selection = options.selection;
  eo.node_budget = options.node_budget;
  OperationalEngine engine(p, theory, eo);
  QueryResult out;
  out.t_tree = engine.build_t_tree(g, options.max_rank);
  Constraint c = extract_answer(*out.t_tree);
  if (!c.is_false() && theory.satisfiable(c) != Sat::Unsat) {
    Answer a;
    a.positive = true;
    a.constraint = c;
    a.source = g;
    a.complete = out.t_tree->complete;
    Sat neg = theory.satisfiable(make_not(c));
    a.status = neg == Sat::Unsat ? AnswerStatus::Entailed : AnswerStatus::Conditional;
    a.theory_checked = neg != Sat::Unknown;
    if (a.status == AnswerStatus::Conditional) fill_instances(a, g, theory);
    out.answers.push_back(std::move(a));
  }
  if (options.negative) {
    out.tu_tree = engine.build_tu_tree(g, options.max_rank);
    if (auto d = extract_negative_answer(*out.tu_tree)) {
      if (!d->is_false() && theory.satisfiable(*d) != Sat::Unsat) {
        Answer a;
        a.positive = false;
        a.constraint = *d;
        a.source = g;
        Sat neg = theory.satisfiable(make_not(*d));
        a.status = neg == Sat::Unsat ? AnswerStatus::NegativeEntailed : AnswerStatus::Conditional;
        a.theory_checked = neg != Sat::Unknown;
        if (a.status == AnswerStatus::Conditional) fill_instances(a, g, theory);
        out.answers.push_back(std::move(a));
      }
    }
  }
  return out;
}

}  // namespace hyrule
