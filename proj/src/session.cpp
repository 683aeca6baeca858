#include "hyrule/session.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hyrule/cet.hpp"
#include "hyrule/decide.hpp"
#include "hyrule/declarative.hpp"
#include "hyrule/errors.hpp"
#include "hyrule/parser.hpp"
#include "hyrule/printer.hpp"

namespace hyrule {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Declarative:
      return "declarative";
    case Mode::Operational:
      return "operational";
    case Mode::Decide:
      return "decide";
  }
  return "?";
}

std::optional<Mode> parse_mode(const std::string& name) {
  if (name == "declarative") return Mode::Declarative;
  if (name == "operational") return Mode::Operational;
  if (name == "decide") return Mode::Decide;
  return std::nullopt;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

TheorySpec read_theory(const std::string& path) {
  try {
    return parse_theory(read_file(path));
  } catch (const ParseError& e) {
    throw InputError(path + ":" + e.what());
  }
}

}  // namespace

LoadedProgram load(const std::string& program_path, const std::optional<std::string>& theory_path) {
  LoadedProgram out;
  try {
    out.program = parse_program(read_file(program_path));
  } catch (const ParseError& e) {
    throw InputError(program_path + ":" + e.what());
  }
  if (theory_path) {
    out.theory = read_theory(*theory_path);
  } else if (out.program.inline_theory) {
    out.theory = *out.program.inline_theory;
  } else if (!out.program.theory_ref.empty()) {
    const std::string& name = out.program.theory_ref;
    if (TheoryRegistry::global().contains(name)) {
      out.theory = TheoryRegistry::global().get(name);
    } else {
      auto sibling = std::filesystem::path(program_path).parent_path() / (name + ".th");
      if (!std::filesystem::exists(sibling))
        throw InputError(program_path + ": theory '" + name + "' is not registered and " + sibling.string() +
                         " does not exist");
      out.theory = read_theory(sibling.string());
    }
  }
  return out;
}

namespace {

struct Session {
  LoadedProgram loaded;
  std::unique_ptr<FiniteGroundTheory> theory;
};

Session open_session(const SessionConfig& cfg) {
  Session s;
  s.loaded = load(cfg.program_path, cfg.theory_path);
  try {
    s.theory = std::make_unique<FiniteGroundTheory>(s.loaded.theory, s.loaded.program.signature);
  } catch (const ParseError& e) {
    throw InputError(cfg.program_path + ": " + e.message());
  }
  return s;
}

template <typename F>
Report guarded(F&& body) {
  std::ostringstream out;
  try {
    body(out);
    return {0, out.str()};
  } catch (const InputError& e) {
    return {2, out.str() + "error: " + e.what() + "\n"};
  } catch (const ParseError& e) {
    return {2, out.str() + "error: " + e.what() + "\n"};
  } catch (const Refusal& e) {
    return {1, out.str() + "refused: " + e.what() + "\n"};
  } catch (const ResourceError& e) {
    return {1, out.str() + "resource limit: " + e.what() + "\n"};
  } catch (const ContractError& e) {
    return {1, out.str() + "error: " + e.what() + "\n"};
  } catch (const std::runtime_error& e) {
    return {1, out.str() + "error: " + e.what() + "\n"};
  }
}

/// Ground instances of the goal over the domain, skipping instances whose
/// constraint is false.
std::vector<Goal> ground_goals(const Goal& g, const std::vector<Term>& domain) {
  const VarSet vs = variables(g);
  const std::vector<std::string> vars(vs.begin(), vs.end());
  std::vector<Goal> out;
  if (vars.empty()) {
    Goal c{simplify(g.constraint), g.literals};
    if (!c.constraint.is_false()) out.push_back(std::move(c));
    return out;
  }
  if (domain.empty()) return out;
  std::size_t total = 1;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    total *= domain.size();
    if (total > 100000) throw ResourceError("goal has more than 100000 ground instances");
  }
  std::vector<std::size_t> idx(vars.size(), 0);
  for (;;) {
    Substitution theta;
    for (std::size_t i = 0; i < vars.size(); ++i) theta.bind(vars[i], domain[idx[i]]);
    Constraint c = simplify(substitute(g.constraint, theta));
    if (!c.is_false()) {
      Goal inst{c, {}};
      for (const auto& l : g.literals) inst.literals.push_back(substitute(l, theta));
      out.push_back(std::move(inst));
    }
    std::size_t i = 0;
    while (i < idx.size() && ++idx[i] == domain.size()) idx[i++] = 0;
    if (i == idx.size()) break;
  }
  return out;
}

std::vector<Atom> goal_letters(const std::vector<Goal>& goals, const FiniteGroundTheory& theory) {
  std::set<Atom> atoms;
  for (const auto& g : goals) {
    auto rel = theory.relevant_atoms(g.constraint);
    atoms.insert(rel.begin(), rel.end());
  }
  return {atoms.begin(), atoms.end()};
}

std::string describe_model(const TheoryModel& m) {
  std::vector<Constraint> lits;
  for (const auto& [a, v] : m.assignment) {
    Constraint atom = Constraint::atom(a.predicate, a.args);
    lits.push_back(v ? atom : make_not(atom));
  }
  return lits.empty() ? "any model" : to_string(make_and(std::move(lits)));
}

void require_datalog(const Session& s, Mode mode) {
  if (!s.loaded.program.signature.is_datalog() || !s.theory->datalog())
    throw Refusal(std::string(to_string(mode)) + " mode needs a Datalog program (function symbols of arity > 0 found)");
}

void require_safe_goal(const Goal& g) {
  auto safe = check_safe(g);
  if (!safe.safe)
    throw Refusal("unsafe goal: variable " + safe.witness + " is not bound to a ground term or a positive-literal variable",
                  safe.witness);
}

void run_declarative(const Session& s, const Goal& goal, std::ostream& out) {
  require_datalog(s, Mode::Declarative);
  auto goals = ground_goals(goal, s.theory->domain());
  DeclarativeOracle oracle(s.loaded.program, *s.theory, goal_letters(goals, *s.theory));
  if (goals.empty()) out << "no ground instances\n";
  for (const auto& g : goals) {
    Classification c = oracle.classify(g.literals, g.constraint);
    out << to_string(g) << ": " << to_string(c.value);
    if (c.witness && c.witness_values)
      out << "; " << to_string(c.witness_values->first) << " when " << describe_model(c.witness->first) << "; "
          << to_string(c.witness_values->second) << " when " << describe_model(c.witness->second);
    out << "\n";
  }
}

void run_operational(const SessionConfig& cfg, const Session& s, const Goal& goal, std::ostream& out) {
  QueryOptions qo;
  qo.max_rank = cfg.max_rank;
  qo.node_budget = cfg.node_budget;
  qo.selection = cfg.selection;
  QueryResult r = query(s.loaded.program, *s.theory, goal, qo);
  const std::vector<Term> domain = s.theory->datalog() ? s.theory->domain() : std::vector<Term>{};
  if (r.answers.empty()) out << "no answers\n";
  for (const auto& a : r.answers) {
    out << (a.positive ? "answer: " : "negative answer: ") << to_string(present_answer(a.constraint, goal, domain))
        << " [" << to_string(a.status) << "]";
    if (!a.theory_checked) out << " [not theory-checked]";
    if (!a.complete) out << " [incomplete]";
    out << "\n";
    if (!a.entailed_instances.empty()) {
      out << (a.positive ? "  entailed for: " : "  entailed negative for: ");
      for (std::size_t i = 0; i < a.entailed_instances.size(); ++i)
        out << (i ? "; " : "") << to_string(a.entailed_instances[i]);
      out << "\n";
    }
  }
  if (r.t_tree && !r.t_tree->complete) out << "note: the t-tree reached the node budget\n";
  if (r.tu_tree && !r.tu_tree->complete) out << "note: the tu-tree reached the node budget; no negative answer\n";
  if (cfg.trace != TraceFormat::None)
    write_file(cfg.trace_path, cfg.trace == TraceFormat::Text ? trace_text(*r.t_tree) : trace_dot(*r.t_tree));
}

void run_decide(const SessionConfig& cfg, const Session& s, const Goal& goal, std::ostream& out) {
  require_datalog(s, Mode::Decide);
  require_safe_goal(goal);
  auto goals = ground_goals(goal, s.theory->domain());
  GroundDecider::Options opt;
  opt.selection = cfg.selection;
  GroundDecider decider(s.loaded.program, *s.theory, goal_letters(goals, *s.theory), opt);
  if (goals.empty()) out << "no ground instances\n";
  for (const auto& g : goals) {
    Decision d = decider.decide_goal(g);
    out << to_string(g) << ": ";
    switch (d.verdict) {
      case Verdict::True:
        out << "true (certificate: " << to_string(d.true_if) << ")";
        break;
      case Verdict::False:
        out << "false (certificate: " << to_string(d.false_if) << ")";
        break;
      case Verdict::Neither:
        out << "neither; true if " << to_string(d.true_if) << "; false if " << to_string(d.false_if);
        break;
    }
    out << "\n";
  }
  out << "stable at rank " << decider.final_rank() << "\n";
  if (cfg.trace != TraceFormat::None) {
    if (goals.empty() || goals.front().literals.empty()) throw ContractError("no atom to trace");
    MaximalTree t = decider.maximal_tree(TreeKind::T, goals.front().literals.front().atom, decider.final_rank());
    write_file(cfg.trace_path,
               cfg.trace == TraceFormat::Text ? trace_text(t, decider.table()) : trace_dot(t, decider.table()));
  }
}

}  // namespace

Report run_query(const SessionConfig& cfg, const std::string& goal_text) {
  return guarded([&](std::ostream& out) {
    if (cfg.node_budget == 0) throw ContractError("node budget must be at least 1");
    if (cfg.trace != TraceFormat::None && cfg.trace_path.empty()) throw ContractError("tracing needs an output path");
    Session s = open_session(cfg);
    Goal goal;
    try {
      goal = parse_goal(goal_text, &s.loaded.program.signature);
    } catch (const ParseError& e) {
      throw InputError(std::string("goal:") + e.what());
    }
    switch (cfg.mode) {
      case Mode::Declarative:
        run_declarative(s, goal, out);
        break;
      case Mode::Operational:
        run_operational(cfg, s, goal, out);
        break;
      case Mode::Decide:
        run_decide(cfg, s, goal, out);
        break;
    }
  });
}

Report run_check(const SessionConfig& cfg) {
  return guarded([&](std::ostream& out) {
    LoadedProgram lp = load(cfg.program_path, cfg.theory_path);
    const auto& rules = lp.program.rules;
    auto congruence = check_congruent_syntactic(lp.program);
    bool all_safe = true;
    for (std::size_t i = 0; i < rules.size(); ++i) {
      auto safe = check_safe(rules[i]);
      all_safe = all_safe && safe.safe;
      out << "rule " << i + 1 << ": " << to_string(rules[i]) << "\n";
      out << "  safe: " << (safe.safe ? "yes" : "no (variable " + safe.witness + ")") << "\n";
      out << "  congruence condition: " << (congruence[i].passes ? "passes" : "fails (" + congruence[i].reason + ")")
          << "\n";
    }
    out << "program " << (all_safe ? "is safe" : "is not safe") << "; "
        << (lp.program.signature.is_datalog() ? "Datalog" : "not Datalog") << "\n";
  });
}

Report run_wf(const SessionConfig& cfg) {
  return guarded([&](std::ostream& out) {
    Session s = open_session(cfg);
    require_datalog(s, Mode::Declarative);
    DeclarativeOracle oracle(s.loaded.program, *s.theory);
    const std::size_t n = oracle.model_count();
    if (n == 0) out << "the theory has no models\n";
    for (std::size_t i = 0; i < n && i < cfg.model_cap; ++i) {
      out << "model " << i + 1 << " of " << n << ": " << describe_model(oracle.model(i)) << "\n";
      const auto& q = oracle.reduct(i);
      const auto& wf = oracle.wf(i);
      std::vector<std::string> parts[3];
      for (std::size_t a = 0; a < q.size(); ++a)
        parts[static_cast<int>(wf.value(static_cast<int>(a)))].push_back(to_string(q.atoms[a]));
      const char* names[3] = {"false", "undefined", "true"};
      for (int k : {2, 0, 1}) {
        out << "  " << names[k] << ":";
        for (const auto& x : parts[k]) out << " " << x;
        out << "\n";
      }
    }
    if (n > cfg.model_cap) out << "(" << n - cfg.model_cap << " more models not shown)\n";
  });
}

}  // namespace hyrule
