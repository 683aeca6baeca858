#include "hyrule/printer.hpp"

#include <sstream>

namespace hyrule {

namespace {

int precedence(const Constraint& c) {
  switch (c.kind()) {
    case Constraint::Kind::Exists:
      return 0;
    case Constraint::Kind::Or:
      return 1;
    case Constraint::Kind::And:
      return 2;
    case Constraint::Kind::Not:
      return 3;
    default:
      return 4;
  }
}

void print(std::ostream& os, const Constraint& c, int context) {
  using K = Constraint::Kind;
  const int prec = precedence(c);
  const bool parens = prec < context || (c.kind() == K::Exists && context > 0);
  if (parens) os << '(';
  switch (c.kind()) {
    case K::True:
      os << "true";
      break;
    case K::False:
      os << "false";
      break;
    case K::Atom:
      os << to_string(Atom{c.predicate(), c.args()});
      break;
    case K::Eq:
      os << to_string(c.lhs()) << " = " << to_string(c.rhs());
      break;
    case K::Not:
      if (c.operand().kind() == K::Eq) {
        os << to_string(c.operand().lhs()) << " != " << to_string(c.operand().rhs());
      } else {
        os << "not ";
        print(os, c.operand(), 3);
      }
      break;
    case K::And:
    case K::Or: {
      const char* sep = c.kind() == K::And ? " and " : " or ";
      bool first = true;
      for (const auto& o : c.operands()) {
        if (!first) os << sep;
        first = false;
        print(os, o, prec + 1);
      }
      break;
    }
    case K::Exists: {
      os << "exists ";
      bool first = true;
      for (const auto& v : c.bound()) {
        if (!first) os << ',';
        first = false;
        os << v;
      }
      os << ": ";
      print(os, c.operand(), 0);
      break;
    }
  }
  if (parens) os << ')';
}

}  // namespace

std::string to_string(const Term& t) {
  if (t.is_variable() || t.args().empty()) return t.name();
  std::string out = t.name() + "(";
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    if (i) out += ',';
    out += to_string(t.args()[i]);
  }
  return out + ")";
}

std::string to_string(const Substitution& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [v, t] : s) {
    if (!first) out += ", ";
    first = false;
    out += v + "/" + to_string(t);
  }
  return out + "}";
}

std::string to_string(const Constraint& c) {
  std::ostringstream os;
  print(os, c, 0);
  return os.str();
}

std::string to_string(const Atom& a) {
  if (a.args.empty()) return a.predicate;
  return to_string(Term::function(a.predicate, a.args));
}

std::string to_string(const RuleLiteral& l) { return (l.positive ? "" : "~") + to_string(l.atom); }

std::string to_string(const HybridRule& r) {
  std::string out = to_string(r.head);
  std::vector<std::string> items;
  if (!r.constraint.is_true()) items.push_back("{ " + to_string(r.constraint) + " }");
  for (const auto& l : r.body) items.push_back(to_string(l));
  if (!items.empty()) {
    out += " :- ";
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += ", ";
      out += items[i];
    }
  }
  return out + ".";
}

std::string to_string(const Goal& g) {
  std::string out;
  if (!g.constraint.is_true() || g.literals.empty()) out = "{ " + to_string(g.constraint) + " }";
  for (std::size_t i = 0; i < g.literals.size(); ++i) {
    out += (i || !out.empty()) ? ", " : "";
    out += to_string(g.literals[i]);
  }
  return out;
}

std::string to_string(const TheoryClause& c) {
  std::vector<std::string> body, head;
  for (const auto& [pos, a] : c.literals) (pos ? head : body).push_back(to_string(a));
  auto join = [](const std::vector<std::string>& xs, const char* sep) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? sep : "") + xs[i];
    return s;
  };
  if (body.empty()) return head.empty() ? "-> false." : join(head, " | ") + ".";
  if (head.empty() && body.size() == 1) return "not " + body.front() + ".";
  return join(body, ", ") + " -> " + (head.empty() ? "false" : join(head, " | ")) + ".";
}

std::string to_string(const TheorySpec& t) {
  std::string out;
  std::string consts;
  for (const auto& [f, n] : t.functions)
    if (n == 0) consts += " " + f;
  if (!consts.empty()) out += "#constants" + consts + ".\n";
  for (const auto& c : t.clauses) out += to_string(c) + "\n";
  return out;
}

std::string to_string(const HybridProgram& p) {
  std::ostringstream os;
  auto arities = [&](const char* directive, const std::map<std::string, std::size_t>& table) {
    if (table.empty()) return;
    os << directive;
    for (const auto& [name, n] : table) os << ' ' << name << '/' << n;
    os << ".\n";
  };
  arities("#rulepreds", p.signature.rule_predicates);
  arities("#constraintpreds", p.signature.constraint_predicates);
  std::map<std::string, std::size_t> functions;
  std::string consts;
  for (const auto& [f, n] : p.signature.functions) {
    if (n == 0)
      consts += " " + f;
    else
      functions.emplace(f, n);
  }
  arities("#functions", functions);
  if (!consts.empty()) os << "#constants" << consts << ".\n";
  for (const auto& r : p.rules) os << to_string(r) << '\n';
  if (!p.theory_ref.empty()) os << "#theory " << p.theory_ref << "\n";
  if (p.inline_theory) {
    os << "#theory\n";
    for (const auto& c : p.inline_theory->clauses) os << to_string(c) << '\n';
  }
  return os.str();
}

}  // namespace hyrule
