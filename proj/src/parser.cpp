#include "hyrule/parser.hpp"

#include <cctype>
#include <optional>
#include <utility>

namespace hyrule {

namespace {

enum class Tok { Ident, Var, Number, Punct, Directive, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
  bool newline_before = false;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    bool newline = true;
    for (;;) {
      newline = skip_space() || newline;
      Token t;
      t.line = line_;
      t.column = col_;
      t.newline_before = newline;
      newline = false;
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          advance();
        t.text = std::string(src_.substr(start, pos_ - start));
        t.kind = (std::isupper(static_cast<unsigned char>(c)) || c == '_') ? Tok::Var : Tok::Ident;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        t.text = std::string(src_.substr(start, pos_ - start));
        t.kind = Tok::Number;
      } else if (c == '#') {
        std::size_t start = pos_;
        advance();
        while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) advance();
        t.text = std::string(src_.substr(start, pos_ - start));
        t.kind = Tok::Directive;
      } else {
        t.kind = Tok::Punct;
        auto two = src_.substr(pos_, 2);
        if (two == ":-" || two == "->" || two == "!=") {
          t.text = std::string(two);
          advance();
          advance();
        } else if (std::string_view("(){},.:~|=/").find(c) != std::string_view::npos) {
          t.text = std::string(1, c);
          advance();
        } else {
          throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  // Returns whether a newline was crossed.
  bool skip_space() {
    bool newline = false;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        if (c == '\n') newline = true;
        advance();
      } else {
        break;
      }
    }
    return newline;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

bool is_keyword(const std::string& s) {
  return s == "true" || s == "false" || s == "not" || s == "and" || s == "or" || s == "exists";
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(Lexer(text).run()) {}

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Tok::End; }
  bool is_punct(const char* p, std::size_t k = 0) const {
    return peek(k).kind == Tok::Punct && peek(k).text == p;
  }
  bool is_word(const char* w) const { return peek().kind == Tok::Ident && peek().text == w; }

  Token take() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }

  [[noreturn]] void fail(const std::string& msg, const Token& at) const {
    throw ParseError(msg, at.line, at.column);
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    fail(msg + (t.kind == Tok::End ? " at end of input" : " near '" + t.text + "'"), t);
  }

  void expect(const char* p) {
    if (!is_punct(p)) fail(std::string("expected '") + p + "'");
    take();
  }

  std::string identifier(const char* what) {
    if (peek().kind != Tok::Ident || is_keyword(peek().text)) fail(std::string("expected ") + what);
    return take().text;
  }

  Term term() {
    const Token& t = peek();
    if (t.kind == Tok::Var) {
      take();
      if (t.text == "_") return Term::variable("_" + std::to_string(++anonymous_));
      return Term::variable(t.text);
    }
    if (t.kind == Tok::Number) return Term::constant(take().text);
    if (t.kind == Tok::Ident && !is_keyword(t.text)) {
      Token head = take();
      std::vector<Term> args;
      if (is_punct("(")) args = term_list();
      note(functions_, head, args.size(), "function symbol");
      return Term::function(head.text, std::move(args));
    }
    fail("expected a term");
  }

  std::vector<Term> term_list() {
    expect("(");
    std::vector<Term> args;
    if (!is_punct(")")) {
      args.push_back(term());
      while (is_punct(",")) {
        take();
        args.push_back(term());
      }
    }
    expect(")");
    return args;
  }

  Atom atom(std::map<std::string, std::size_t>* table) {
    Token head = peek();
    std::string name = identifier("an atom");
    Atom a{std::move(name), {}};
    if (is_punct("(")) a.args = term_list();
    if (table) note(*table, head, a.args.size(), "predicate");
    return a;
  }

  // exists < or < and < not
  Constraint constraint() {
    if (is_word("exists")) return quantified();
    std::vector<Constraint> ops{conjunction()};
    while (is_word("or")) {
      take();
      ops.push_back(is_word("exists") ? quantified() : conjunction());
    }
    return Constraint::disjunction(std::move(ops));
  }

  Constraint quantified() {
    take();  // exists
    std::vector<std::string> vars;
    for (;;) {
      if (peek().kind != Tok::Var || peek().text == "_") fail("expected a variable after 'exists'");
      vars.push_back(take().text);
      if (!is_punct(",")) break;
      take();
    }
    expect(":");
    return Constraint::exists(std::move(vars), constraint());
  }

  Constraint conjunction() {
    std::vector<Constraint> ops{unary()};
    while (is_word("and")) {
      take();
      ops.push_back(is_word("exists") ? quantified() : unary());
    }
    return Constraint::conjunction(std::move(ops));
  }

  Constraint unary() {
    if (is_word("not")) {
      take();
      if (is_word("exists")) return Constraint::negation(quantified());
      return Constraint::negation(unary());
    }
    if (is_word("exists")) return quantified();
    return primary();
  }

  Constraint primary() {
    if (is_word("true")) {
      take();
      return Constraint::truth();
    }
    if (is_word("false")) {
      take();
      return Constraint::falsity();
    }
    if (is_punct("(")) {
      take();
      Constraint c = constraint();
      expect(")");
      return c;
    }
    Token start = peek();
    if (start.kind == Tok::Ident && !is_keyword(start.text) && !is_punct("=", 1) && !is_punct("!=", 1) &&
        !is_punct("(", 1)) {
      // Bare identifier: a propositional constraint atom.
      take();
      note(constraint_preds_, start, 0, "predicate");
      return Constraint::atom(start.text);
    }
    if (start.kind == Tok::Ident && is_punct("(", 1)) {
      // Either p(args) as an atom or f(args) = t as an equation.
      std::size_t save = pos_;
      take();
      std::vector<Term> args = term_list_unchecked();
      if (!is_punct("=") && !is_punct("!=")) {
        note(constraint_preds_, start, args.size(), "predicate");
        return Constraint::atom(start.text, std::move(args));
      }
      pos_ = save;
    }
    Term lhs = term();
    if (is_punct("=") || is_punct("!=")) {
      bool neg = take().text == "!=";
      Term rhs = term();
      Constraint eq = Constraint::equal(std::move(lhs), std::move(rhs));
      return neg ? Constraint::negation(eq) : eq;
    }
    fail("expected a constraint");
  }

  // Argument list parsed without recording function symbols (the caller
  // may backtrack and reparse as a term).
  std::vector<Term> term_list_unchecked() {
    auto saved = functions_;
    auto args = term_list();
    functions_ = std::move(saved);
    // Record the nested symbols again now that they are committed.
    for (const auto& a : args) record(a);
    return args;
  }

  void record(const Term& t) {
    if (t.is_variable()) return;
    Token pseudo = peek();
    note(functions_, pseudo, t.arity(), "function symbol", t.name());
    for (const auto& a : t.args()) record(a);
  }

  void note(std::map<std::string, std::size_t>& table, const Token& at, std::size_t arity, const char* what,
            const std::string& name_override = {}) {
    const std::string& name = name_override.empty() ? at.text : name_override;
    auto [it, inserted] = table.emplace(name, arity);
    if (!inserted && it->second != arity)
      fail(std::string(what) + " '" + name + "' used with arities " + std::to_string(it->second) + " and " +
               std::to_string(arity),
           at);
  }

  void arity_list(std::map<std::string, std::size_t>& table, const char* what) {
    while (!is_punct(".")) {
      Token name = peek();
      identifier("a predicate name");
      expect("/");
      if (peek().kind != Tok::Number) fail("expected an arity");
      note(table, name, std::stoul(take().text), what);
    }
    take();
  }

  RuleLiteral literal() {
    bool positive = true;
    if (is_punct("~")) {
      take();
      positive = false;
    }
    return RuleLiteral{positive, atom(&rule_preds_)};
  }

  HybridRule rule() {
    HybridRule r;
    r.head = atom(&rule_preds_);
    std::vector<Constraint> cs;
    if (is_punct(":-")) {
      take();
      for (;;) {
        if (is_punct("{")) {
          take();
          cs.push_back(constraint());
          expect("}");
        } else {
          r.body.push_back(literal());
        }
        if (!is_punct(",")) break;
        take();
      }
    }
    expect(".");
    r.constraint = cs.size() == 1 ? cs.front() : Constraint::conjunction(std::move(cs));
    return r;
  }

  std::pair<bool, Atom> theory_literal() {
    bool positive = true;
    if (is_word("not")) {
      take();
      positive = false;
    }
    if (is_word("exists")) fail("existential quantifiers are not supported in theory clauses");
    Token at = peek();
    Atom a = atom(&constraint_preds_);
    for (const auto& t : a.args)
      if (!t.is_variable() && !t.args().empty()) fail("theory clauses may only use variables and constants", at);
    return {positive, std::move(a)};
  }

  TheoryClause theory_clause() {
    TheoryClause cl;
    std::vector<std::pair<bool, Atom>> body;
    if (!is_punct("->")) {
      if (is_word("true")) {
        take();
      } else {
        body.push_back(theory_literal());
        while (is_punct(",")) {
          take();
          body.push_back(theory_literal());
        }
      }
    }
    if (is_punct("->")) {
      take();
      for (auto& [pos, a] : body) cl.literals.emplace_back(!pos, std::move(a));
      if (is_word("false")) {
        take();
      } else {
        for (;;) {
          auto [pos, a] = theory_literal();
          if (!pos) fail("negated literal in a clause head");
          cl.literals.emplace_back(true, std::move(a));
          if (!is_punct("|")) break;
          take();
        }
      }
    } else if (is_punct("|")) {
      if (body.size() != 1 || !body.front().first) fail("expected '->'");
      cl.literals.push_back(std::move(body.front()));
      while (is_punct("|")) {
        take();
        auto [pos, a] = theory_literal();
        if (!pos) fail("negated literal in a disjunctive fact");
        cl.literals.emplace_back(true, std::move(a));
      }
    } else {
      if (body.size() != 1) fail("expected '->'");
      cl.literals.push_back(std::move(body.front()));
    }
    expect(".");
    return cl;
  }

  void theory_body(TheorySpec& spec) {
    while (!at_end()) {
      if (peek().kind == Tok::Directive) {
        Token d = take();
        if (d.text == "#constants") {
          while (!is_punct(".")) {
            Token c = peek();
            if (c.kind != Tok::Ident && c.kind != Tok::Number) fail("expected a constant");
            take();
            note(functions_, c, 0, "function symbol");
          }
          take();
        } else if (d.text == "#constraintpreds") {
          arity_list(constraint_preds_, "predicate");
        } else {
          fail("unexpected directive " + d.text + " in a theory", d);
        }
        continue;
      }
      spec.clauses.push_back(theory_clause());
    }
    spec.predicates = constraint_preds_;
    for (const auto& cl : spec.clauses)
      for (const auto& [_, a] : cl.literals)
        for (const auto& t : a.args)
          if (!t.is_variable()) spec.functions.emplace(t.name(), 0);
    for (const auto& [f, n] : functions_) spec.functions.emplace(f, n);
  }

  HybridProgram program() {
    HybridProgram p;
    while (!at_end()) {
      if (peek().kind == Tok::Directive) {
        Token d = take();
        if (d.text == "#rulepreds") {
          arity_list(rule_preds_, "predicate");
        } else if (d.text == "#constraintpreds") {
          arity_list(constraint_preds_, "predicate");
        } else if (d.text == "#functions") {
          arity_list(functions_, "function symbol");
        } else if (d.text == "#constants") {
          while (!is_punct(".")) {
            Token c = peek();
            if ((c.kind != Tok::Ident && c.kind != Tok::Number) || is_keyword(c.text)) fail("expected a constant");
            take();
            note(functions_, c, 0, "function symbol");
          }
          take();
        } else if (d.text == "#theory") {
          if (!peek().newline_before && peek().kind == Tok::Ident) {
            p.theory_ref = take().text;
            if (is_punct(".")) take();
          } else {
            // Inline clauses run to the end of the file.
            TheorySpec spec;
            theory_body(spec);
            p.inline_theory = std::move(spec);
          }
        } else {
          fail("unknown directive " + d.text, d);
        }
        continue;
      }
      p.rules.push_back(rule());
    }
    p.signature.rule_predicates = rule_preds_;
    p.signature.constraint_predicates = constraint_preds_;
    p.signature.functions = functions_;
    for (const auto& [name, _] : rule_preds_)
      if (constraint_preds_.count(name))
        throw ParseError("predicate '" + name + "' is both a rule and a constraint predicate", peek().line,
                         peek().column);
    return p;
  }

  Goal goal(const Signature* sig) {
    if (sig) {
      rule_preds_ = sig->rule_predicates;
      constraint_preds_ = sig->constraint_predicates;
      functions_ = sig->functions;
    }
    Goal g;
    if (is_punct("{")) {
      take();
      g.constraint = constraint();
      expect("}");
      if (is_punct(",")) take();
    }
    if (!at_end() && !is_punct(".")) {
      g.literals.push_back(literal());
      while (is_punct(",")) {
        take();
        g.literals.push_back(literal());
      }
    }
    if (is_punct(".")) take();
    if (!at_end()) fail("unexpected input after goal");
    if (sig) {
      for (const auto& [name, _] : rule_preds_)
        if (constraint_preds_.count(name)) fail("predicate '" + name + "' is both a rule and a constraint predicate");
    }
    return g;
  }

  void finish() {
    if (!at_end()) fail("unexpected input");
  }

  std::map<std::string, std::size_t> rule_preds_;
  std::map<std::string, std::size_t> constraint_preds_;
  std::map<std::string, std::size_t> functions_;

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t anonymous_ = 0;
};

}  // namespace

HybridProgram parse_program(std::string_view text) {
  Parser p(text);
  return p.program();
}

TheorySpec parse_theory(std::string_view text) {
  Parser p(text);
  if (p.peek().kind == Tok::Directive && p.peek().text == "#theory") {
    Token d = p.take();
    if (p.peek().kind == Tok::Ident && p.peek().line == d.line) {
      p.take();
      if (p.is_punct(".")) p.take();
    }
  }
  TheorySpec spec;
  p.theory_body(spec);
  return spec;
}

Goal parse_goal(std::string_view text, const Signature* sig) {
  Parser p(text);
  return p.goal(sig);
}

Constraint parse_constraint(std::string_view text) {
  Parser p(text);
  Constraint c = p.constraint();
  p.finish();
  return c;
}

Term parse_term(std::string_view text) {
  Parser p(text);
  Term t = p.term();
  p.finish();
  return t;
}

}  // namespace hyrule
