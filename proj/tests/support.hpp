#pragma once

#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "hyrule/parser.hpp"
#include "hyrule/program.hpp"
#include "hyrule/theory.hpp"

namespace hyrule::testing {

inline std::string data_path(const std::string& name) { return std::string(HYRULE_DATA_DIR) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

struct Fixture {
  HybridProgram program;
  TheorySpec spec;
  std::unique_ptr<FiniteGroundTheory> theory;
};

inline Fixture load_fixture(const std::string& program_file, const std::string& theory_file = "") {
  Fixture f;
  f.program = parse_program(slurp(data_path(program_file)));
  if (!theory_file.empty()) f.spec = parse_theory(slurp(data_path(theory_file)));
  else if (f.program.inline_theory) f.spec = *f.program.inline_theory;
  f.theory = std::make_unique<FiniteGroundTheory>(f.spec, f.program.signature);
  return f;
}

inline Fixture game() { return load_fixture("game.hr"); }
inline Fixture hybrid_game() { return load_fixture("hybrid_game.hr", "geo.th"); }

inline Atom atom(const std::string& p, std::initializer_list<const char*> args) {
  Atom a{p, {}};
  for (const char* x : args) a.args.push_back(Term::constant(x));
  return a;
}

inline RuleLiteral pos(Atom a) { return RuleLiteral{true, std::move(a)}; }
inline RuleLiteral neg(Atom a) { return RuleLiteral{false, std::move(a)}; }

}  // namespace hyrule::testing
