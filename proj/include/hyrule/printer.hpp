#pragma once

#include <string>

#include "hyrule/constraint.hpp"
#include "hyrule/program.hpp"
#include "hyrule/term.hpp"

namespace hyrule {

std::string to_string(const Term& t);
std::string to_string(const Substitution& s);
/// Minimal parentheses; quantifiers below the top level are parenthesized.
std::string to_string(const Constraint& c);
std::string to_string(const Atom& a);
std::string to_string(const RuleLiteral& l);
std::string to_string(const HybridRule& r);
std::string to_string(const Goal& g);
std::string to_string(const TheoryClause& c);
std::string to_string(const TheorySpec& t);
/// Text accepted by parse_program.
std::string to_string(const HybridProgram& p);

}  // namespace hyrule
