#pragma once

#include <string>
#include <string_view>

#include "hyrule/constraint.hpp"
#include "hyrule/errors.hpp"
#include "hyrule/program.hpp"

namespace hyrule {

/// Program text:
///
///   % comment
///   #rulepreds w/1 m/2.
///   #constraintpreds fi/1 e_cls/1.
///   #constants a b c d e f.
///   w(X) :- m(X,Y), ~w(Y).
///   m(c,f) :- { not fi(f) }.
///   #theory geo            (reference to a registered theory)
///   #theory                (alone on its line: clauses follow to end of file)
///   fi(X) -> e_cls(X).
///
/// The signature is inferred from use and checked against declarations.
HybridProgram parse_program(std::string_view text);

/// Theory text: optional `#theory [name]` header, then clauses
/// `l1, not l2 -> h1 | h2.`, `l1 -> false.` or facts `fi(b).`, `not q(a).`
TheorySpec parse_theory(std::string_view text);

/// `{ C } lit, ~lit` with an optional constraint block and optional final
/// period. When `sig` is given, literal predicates must be rule predicates
/// and constraint predicates must not be.
Goal parse_goal(std::string_view text, const Signature* sig = nullptr);

Constraint parse_constraint(std::string_view text);
Term parse_term(std::string_view text);

}  // namespace hyrule
