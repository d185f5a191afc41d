#pragma once

#include "ast.hpp"

#include <string>

namespace mw {

// How bare identifiers in a formula resolve:
//   Contract — pre-state value of a program variable; `result` is the
//              post-state return value (ensures clauses).
//   State    — pre-state value, including `result` (assert-at conditions).
//   Plain    — logical variables; explicit x$0/x$1 spellings give tags.
enum class FormulaMode { Contract, State, Plain };

Program parse_program(const std::string& text, const std::string& filename = "");

FormulaPtr parse_formula(const std::string& text, FormulaMode mode);
TermPtr parse_term(const std::string& text, FormulaMode mode);

}  // namespace mw
