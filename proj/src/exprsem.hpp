#pragma once

#include "ast.hpp"
#include "formula.hpp"

namespace mw {

// Result of translating a program expression: an integer expression yields a
// term, a boolean one a formula; `defined` is the pre-state condition under
// which evaluation neither overflows nor divides by zero.
struct ExprTranslation {
  TermPtr term;
  FormulaPtr formula;
  FormulaPtr defined;

  bool is_bool() const { return formula != nullptr; }
};

// Every program variable becomes its pre-state value. Expects a typechecked
// expression; total on such input.
ExprTranslation translate_expr(const ExprPtr& e);

}  // namespace mw
