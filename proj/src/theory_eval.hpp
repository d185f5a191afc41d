#pragma once

#include "ast.hpp"
#include "formula.hpp"

#include <map>
#include <optional>
#include <string>

namespace mw {

// A theory function is computable when some axiom has the shape
//
//   FORALL(v1: INT, ..., vk: INT):
//     IF guard THEN f(v1,...,vk) = base ELSE f(v1,...,vk) = step ENDIF
//
// (or a single unconditional equation; <=> instead of = for predicates).
// Such axioms compile to recursive evaluators for the oracle; anything
// else stays solver-only.
struct ComputeRule {
  std::vector<std::string> binders;
  FormulaPtr guard;            // null when unconditional
  TermPtr then_term, else_term;      // integer functions
  FormulaPtr then_form, else_form;   // predicates
  bool is_bool = false;
};

struct TheoryEnv {
  std::map<std::string, ComputeRule> rules;
  std::map<std::string, const TheoryFunc*> declared;

  static TheoryEnv compile(const Program& p);
  bool computable(const std::string& fn) const { return rules.count(fn) != 0; }
};

}  // namespace mw
