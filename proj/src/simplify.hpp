#pragma once

#include "formula.hpp"

#include <set>
#include <string>

namespace mw {

// Rule names accepted in `enabled`: one_point, flatten, bool, ite_collapse,
// arith01, drop_unused, frame_fold.
struct SimplifyConfig {
  int max_passes = 10;
  std::set<std::string> enabled;  // empty = all rules

  bool on(const std::string& rule) const { return enabled.empty() || enabled.count(rule); }
  static const std::set<std::string>& known_rules();
};

// Equivalence-preserving rewriting to a bounded fixpoint.
FormulaPtr simplify(const FormulaPtr& f, const SimplifyConfig& cfg = {});
TermPtr simplify(const TermPtr& t, const SimplifyConfig& cfg = {});

}  // namespace mw
