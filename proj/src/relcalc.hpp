#pragma once

#include "ast.hpp"
#include "formula.hpp"
#include "relcalc_fwd.hpp"
#include "simplify.hpp"

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mw {

// Judgment  c : f [xs] g h  — the command's transition relation f over its
// frame xs, valid provided the state-independent condition g holds and the
// pre-state satisfies h.
struct RelJudgment {
  FormulaPtr relation;
  std::set<std::string> frame;
  FormulaPtr global;
  FormulaPtr pre;
};

// Judgment  c ↓ f g  — pre-states satisfying f terminate, provided g.
struct TermJudgment {
  FormulaPtr cond;
  FormulaPtr global;
};

struct DeriveError : std::runtime_error {
  explicit DeriveError(const std::string& msg) : std::runtime_error(msg) {}
};

struct FreshGen {
  int next = 1;
  std::string operator()() { return "v#" + std::to_string(next++); }
};

struct MethodContext {
  const Program* program = nullptr;
  const MethodDecl* method = nullptr;
  DeriveOptions options;
  FreshGen fresh;
  std::vector<std::string> scope;  // program variables in scope, declaration order

  // populated when building a semantic model
  std::map<const Command*, RelJudgment>* rel_out = nullptr;
  std::map<const Command*, TermJudgment>* term_out = nullptr;
};

MethodContext make_context(const MethodDecl& m, const Program& p, const DeriveOptions& opts = {});

RelJudgment derive_relation(const CommandPtr& c, MethodContext& ctx);
TermJudgment derive_termination(const CommandPtr& c, MethodContext& ctx);

// PRE: condition on the pre-state guaranteeing f_q after any transition.
FormulaPtr pre_of(const RelJudgment& j, const FormulaPtr& f_q, FreshGen& fresh);
// POST: strongest condition on the post-state reachable from f_p states.
FormulaPtr post_of(const RelJudgment& j, const FormulaPtr& f_p, FreshGen& fresh);

// Transition relation of `target = callee(args)` from the callee's contract.
RelJudgment derive_call_relation(const MethodDecl& callee, const std::string& target,
                                 const std::vector<ExprPtr>& args);

// The three loop states of the verification tasks: x at loop entry, y before
// an iteration, z after it. Frame variables get y/z copies named v#y / v#z;
// every scope variable doubles as its own entry copy.
struct LoopThreeState {
  std::vector<VarRef> entry_vars;   // all scope variables
  std::vector<VarRef> iter_vars;    // y and z copies of frame variables
  FormulaPtr inv_entry_y;           // i′ between x and y
  FormulaPtr cond_y;                // loop condition at y
  FormulaPtr body_rel_yz;           // body relation from y to z
  FormulaPtr inv_entry_z;           // i″ between x and z
  FormulaPtr cond_def_y;            // definedness of the loop condition at y
  FormulaPtr body_pre_y;            // body precondition at y
  FormulaPtr body_term_y;           // body termination condition at y
  TermPtr measure_y, measure_z;
};

LoopThreeState loop_three_state(const Command& loop, const RelJudgment& body,
                                const TermJudgment& body_term,
                                const std::vector<std::string>& scope);

// ---- per-method semantic model ----

struct NodeSemantics {
  CommandPtr node;
  Span span;
  int depth = 0;
  std::vector<std::string> scope;
  RelJudgment rel_raw, rel;
  TermJudgment term_raw, term;
  FormulaPtr knowledge_raw, knowledge;
};

// Optional assumption injected during knowledge propagation (assert-at).
struct KnowledgeInjection {
  const Command* node = nullptr;
  bool at_post = false;
  FormulaPtr condition;
};

struct SemanticModel {
  const MethodDecl* method = nullptr;
  std::vector<NodeSemantics> nodes;  // preorder, method body first

  const NodeSemantics& body() const { return nodes.front(); }
  const NodeSemantics* find(const Command* c) const;
  // innermost node whose span covers the line
  const NodeSemantics* at_line(int line) const;
};

SemanticModel build_semantic_model(const MethodDecl& m, const Program& p,
                                   const DeriveOptions& opts = {},
                                   const SimplifyConfig& scfg = {},
                                   const std::optional<KnowledgeInjection>& inject = {});

}  // namespace mw
