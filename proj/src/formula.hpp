#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace mw {

using Value = long long;

// Tags distinguish the two program states a formula may talk about from
// ordinary logical variables. x$0 is the value in the pre-state, x$1 in
// the post-state; logical variables are quantifier-bound or rigid.
enum class VarTag { Pre, Post, Logical };

struct VarRef {
  std::string name;
  VarTag tag = VarTag::Logical;

  bool operator==(const VarRef& o) const { return tag == o.tag && name == o.name; }
  bool operator!=(const VarRef& o) const { return !(*this == o); }
  bool operator<(const VarRef& o) const {
    if (name != o.name) return name < o.name;
    return static_cast<int>(tag) < static_cast<int>(o.tag);
  }
  std::string str() const {
    switch (tag) {
      case VarTag::Pre: return name + "$0";
      case VarTag::Post: return name + "$1";
      default: return name;
    }
  }
};

inline VarRef pre_var(std::string n) { return {std::move(n), VarTag::Pre}; }
inline VarRef post_var(std::string n) { return {std::move(n), VarTag::Post}; }
inline VarRef log_var(std::string n) { return {std::move(n), VarTag::Logical}; }

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

struct Formula;
struct Term;
using FormulaPtr = std::shared_ptr<const Formula>;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind { IntLit, Var, MinInt, MaxInt, Neg, Add, Sub, Mul, Div, Mod, Ite, App };
  Kind kind = Kind::IntLit;
  Value value = 0;              // IntLit
  VarRef var;                   // Var
  std::string fn;               // App
  FormulaPtr cond;              // Ite guard
  std::vector<TermPtr> args;    // Neg: 1; binary ops: 2; Ite: then/else; App: operands
};

struct Formula {
  enum class Kind { True, False, Cmp, Pred, Not, And, Or, Implies, Iff, Ite, Forall, Exists };
  Kind kind = Kind::True;
  CmpOp cmp = CmpOp::Eq;        // Cmp
  TermPtr lhs, rhs;             // Cmp
  std::string fn;               // Pred (boolean theory function)
  std::vector<TermPtr> targs;   // Pred operands
  std::vector<FormulaPtr> kids; // Not: 1; And/Or: n; Implies/Iff: 2; Ite: cond,then,else
  std::vector<VarRef> binders;  // Forall/Exists (logical vars)
  FormulaPtr body;              // quantifier body
};

// -- constructors -----------------------------------------------------------

TermPtr t_int(Value v);
TermPtr t_var(VarRef v);
TermPtr t_min_int();
TermPtr t_max_int();
TermPtr t_neg(TermPtr a);
TermPtr t_bin(Term::Kind op, TermPtr a, TermPtr b);
TermPtr t_add(TermPtr a, TermPtr b);
TermPtr t_sub(TermPtr a, TermPtr b);
TermPtr t_mul(TermPtr a, TermPtr b);
TermPtr t_div(TermPtr a, TermPtr b);
TermPtr t_mod(TermPtr a, TermPtr b);
TermPtr t_ite(FormulaPtr c, TermPtr a, TermPtr b);
TermPtr t_app(std::string fn, std::vector<TermPtr> args);

FormulaPtr f_true();
FormulaPtr f_false();
FormulaPtr f_bool(bool b);
FormulaPtr f_cmp(CmpOp op, TermPtr a, TermPtr b);
FormulaPtr f_eq(TermPtr a, TermPtr b);
FormulaPtr f_pred(std::string fn, std::vector<TermPtr> args);
FormulaPtr f_not(FormulaPtr a);
FormulaPtr f_and(FormulaPtr a, FormulaPtr b);
FormulaPtr f_and(std::vector<FormulaPtr> kids);
FormulaPtr f_or(FormulaPtr a, FormulaPtr b);
FormulaPtr f_or(std::vector<FormulaPtr> kids);
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr f_iff(FormulaPtr a, FormulaPtr b);
FormulaPtr f_ite(FormulaPtr c, FormulaPtr a, FormulaPtr b);
// Quantifiers with an empty binder list collapse to the body.
FormulaPtr f_forall(std::vector<VarRef> binders, FormulaPtr body);
FormulaPtr f_exists(std::vector<VarRef> binders, FormulaPtr body);

bool is_true(const FormulaPtr& f);
bool is_false(const FormulaPtr& f);

// Construction-level tidying used by the calculus: drops literal `true`
// operands so derived side conditions keep the shape the rules produce on
// paper. Not a substitute for the simplifier.
FormulaPtr conj(FormulaPtr a, FormulaPtr b);
FormulaPtr conj_all(const std::vector<FormulaPtr>& fs);
FormulaPtr impl(FormulaPtr a, FormulaPtr b);

// -- structural operations ---------------------------------------------------

bool equal(const TermPtr& a, const TermPtr& b);
bool equal(const FormulaPtr& a, const FormulaPtr& b);

std::size_t node_count(const TermPtr& t);
std::size_t node_count(const FormulaPtr& f);

using SubstMap = std::map<VarRef, TermPtr>;

// Occurrences outside their binders, all tags.
std::set<VarRef> free_vars(const FormulaPtr& f);
std::set<VarRef> free_vars(const TermPtr& t);
void collect_free_vars(const FormulaPtr& f, std::set<VarRef>& out);
void collect_free_vars(const TermPtr& t, std::set<VarRef>& out);

// Simultaneous capture-avoiding substitution; binders are renamed to
// `name#k` when a replacement would otherwise capture.
FormulaPtr substitute(const FormulaPtr& f, const SubstMap& map);
TermPtr substitute(const TermPtr& t, const SubstMap& map);

// -- rendering ---------------------------------------------------------------

enum class RenderStyle { Pretty, Raw };

std::string render(const FormulaPtr& f, RenderStyle style = RenderStyle::Pretty);
std::string render(const TermPtr& t, RenderStyle style = RenderStyle::Pretty);

}  // namespace mw
