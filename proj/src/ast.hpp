#pragma once

#include "formula.hpp"
#include "span.hpp"

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace mw {

// -- expressions -------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { IntLit, Var, MinInt, MaxInt, Neg, Not, Bin };
  enum class Op { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
  Kind kind = Kind::IntLit;
  Op op = Op::Add;    // Bin
  Value value = 0;    // IntLit
  std::string name;   // Var
  ExprPtr lhs, rhs;   // Bin; Neg/Not use lhs
  Span span;
};

ExprPtr e_int(Value v, Span s = {});
ExprPtr e_var(std::string name, Span s = {});
ExprPtr e_min_int(Span s = {});
ExprPtr e_max_int(Span s = {});
ExprPtr e_neg(ExprPtr a, Span s = {});
ExprPtr e_not(ExprPtr a, Span s = {});
ExprPtr e_bin(Expr::Op op, ExprPtr a, ExprPtr b, Span s = {});

// -- commands ------------------------------------------------------------

struct Command;
using CommandPtr = std::shared_ptr<const Command>;

struct Command {
  enum class Kind { Assign, VarBlock, Seq, IfThen, IfThenElse, While, Call, Return };
  Kind kind = Kind::Assign;
  std::string var;               // Assign/Call target, VarBlock name
  ExprPtr expr;                  // Assign rhs, If/While condition, Return value
  CommandPtr c1, c2;             // children (VarBlock/While body in c1)
  FormulaPtr invariant;          // While
  TermPtr measure;               // While
  std::string callee;            // Call
  std::vector<ExprPtr> args;     // Call
  Span span;
};

CommandPtr c_assign(std::string var, ExprPtr e, Span s = {});
CommandPtr c_varblock(std::string var, CommandPtr body, Span s = {});
CommandPtr c_seq(CommandPtr a, CommandPtr b, Span s = {});
CommandPtr c_if(ExprPtr cond, CommandPtr then, Span s = {});
CommandPtr c_ifelse(ExprPtr cond, CommandPtr then, CommandPtr els, Span s = {});
CommandPtr c_while(ExprPtr cond, FormulaPtr inv, TermPtr measure, CommandPtr body, Span s = {});
CommandPtr c_call(std::string target, std::string callee, std::vector<ExprPtr> args, Span s = {});
CommandPtr c_return(ExprPtr e, Span s = {});

// -- declarations --------------------------------------------------------

// Concrete input/output checks attached to a contract:
//   example input n = 3 output result = 6;      (positive)
//   counterexample input n = 3 output result = 5;  (negative)
struct SpecExample {
  bool positive = true;
  std::vector<std::pair<std::string, Value>> inputs;
  Value output = 0;
  Span span;
};

struct Contract {
  FormulaPtr requires_f;   // pre-state only
  FormulaPtr ensures_f;    // pre-state + result
  FormulaPtr diverges_f;   // pre-state only, defaults to FALSE
  std::set<std::string> assignable;
  std::vector<SpecExample> examples;
  Span span;
};

struct MethodDecl {
  std::string name;
  std::vector<std::string> params;
  Contract contract;
  CommandPtr body;
  Span span;
};

enum class Sort { Int, Bool };

struct TheoryFunc {
  std::string name;
  std::vector<Sort> arg_sorts;
  Sort result = Sort::Int;
  Span span;
};

struct TheoryAxiom {
  std::string name;
  FormulaPtr formula;  // closed
  Span span;
};

struct TheoryDecl {
  std::string name;
  std::vector<TheoryFunc> functions;
  std::vector<TheoryAxiom> axioms;
  Span span;
};

struct Program {
  std::vector<TheoryDecl> theories;
  std::vector<MethodDecl> methods;
  std::string file;

  const MethodDecl* find_method(const std::string& name) const;
  const TheoryFunc* find_function(const std::string& name) const;
};

// The reserved name bound to a method's return value.
inline const std::string kResultVar = "result";

// Canonical source form; parse(render_program(p)) reproduces the AST.
std::string render_program(const Program& p);
std::string render_expr(const ExprPtr& e);

// Structural equality, spans ignored.
bool equal(const ExprPtr& a, const ExprPtr& b);
bool equal(const CommandPtr& a, const CommandPtr& b);
bool equal_program(const Program& a, const Program& b);

}  // namespace mw
