#include "typecheck.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace mw {

namespace {

struct Checker {
  const Program& prog;
  const TypecheckConfig& cfg;
  std::vector<Diagnostic> diags;
  std::map<std::string, const TheoryFunc*> functions;
  std::map<std::string, const MethodDecl*> methods;

  void diag(Span sp, std::string msg) {
    diags.push_back({sp, std::move(msg), prog.file});
  }

  void check_literal_range(Value v, Span sp) {
    if (v < cfg.min_int || v > cfg.max_int)
      diag(sp, "integer literal " + std::to_string(v) + " outside [MIN_INT, MAX_INT]");
  }

  // ---- theory tables ----

  void collect_globals() {
    std::set<std::string> theory_names;
    for (const auto& th : prog.theories) {
      if (!theory_names.insert(th.name).second)
        diag(th.span, "duplicate theory name '" + th.name + "'");
      for (const auto& fn : th.functions) {
        if (functions.count(fn.name))
          diag(fn.span, "duplicate theory function '" + fn.name + "'");
        else
          functions[fn.name] = &fn;
        for (Sort s : fn.arg_sorts)
          if (s == Sort::Bool)
            diag(fn.span, "BOOL argument sorts are not supported");
      }
    }
    std::set<std::string> axiom_names;
    for (const auto& th : prog.theories)
      for (const auto& ax : th.axioms)
        if (!axiom_names.insert(ax.name).second)
          diag(ax.span, "duplicate axiom name '" + ax.name + "'");
    for (const auto& m : prog.methods) {
      if (methods.count(m.name))
        diag(m.span, "duplicate method name '" + m.name + "'");
      else
        methods[m.name] = &m;
      if (functions.count(m.name))
        diag(m.span, "method '" + m.name + "' shadows a theory symbol");
    }
  }

  // ---- formulas ----

  struct FormulaRules {
    bool allow_pre = true;
    bool allow_result = false;   // post-tagged `result`
    bool allow_any_logical = false;  // free logical vars (axioms are closed, so no)
    const std::set<std::string>* scope = nullptr;  // allowed pre-var names
    const char* where = "";
  };

  void check_term(const TermPtr& t, const FormulaRules& r, std::set<std::string>& bound, Span sp);

  void check_formula(const FormulaPtr& f, const FormulaRules& r, std::set<std::string>& bound,
                     Span sp) {
    switch (f->kind) {
      case Formula::Kind::True:
      case Formula::Kind::False: return;
      case Formula::Kind::Cmp:
        check_term(f->lhs, r, bound, sp);
        check_term(f->rhs, r, bound, sp);
        return;
      case Formula::Kind::Pred: {
        auto it = functions.find(f->fn);
        if (it == functions.end()) {
          diag(sp, std::string(r.where) + ": unknown function '" + f->fn + "'");
        } else {
          if (it->second->result != Sort::Bool)
            diag(sp, std::string(r.where) + ": '" + f->fn + "' is not a predicate");
          if (it->second->arg_sorts.size() != f->targs.size())
            diag(sp, std::string(r.where) + ": '" + f->fn + "' expects " +
                         std::to_string(it->second->arg_sorts.size()) + " arguments, got " +
                         std::to_string(f->targs.size()));
        }
        for (const auto& a : f->targs) check_term(a, r, bound, sp);
        return;
      }
      case Formula::Kind::Forall:
      case Formula::Kind::Exists: {
        std::set<std::string> added;
        for (const auto& b : f->binders) {
          if (functions.count(b.name))
            diag(sp, std::string(r.where) + ": bound variable '" + b.name +
                         "' shadows a theory symbol");
          if (bound.count(b.name))
            diag(sp, std::string(r.where) + ": duplicate bound variable '" + b.name + "'");
          else if (added.insert(b.name).second)
            bound.insert(b.name);
        }
        check_formula(f->body, r, bound, sp);
        for (const auto& b : added) bound.erase(b);
        return;
      }
      default:
        for (const auto& k : f->kids) check_formula(k, r, bound, sp);
        return;
    }
  }

  void check_var(const VarRef& v, const FormulaRules& r, std::set<std::string>& bound, Span sp) {
    switch (v.tag) {
      case VarTag::Pre:
        if (!r.allow_pre) {
          diag(sp, std::string(r.where) + ": state variables are not allowed here");
        } else if (r.scope && !r.scope->count(v.name)) {
          diag(sp, std::string(r.where) + ": undeclared variable '" + v.name + "'");
        }
        return;
      case VarTag::Post:
        if (v.name == kResultVar && r.allow_result) return;
        if (v.name == kResultVar)
          diag(sp, std::string(r.where) + ": 'result' is not allowed here");
        else
          diag(sp, std::string(r.where) + ": post-state variable '" + v.name +
                       "' is not allowed here");
        return;
      case VarTag::Logical:
        if (!bound.count(v.name) && !r.allow_any_logical)
          diag(sp, std::string(r.where) + ": unbound variable '" + v.name + "'");
        return;
    }
  }

  void check_app_sorts(const TermPtr& t, const FormulaRules& r, Span sp) {
    auto it = functions.find(t->fn);
    if (it == functions.end()) {
      diag(sp, std::string(r.where) + ": unknown function '" + t->fn + "'");
      return;
    }
    if (it->second->result != Sort::Int)
      diag(sp, std::string(r.where) + ": predicate '" + t->fn + "' used as a term");
    if (it->second->arg_sorts.size() != t->args.size())
      diag(sp, std::string(r.where) + ": '" + t->fn + "' expects " +
                   std::to_string(it->second->arg_sorts.size()) + " arguments, got " +
                   std::to_string(t->args.size()));
  }

  // ---- commands and expressions ----

  enum class ESort { Int, Bool };

  struct MethodScope {
    const MethodDecl* method = nullptr;
    std::set<std::string> vars;  // declared program variables (params + locals in scope)
  };

  ESort check_expr(const ExprPtr& e, const MethodScope& ms) {
    switch (e->kind) {
      case Expr::Kind::IntLit:
        check_literal_range(e->value, e->span);
        return ESort::Int;
      case Expr::Kind::MinInt:
      case Expr::Kind::MaxInt:
        return ESort::Int;
      case Expr::Kind::Var:
        if (!ms.vars.count(e->name))
          diag(e->span, "undeclared variable '" + e->name + "'");
        return ESort::Int;
      case Expr::Kind::Neg:
        if (check_expr(e->lhs, ms) != ESort::Int)
          diag(e->span, "'-' expects an integer operand");
        return ESort::Int;
      case Expr::Kind::Not:
        if (check_expr(e->lhs, ms) != ESort::Bool)
          diag(e->span, "'!' expects a boolean operand");
        return ESort::Bool;
      default: {
        ESort l = check_expr(e->lhs, ms);
        ESort r = check_expr(e->rhs, ms);
        switch (e->op) {
          case Expr::Op::And:
          case Expr::Op::Or:
            if (l != ESort::Bool || r != ESort::Bool)
              diag(e->span, "boolean operator applied to integer operands");
            return ESort::Bool;
          case Expr::Op::Eq:
          case Expr::Op::Ne:
          case Expr::Op::Lt:
          case Expr::Op::Le:
          case Expr::Op::Gt:
          case Expr::Op::Ge:
            if (l != ESort::Int || r != ESort::Int)
              diag(e->span, "comparison applied to boolean operands");
            return ESort::Bool;
          default:
            if (l != ESort::Int || r != ESort::Int)
              diag(e->span, "arithmetic applied to boolean operands");
            return ESort::Int;
        }
      }
    }
  }

  void check_assign_target(const std::string& var, const MethodDecl& m,
                           const MethodScope& ms, Span sp) {
    if (!ms.vars.count(var)) {
      diag(sp, "undeclared variable '" + var + "'");
      return;
    }
    bool is_param = std::find(m.params.begin(), m.params.end(), var) != m.params.end();
    if (is_param && !m.contract.assignable.count(var))
      diag(sp, "parameter '" + var + "' is assigned but not listed in assignable");
  }

  void check_command(const CommandPtr& c, const MethodDecl& m, MethodScope ms) {
    switch (c->kind) {
      case Command::Kind::Assign: {
        check_assign_target(c->var, m, ms, c->span);
        if (check_expr(c->expr, ms) != ESort::Int)
          diag(c->expr->span, "assigned expression must be an integer");
        return;
      }
      case Command::Kind::Call: {
        check_assign_target(c->var, m, ms, c->span);
        auto it = methods.find(c->callee);
        if (it == methods.end()) {
          diag(c->span, "call to unknown method '" + c->callee + "'");
        } else if (it->second->params.size() != c->args.size()) {
          diag(c->span, "method '" + c->callee + "' expects " +
                            std::to_string(it->second->params.size()) + " arguments, got " +
                            std::to_string(c->args.size()));
        }
        for (const auto& a : c->args)
          if (check_expr(a, ms) != ESort::Int)
            diag(a->span, "method arguments must be integers");
        return;
      }
      case Command::Kind::Return:
        if (check_expr(c->expr, ms) != ESort::Int)
          diag(c->expr->span, "returned expression must be an integer");
        return;
      case Command::Kind::VarBlock: {
        if (ms.vars.count(c->var))
          diag(c->span, "variable '" + c->var + "' shadows an existing declaration");
        else if (functions.count(c->var))
          diag(c->span, "variable '" + c->var + "' shadows a theory symbol");
        ms.vars.insert(c->var);
        check_command(c->c1, m, ms);
        return;
      }
      case Command::Kind::Seq:
        check_command(c->c1, m, ms);
        check_command(c->c2, m, ms);
        return;
      case Command::Kind::IfThen:
      case Command::Kind::IfThenElse: {
        if (check_expr(c->expr, ms) != ESort::Bool)
          diag(c->expr->span, "condition must be boolean");
        check_command(c->c1, m, ms);
        if (c->c2) check_command(c->c2, m, ms);
        return;
      }
      case Command::Kind::While: {
        if (check_expr(c->expr, ms) != ESort::Bool)
          diag(c->expr->span, "condition must be boolean");
        FormulaRules rules;
        rules.scope = &ms.vars;
        rules.where = "invariant";
        std::set<std::string> bound;
        check_formula(c->invariant, rules, bound, c->span);
        rules.where = "decreases";
        check_term(c->measure, rules, bound, c->span);
        check_command(c->c1, m, ms);
        return;
      }
    }
  }

  // Every return must be the final statement of the method body.
  void check_returns(const MethodDecl& m) {
    const Command* tail = m.body.get();
    while (true) {
      if (tail->kind == Command::Kind::Seq) tail = tail->c2.get();
      else if (tail->kind == Command::Kind::VarBlock) tail = tail->c1.get();
      else break;
    }
    if (tail->kind != Command::Kind::Return)
      diag(m.span, "method '" + m.name + "' must end in a return statement");
    std::function<void(const CommandPtr&, bool)> walk = [&](const CommandPtr& c, bool is_tail) {
      switch (c->kind) {
        case Command::Kind::Return:
          if (!is_tail)
            diag(c->span, "return is only allowed as the final statement of the method body");
          return;
        case Command::Kind::Seq:
          walk(c->c1, false);
          walk(c->c2, is_tail);
          return;
        case Command::Kind::VarBlock:
          walk(c->c1, is_tail);
          return;
        case Command::Kind::IfThen:
        case Command::Kind::IfThenElse:
        case Command::Kind::While:
          walk(c->c1, false);
          if (c->c2) walk(c->c2, false);
          return;
        default:
          return;
      }
    };
    walk(m.body, true);
  }

  void check_method(const MethodDecl& m) {
    MethodScope ms;
    ms.method = &m;
    std::set<std::string> param_set;
    for (const auto& p : m.params) {
      if (!param_set.insert(p).second)
        diag(m.span, "duplicate parameter '" + p + "'");
      if (functions.count(p))
        diag(m.span, "parameter '" + p + "' shadows a theory symbol");
    }
    ms.vars = param_set;

    FormulaRules rules;
    rules.scope = &param_set;
    std::set<std::string> bound;
    rules.where = "requires";
    check_formula(m.contract.requires_f, rules, bound, m.contract.span);
    rules.where = "diverges";
    check_formula(m.contract.diverges_f, rules, bound, m.contract.span);
    rules.where = "ensures";
    rules.allow_result = true;
    check_formula(m.contract.ensures_f, rules, bound, m.contract.span);

    for (const auto& a : m.contract.assignable)
      if (!param_set.count(a))
        diag(m.contract.span, "assignable lists '" + a + "' which is not a parameter");

    for (const auto& ex : m.contract.examples) {
      std::set<std::string> seen;
      for (const auto& [name, value] : ex.inputs) {
        if (!param_set.count(name))
          diag(ex.span, "example input '" + name + "' is not a parameter");
        if (!seen.insert(name).second)
          diag(ex.span, "example assigns '" + name + "' twice");
        check_literal_range(value, ex.span);
      }
      for (const auto& p : m.params)
        if (!seen.count(p))
          diag(ex.span, "example does not assign parameter '" + p + "'");
      check_literal_range(ex.output, ex.span);
    }

    check_command(m.body, m, ms);
    check_returns(m);
  }

  void check_axioms() {
    for (const auto& th : prog.theories) {
      for (const auto& ax : th.axioms) {
        FormulaRules rules;
        rules.allow_pre = false;
        rules.where = "axiom";
        std::set<std::string> bound;
        check_formula(ax.formula, rules, bound, ax.span);
      }
    }
  }

  void check_call_graph() {
    // DFS for cycles; recursion between methods is not supported.
    std::map<std::string, std::vector<std::string>> edges;
    std::function<void(const CommandPtr&, std::vector<std::string>&)> collect =
        [&](const CommandPtr& c, std::vector<std::string>& out) {
          if (c->kind == Command::Kind::Call) out.push_back(c->callee);
          if (c->c1) collect(c->c1, out);
          if (c->c2) collect(c->c2, out);
        };
    for (const auto& m : prog.methods) collect(m.body, edges[m.name]);
    std::set<std::string> done, onstack;
    std::function<bool(const std::string&)> dfs = [&](const std::string& n) -> bool {
      if (onstack.count(n)) return true;
      if (done.count(n)) return false;
      onstack.insert(n);
      for (const auto& next : edges[n])
        if (edges.count(next) && dfs(next)) return true;
      onstack.erase(n);
      done.insert(n);
      return false;
    };
    for (const auto& m : prog.methods) {
      onstack.clear();
      if (dfs(m.name)) {
        diag(m.span, "recursive method calls are not supported ('" + m.name + "')");
        break;
      }
    }
  }

  std::vector<Diagnostic> run() {
    collect_globals();
    check_axioms();
    for (const auto& m : prog.methods) check_method(m);
    check_call_graph();
    std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
      if (a.span.line != b.span.line) return a.span.line < b.span.line;
      if (a.span.col != b.span.col) return a.span.col < b.span.col;
      return a.message < b.message;
    });
    return diags;
  }
};

void Checker::check_term(const TermPtr& t, const FormulaRules& r, std::set<std::string>& bound,
                         Span sp) {
  switch (t->kind) {
    case Term::Kind::IntLit:
      check_literal_range(t->value, sp);
      return;
    case Term::Kind::Var:
      check_var(t->var, r, bound, sp);
      return;
    case Term::Kind::MinInt:
    case Term::Kind::MaxInt:
      return;
    case Term::Kind::Ite:
      check_formula(t->cond, r, bound, sp);
      check_term(t->args[0], r, bound, sp);
      check_term(t->args[1], r, bound, sp);
      return;
    case Term::Kind::App:
      check_app_sorts(t, r, sp);
      for (const auto& a : t->args) check_term(a, r, bound, sp);
      return;
    default:
      for (const auto& a : t->args) check_term(a, r, bound, sp);
      return;
  }
}

}  // namespace

std::vector<Diagnostic> typecheck(const Program& p, const TypecheckConfig& cfg) {
  Checker c{p, cfg, {}, {}, {}};
  return c.run();
}

}  // namespace mw
