#include "ast.hpp"

#include <sstream>

namespace mw {

namespace {
std::shared_ptr<Expr> mk_expr(Expr::Kind k, Span s) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->span = s;
  return e;
}
std::shared_ptr<Command> mk_cmd(Command::Kind k, Span s) {
  auto c = std::make_shared<Command>();
  c->kind = k;
  c->span = s;
  return c;
}
}  // namespace

ExprPtr e_int(Value v, Span s) {
  auto e = mk_expr(Expr::Kind::IntLit, s);
  e->value = v;
  return e;
}
ExprPtr e_var(std::string name, Span s) {
  auto e = mk_expr(Expr::Kind::Var, s);
  e->name = std::move(name);
  return e;
}
ExprPtr e_min_int(Span s) { return mk_expr(Expr::Kind::MinInt, s); }
ExprPtr e_max_int(Span s) { return mk_expr(Expr::Kind::MaxInt, s); }
ExprPtr e_neg(ExprPtr a, Span s) {
  auto e = mk_expr(Expr::Kind::Neg, s);
  e->lhs = std::move(a);
  return e;
}
ExprPtr e_not(ExprPtr a, Span s) {
  auto e = mk_expr(Expr::Kind::Not, s);
  e->lhs = std::move(a);
  return e;
}
ExprPtr e_bin(Expr::Op op, ExprPtr a, ExprPtr b, Span s) {
  auto e = mk_expr(Expr::Kind::Bin, s);
  e->op = op;
  e->lhs = std::move(a);
  e->rhs = std::move(b);
  return e;
}

CommandPtr c_assign(std::string var, ExprPtr e, Span s) {
  auto c = mk_cmd(Command::Kind::Assign, s);
  c->var = std::move(var);
  c->expr = std::move(e);
  return c;
}
CommandPtr c_varblock(std::string var, CommandPtr body, Span s) {
  auto c = mk_cmd(Command::Kind::VarBlock, s);
  c->var = std::move(var);
  c->c1 = std::move(body);
  return c;
}
CommandPtr c_seq(CommandPtr a, CommandPtr b, Span s) {
  auto c = mk_cmd(Command::Kind::Seq, s);
  c->c1 = std::move(a);
  c->c2 = std::move(b);
  return c;
}
CommandPtr c_if(ExprPtr cond, CommandPtr then, Span s) {
  auto c = mk_cmd(Command::Kind::IfThen, s);
  c->expr = std::move(cond);
  c->c1 = std::move(then);
  return c;
}
CommandPtr c_ifelse(ExprPtr cond, CommandPtr then, CommandPtr els, Span s) {
  auto c = mk_cmd(Command::Kind::IfThenElse, s);
  c->expr = std::move(cond);
  c->c1 = std::move(then);
  c->c2 = std::move(els);
  return c;
}
CommandPtr c_while(ExprPtr cond, FormulaPtr inv, TermPtr measure, CommandPtr body, Span s) {
  auto c = mk_cmd(Command::Kind::While, s);
  c->expr = std::move(cond);
  c->invariant = std::move(inv);
  c->measure = std::move(measure);
  c->c1 = std::move(body);
  return c;
}
CommandPtr c_call(std::string target, std::string callee, std::vector<ExprPtr> args, Span s) {
  auto c = mk_cmd(Command::Kind::Call, s);
  c->var = std::move(target);
  c->callee = std::move(callee);
  c->args = std::move(args);
  return c;
}
CommandPtr c_return(ExprPtr e, Span s) {
  auto c = mk_cmd(Command::Kind::Return, s);
  c->expr = std::move(e);
  return c;
}

const MethodDecl* Program::find_method(const std::string& name) const {
  for (const auto& m : methods)
    if (m.name == name) return &m;
  return nullptr;
}

const TheoryFunc* Program::find_function(const std::string& name) const {
  for (const auto& t : theories)
    for (const auto& f : t.functions)
      if (f.name == name) return &f;
  return nullptr;
}

// -- equality ------------------------------------------------------------

bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::IntLit: return a->value == b->value;
    case Expr::Kind::Var: return a->name == b->name;
    case Expr::Kind::MinInt:
    case Expr::Kind::MaxInt: return true;
    case Expr::Kind::Neg:
    case Expr::Kind::Not: return equal(a->lhs, b->lhs);
    default:
      return a->op == b->op && equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
  }
}

bool equal(const CommandPtr& a, const CommandPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Command::Kind::Assign:
      return a->var == b->var && equal(a->expr, b->expr);
    case Command::Kind::VarBlock:
      return a->var == b->var && equal(a->c1, b->c1);
    case Command::Kind::Seq:
      return equal(a->c1, b->c1) && equal(a->c2, b->c2);
    case Command::Kind::IfThen:
      return equal(a->expr, b->expr) && equal(a->c1, b->c1);
    case Command::Kind::IfThenElse:
      return equal(a->expr, b->expr) && equal(a->c1, b->c1) && equal(a->c2, b->c2);
    case Command::Kind::While:
      return equal(a->expr, b->expr) && equal(a->invariant, b->invariant) &&
             equal(a->measure, b->measure) && equal(a->c1, b->c1);
    case Command::Kind::Call: {
      if (a->var != b->var || a->callee != b->callee || a->args.size() != b->args.size())
        return false;
      for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!equal(a->args[i], b->args[i])) return false;
      return true;
    }
    default:
      return equal(a->expr, b->expr);
  }
}

bool equal_program(const Program& a, const Program& b) {
  if (a.theories.size() != b.theories.size() || a.methods.size() != b.methods.size())
    return false;
  for (std::size_t i = 0; i < a.theories.size(); ++i) {
    const auto& x = a.theories[i];
    const auto& y = b.theories[i];
    if (x.name != y.name || x.functions.size() != y.functions.size() ||
        x.axioms.size() != y.axioms.size())
      return false;
    for (std::size_t k = 0; k < x.functions.size(); ++k) {
      if (x.functions[k].name != y.functions[k].name ||
          x.functions[k].arg_sorts != y.functions[k].arg_sorts ||
          x.functions[k].result != y.functions[k].result)
        return false;
    }
    for (std::size_t k = 0; k < x.axioms.size(); ++k)
      if (x.axioms[k].name != y.axioms[k].name || !equal(x.axioms[k].formula, y.axioms[k].formula))
        return false;
  }
  for (std::size_t i = 0; i < a.methods.size(); ++i) {
    const auto& x = a.methods[i];
    const auto& y = b.methods[i];
    if (x.name != y.name || x.params != y.params) return false;
    if (!equal(x.contract.requires_f, y.contract.requires_f)) return false;
    if (!equal(x.contract.ensures_f, y.contract.ensures_f)) return false;
    if (!equal(x.contract.diverges_f, y.contract.diverges_f)) return false;
    if (x.contract.assignable != y.contract.assignable) return false;
    if (x.contract.examples.size() != y.contract.examples.size()) return false;
    for (std::size_t k = 0; k < x.contract.examples.size(); ++k) {
      const auto& p = x.contract.examples[k];
      const auto& q = y.contract.examples[k];
      if (p.positive != q.positive || p.inputs != q.inputs || p.output != q.output) return false;
    }
    if (!equal(x.body, y.body)) return false;
  }
  return true;
}

// -- rendering -----------------------------------------------------------

namespace {

// Program expressions use C-style operators.
int expr_prec(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Bin:
      switch (e.op) {
        case Expr::Op::Or: return 1;
        case Expr::Op::And: return 2;
        case Expr::Op::Eq:
        case Expr::Op::Ne:
        case Expr::Op::Lt:
        case Expr::Op::Le:
        case Expr::Op::Gt:
        case Expr::Op::Ge: return 3;
        case Expr::Op::Add:
        case Expr::Op::Sub: return 4;
        default: return 5;
      }
    case Expr::Kind::Neg:
    case Expr::Kind::Not: return 6;
    default: return 7;
  }
}

const char* op_str(Expr::Op op) {
  switch (op) {
    case Expr::Op::Add: return "+";
    case Expr::Op::Sub: return "-";
    case Expr::Op::Mul: return "*";
    case Expr::Op::Div: return "/";
    case Expr::Op::Mod: return "%";
    case Expr::Op::Eq: return "==";
    case Expr::Op::Ne: return "!=";
    case Expr::Op::Lt: return "<";
    case Expr::Op::Le: return "<=";
    case Expr::Op::Gt: return ">";
    case Expr::Op::Ge: return ">=";
    case Expr::Op::And: return "&&";
    default: return "||";
  }
}

void render_expr_rec(std::ostream& out, const ExprPtr& e, int parent_prec) {
  int prec = expr_prec(*e);
  bool paren = prec < parent_prec;
  switch (e->kind) {
    case Expr::Kind::IntLit: out << e->value; return;
    case Expr::Kind::Var: out << e->name; return;
    case Expr::Kind::MinInt: out << "MIN_INT"; return;
    case Expr::Kind::MaxInt: out << "MAX_INT"; return;
    case Expr::Kind::Neg:
      if (paren) out << "(";
      out << "-";
      render_expr_rec(out, e->lhs, prec + 1);
      if (paren) out << ")";
      return;
    case Expr::Kind::Not:
      if (paren) out << "(";
      out << "!";
      render_expr_rec(out, e->lhs, prec + 1);
      if (paren) out << ")";
      return;
    default:
      if (paren) out << "(";
      render_expr_rec(out, e->lhs, prec);
      out << " " << op_str(e->op) << " ";
      render_expr_rec(out, e->rhs, prec + 1);
      if (paren) out << ")";
      return;
  }
}

void indent(std::ostream& out, int n) {
  for (int i = 0; i < n; ++i) out << "  ";
}

void render_cmd(std::ostream& out, const CommandPtr& c, int depth);

// Renders a command as the body of a block, flattening sequences.
void render_block_items(std::ostream& out, const CommandPtr& c, int depth) {
  if (c->kind == Command::Kind::Seq) {
    render_block_items(out, c->c1, depth);
    render_block_items(out, c->c2, depth);
  } else if (c->kind == Command::Kind::VarBlock) {
    indent(out, depth);
    out << "var " << c->var << ";\n";
    render_block_items(out, c->c1, depth);
  } else {
    render_cmd(out, c, depth);
  }
}

void render_braced(std::ostream& out, const CommandPtr& c, int depth) {
  out << "{\n";
  render_block_items(out, c, depth + 1);
  indent(out, depth);
  out << "}";
}

void render_cmd(std::ostream& out, const CommandPtr& c, int depth) {
  switch (c->kind) {
    case Command::Kind::Assign:
      indent(out, depth);
      out << c->var << " = ";
      render_expr_rec(out, c->expr, 0);
      out << ";\n";
      return;
    case Command::Kind::Call: {
      indent(out, depth);
      out << c->var << " = " << c->callee << "(";
      for (std::size_t i = 0; i < c->args.size(); ++i) {
        if (i) out << ", ";
        render_expr_rec(out, c->args[i], 0);
      }
      out << ");\n";
      return;
    }
    case Command::Kind::Return:
      indent(out, depth);
      out << "return ";
      render_expr_rec(out, c->expr, 0);
      out << ";\n";
      return;
    case Command::Kind::IfThen:
      indent(out, depth);
      out << "if (";
      render_expr_rec(out, c->expr, 0);
      out << ") ";
      render_braced(out, c->c1, depth);
      out << "\n";
      return;
    case Command::Kind::IfThenElse:
      indent(out, depth);
      out << "if (";
      render_expr_rec(out, c->expr, 0);
      out << ") ";
      render_braced(out, c->c1, depth);
      out << " else ";
      render_braced(out, c->c2, depth);
      out << "\n";
      return;
    case Command::Kind::While:
      indent(out, depth);
      out << "while (";
      render_expr_rec(out, c->expr, 0);
      out << ") /*@\n";
      indent(out, depth + 1);
      out << "invariant " << render(c->invariant) << ";\n";
      indent(out, depth + 1);
      out << "decreases " << render(c->measure) << ";\n";
      indent(out, depth);
      out << "@*/ ";
      render_braced(out, c->c1, depth);
      out << "\n";
      return;
    case Command::Kind::VarBlock:
    case Command::Kind::Seq:
      // blocks are introduced by the callers above
      indent(out, depth);
      render_braced(out, c, depth);
      out << "\n";
      return;
  }
}

const char* sort_str(Sort s) { return s == Sort::Int ? "INT" : "BOOL"; }

// Pre-tagged variables render as bare names inside contract clauses; the
// result post-variable renders as `result`.
std::string render_contract_formula(const FormulaPtr& f) {
  std::set<VarRef> free = free_vars(f);
  SubstMap map;
  for (const auto& v : free) {
    if (v.tag == VarTag::Pre) map[v] = t_var(log_var(v.name));
    if (v.tag == VarTag::Post && v.name == kResultVar) map[v] = t_var(log_var(kResultVar));
  }
  return render(substitute(f, map));
}

std::string render_contract_term(const TermPtr& t) {
  std::set<VarRef> free = free_vars(t);
  SubstMap map;
  for (const auto& v : free)
    if (v.tag == VarTag::Pre) map[v] = t_var(log_var(v.name));
  return render(substitute(t, map));
}

}  // namespace

std::string render_expr(const ExprPtr& e) {
  std::ostringstream out;
  render_expr_rec(out, e, 0);
  return out.str();
}

std::string render_program(const Program& p) {
  std::ostringstream out;
  for (const auto& th : p.theories) {
    out << "theory";
    if (!th.name.empty() && th.name.find('#') == std::string::npos) out << " " << th.name;
    out << " {\n";
    for (const auto& fn : th.functions) {
      out << "  " << fn.name << ": (";
      for (std::size_t i = 0; i < fn.arg_sorts.size(); ++i) {
        if (i) out << ", ";
        out << sort_str(fn.arg_sorts[i]);
      }
      out << ") -> " << sort_str(fn.result) << ";\n";
    }
    for (const auto& ax : th.axioms)
      out << "  " << ax.name << ": AXIOM " << render(ax.formula) << ";\n";
    out << "}\n\n";
  }
  for (const auto& m : p.methods) {
    out << "method " << m.name << "(";
    for (std::size_t i = 0; i < m.params.size(); ++i) {
      if (i) out << ", ";
      out << m.params[i];
    }
    out << ") /*@\n";
    const auto& c = m.contract;
    if (!is_true(c.requires_f))
      out << "  requires " << render_contract_formula(c.requires_f) << ";\n";
    out << "  ensures " << render_contract_formula(c.ensures_f) << ";\n";
    if (!is_false(c.diverges_f))
      out << "  diverges " << render_contract_formula(c.diverges_f) << ";\n";
    if (!c.assignable.empty()) {
      out << "  assignable ";
      bool first = true;
      for (const auto& v : c.assignable) {
        if (!first) out << ", ";
        out << v;
        first = false;
      }
      out << ";\n";
    }
    for (const auto& ex : c.examples) {
      out << "  " << (ex.positive ? "example" : "counterexample") << " input ";
      for (std::size_t i = 0; i < ex.inputs.size(); ++i) {
        if (i) out << ", ";
        out << ex.inputs[i].first << " = " << ex.inputs[i].second;
      }
      out << " output " << kResultVar << " = " << ex.output << ";\n";
    }
    out << "@*/\n";
    render_braced(out, m.body, 0);
    out << "\n\n";
  }
  return out.str();
}

}  // namespace mw
