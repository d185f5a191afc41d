#include "formula.hpp"

#include <cassert>
#include <sstream>

namespace mw {

namespace {
std::shared_ptr<Term> mk_term(Term::Kind k) {
  auto t = std::make_shared<Term>();
  t->kind = k;
  return t;
}
std::shared_ptr<Formula> mk_formula(Formula::Kind k) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  return f;
}
}  // namespace

TermPtr t_int(Value v) {
  auto t = mk_term(Term::Kind::IntLit);
  t->value = v;
  return t;
}

TermPtr t_var(VarRef v) {
  auto t = mk_term(Term::Kind::Var);
  t->var = std::move(v);
  return t;
}

TermPtr t_min_int() { return mk_term(Term::Kind::MinInt); }
TermPtr t_max_int() { return mk_term(Term::Kind::MaxInt); }

TermPtr t_neg(TermPtr a) {
  // negative literals are literals; "--4" never renders
  if (a->kind == Term::Kind::IntLit) return t_int(-a->value);
  auto t = mk_term(Term::Kind::Neg);
  t->args = {std::move(a)};
  return t;
}

TermPtr t_bin(Term::Kind op, TermPtr a, TermPtr b) {
  auto t = mk_term(op);
  t->args = {std::move(a), std::move(b)};
  return t;
}

TermPtr t_add(TermPtr a, TermPtr b) { return t_bin(Term::Kind::Add, std::move(a), std::move(b)); }
TermPtr t_sub(TermPtr a, TermPtr b) { return t_bin(Term::Kind::Sub, std::move(a), std::move(b)); }
TermPtr t_mul(TermPtr a, TermPtr b) { return t_bin(Term::Kind::Mul, std::move(a), std::move(b)); }
TermPtr t_div(TermPtr a, TermPtr b) { return t_bin(Term::Kind::Div, std::move(a), std::move(b)); }
TermPtr t_mod(TermPtr a, TermPtr b) { return t_bin(Term::Kind::Mod, std::move(a), std::move(b)); }

TermPtr t_ite(FormulaPtr c, TermPtr a, TermPtr b) {
  auto t = mk_term(Term::Kind::Ite);
  t->cond = std::move(c);
  t->args = {std::move(a), std::move(b)};
  return t;
}

TermPtr t_app(std::string fn, std::vector<TermPtr> args) {
  auto t = mk_term(Term::Kind::App);
  t->fn = std::move(fn);
  t->args = std::move(args);
  return t;
}

FormulaPtr f_true() {
  static const FormulaPtr t = mk_formula(Formula::Kind::True);
  return t;
}

FormulaPtr f_false() {
  static const FormulaPtr f = mk_formula(Formula::Kind::False);
  return f;
}

FormulaPtr f_bool(bool b) { return b ? f_true() : f_false(); }

FormulaPtr f_cmp(CmpOp op, TermPtr a, TermPtr b) {
  auto f = mk_formula(Formula::Kind::Cmp);
  f->cmp = op;
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}

FormulaPtr f_eq(TermPtr a, TermPtr b) { return f_cmp(CmpOp::Eq, std::move(a), std::move(b)); }

FormulaPtr f_pred(std::string fn, std::vector<TermPtr> args) {
  auto f = mk_formula(Formula::Kind::Pred);
  f->fn = std::move(fn);
  f->targs = std::move(args);
  return f;
}

FormulaPtr f_not(FormulaPtr a) {
  auto f = mk_formula(Formula::Kind::Not);
  f->kids = {std::move(a)};
  return f;
}

FormulaPtr f_and(FormulaPtr a, FormulaPtr b) { return f_and({std::move(a), std::move(b)}); }

FormulaPtr f_and(std::vector<FormulaPtr> kids) {
  if (kids.size() == 1) return kids[0];
  auto f = mk_formula(Formula::Kind::And);
  f->kids = std::move(kids);
  return f;
}

FormulaPtr f_or(FormulaPtr a, FormulaPtr b) { return f_or({std::move(a), std::move(b)}); }

FormulaPtr f_or(std::vector<FormulaPtr> kids) {
  if (kids.size() == 1) return kids[0];
  auto f = mk_formula(Formula::Kind::Or);
  f->kids = std::move(kids);
  return f;
}

FormulaPtr f_implies(FormulaPtr a, FormulaPtr b) {
  auto f = mk_formula(Formula::Kind::Implies);
  f->kids = {std::move(a), std::move(b)};
  return f;
}

FormulaPtr f_iff(FormulaPtr a, FormulaPtr b) {
  auto f = mk_formula(Formula::Kind::Iff);
  f->kids = {std::move(a), std::move(b)};
  return f;
}

FormulaPtr f_ite(FormulaPtr c, FormulaPtr a, FormulaPtr b) {
  auto f = mk_formula(Formula::Kind::Ite);
  f->kids = {std::move(c), std::move(a), std::move(b)};
  return f;
}

FormulaPtr f_forall(std::vector<VarRef> binders, FormulaPtr body) {
  if (binders.empty()) return body;
  auto f = mk_formula(Formula::Kind::Forall);
  f->binders = std::move(binders);
  f->body = std::move(body);
  return f;
}

FormulaPtr f_exists(std::vector<VarRef> binders, FormulaPtr body) {
  if (binders.empty()) return body;
  auto f = mk_formula(Formula::Kind::Exists);
  f->binders = std::move(binders);
  f->body = std::move(body);
  return f;
}

bool is_true(const FormulaPtr& f) { return f && f->kind == Formula::Kind::True; }
bool is_false(const FormulaPtr& f) { return f && f->kind == Formula::Kind::False; }

FormulaPtr conj(FormulaPtr a, FormulaPtr b) {
  if (is_true(a)) return b;
  if (is_true(b)) return a;
  return f_and(std::move(a), std::move(b));
}

FormulaPtr conj_all(const std::vector<FormulaPtr>& fs) {
  FormulaPtr acc = f_true();
  for (const auto& f : fs) acc = conj(acc, f);
  return acc;
}

FormulaPtr impl(FormulaPtr a, FormulaPtr b) {
  if (is_true(b)) return f_true();
  if (is_true(a)) return b;
  return f_implies(std::move(a), std::move(b));
}

// -- equality ----------------------------------------------------------------

bool equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Term::Kind::IntLit: return a->value == b->value;
    case Term::Kind::Var: return a->var == b->var;
    case Term::Kind::MinInt:
    case Term::Kind::MaxInt: return true;
    case Term::Kind::App:
      if (a->fn != b->fn) return false;
      break;
    case Term::Kind::Ite:
      if (!equal(a->cond, b->cond)) return false;
      break;
    default: break;
  }
  if (a->args.size() != b->args.size()) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!equal(a->args[i], b->args[i])) return false;
  return true;
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Formula::Kind::True:
    case Formula::Kind::False: return true;
    case Formula::Kind::Cmp:
      return a->cmp == b->cmp && equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
    case Formula::Kind::Pred: {
      if (a->fn != b->fn || a->targs.size() != b->targs.size()) return false;
      for (std::size_t i = 0; i < a->targs.size(); ++i)
        if (!equal(a->targs[i], b->targs[i])) return false;
      return true;
    }
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return a->binders == b->binders && equal(a->body, b->body);
    default: {
      if (a->kids.size() != b->kids.size()) return false;
      for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (!equal(a->kids[i], b->kids[i])) return false;
      return true;
    }
  }
}

std::size_t node_count(const TermPtr& t) {
  if (!t) return 0;
  std::size_t n = 1;
  if (t->cond) n += node_count(t->cond);
  for (const auto& a : t->args) n += node_count(a);
  return n;
}

std::size_t node_count(const FormulaPtr& f) {
  if (!f) return 0;
  std::size_t n = 1;
  n += node_count(f->lhs);
  n += node_count(f->rhs);
  for (const auto& t : f->targs) n += node_count(t);
  for (const auto& k : f->kids) n += node_count(k);
  n += node_count(f->body);
  return n;
}

// -- free variables ----------------------------------------------------------

namespace {
void collect_term(const TermPtr& t, const std::set<VarRef>& bound, std::set<VarRef>& out) {
  if (!t) return;
  if (t->kind == Term::Kind::Var) {
    if (!bound.count(t->var)) out.insert(t->var);
    return;
  }
  if (t->cond) {
    // formula condition of a conditional term
    std::set<VarRef> f = free_vars(t->cond);
    for (const auto& v : f)
      if (!bound.count(v)) out.insert(v);
  }
  for (const auto& a : t->args) collect_term(a, bound, out);
}

void collect_formula(const FormulaPtr& f, std::set<VarRef> bound, std::set<VarRef>& out) {
  if (!f) return;
  switch (f->kind) {
    case Formula::Kind::True:
    case Formula::Kind::False: return;
    case Formula::Kind::Cmp:
      collect_term(f->lhs, bound, out);
      collect_term(f->rhs, bound, out);
      return;
    case Formula::Kind::Pred:
      for (const auto& t : f->targs) collect_term(t, bound, out);
      return;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      for (const auto& b : f->binders) bound.insert(b);
      collect_formula(f->body, bound, out);
      return;
    }
    default:
      for (const auto& k : f->kids) collect_formula(k, bound, out);
      return;
  }
}
}  // namespace

void collect_free_vars(const FormulaPtr& f, std::set<VarRef>& out) {
  collect_formula(f, {}, out);
}
void collect_free_vars(const TermPtr& t, std::set<VarRef>& out) {
  collect_term(t, {}, out);
}

std::set<VarRef> free_vars(const FormulaPtr& f) {
  std::set<VarRef> out;
  collect_formula(f, {}, out);
  return out;
}

std::set<VarRef> free_vars(const TermPtr& t) {
  std::set<VarRef> out;
  collect_term(t, {}, out);
  return out;
}

// -- substitution ------------------------------------------------------------

namespace {

bool name_used(const std::string& n, const std::set<VarRef>& vars) {
  for (const auto& v : vars)
    if (v.name == n) return true;
  return false;
}

// Smallest base#k not clashing with `avoid`.
std::string fresh_name(const std::string& base, const std::set<VarRef>& avoid) {
  std::string root = base;
  auto hash = root.find('#');
  if (hash != std::string::npos) root = root.substr(0, hash);
  for (int k = 1;; ++k) {
    std::string cand = root + "#" + std::to_string(k);
    if (!name_used(cand, avoid)) return cand;
  }
}

TermPtr subst_term(const TermPtr& t, const SubstMap& map);

FormulaPtr subst_formula(const FormulaPtr& f, const SubstMap& map) {
  if (!f || map.empty()) return f;
  switch (f->kind) {
    case Formula::Kind::True:
    case Formula::Kind::False: return f;
    case Formula::Kind::Cmp:
      return f_cmp(f->cmp, subst_term(f->lhs, map), subst_term(f->rhs, map));
    case Formula::Kind::Pred: {
      std::vector<TermPtr> args;
      args.reserve(f->targs.size());
      for (const auto& t : f->targs) args.push_back(subst_term(t, map));
      return f_pred(f->fn, std::move(args));
    }
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      // Drop mappings shadowed by the binder, then rename binders that
      // would capture a replacement's free variables.
      SubstMap inner;
      std::set<VarRef> replacement_free;
      std::set<VarRef> body_free = free_vars(f->body);
      for (const auto& [k, v] : map) {
        bool shadowed = false;
        for (const auto& b : f->binders)
          if (k == b) { shadowed = true; break; }
        if (shadowed) continue;
        if (!body_free.count(k)) continue;  // no occurrence, irrelevant
        inner[k] = v;
        collect_free_vars(v, replacement_free);
      }
      if (inner.empty()) return f;
      std::vector<VarRef> binders = f->binders;
      FormulaPtr body = f->body;
      SubstMap renames;
      std::set<VarRef> avoid = replacement_free;
      for (const auto& v : body_free) avoid.insert(v);
      for (auto& b : binders) {
        if (replacement_free.count(b)) {
          VarRef nb = log_var(fresh_name(b.name, avoid));
          avoid.insert(nb);
          renames[b] = t_var(nb);
          b = nb;
        }
      }
      if (!renames.empty()) body = subst_formula(body, renames);
      body = subst_formula(body, inner);
      auto g = std::make_shared<Formula>();
      g->kind = f->kind;
      g->binders = std::move(binders);
      g->body = std::move(body);
      return g;
    }
    default: {
      std::vector<FormulaPtr> kids;
      kids.reserve(f->kids.size());
      for (const auto& k : f->kids) kids.push_back(subst_formula(k, map));
      auto g = std::make_shared<Formula>();
      g->kind = f->kind;
      g->kids = std::move(kids);
      return g;
    }
  }
}

TermPtr subst_term(const TermPtr& t, const SubstMap& map) {
  if (!t || map.empty()) return t;
  switch (t->kind) {
    case Term::Kind::IntLit:
    case Term::Kind::MinInt:
    case Term::Kind::MaxInt: return t;
    case Term::Kind::Var: {
      auto it = map.find(t->var);
      return it == map.end() ? t : it->second;
    }
    default: {
      auto n = std::make_shared<Term>();
      n->kind = t->kind;
      n->value = t->value;
      n->var = t->var;
      n->fn = t->fn;
      if (t->cond) n->cond = subst_formula(t->cond, map);
      n->args.reserve(t->args.size());
      for (const auto& a : t->args) n->args.push_back(subst_term(a, map));
      return n;
    }
  }
}

}  // namespace

FormulaPtr substitute(const FormulaPtr& f, const SubstMap& map) { return subst_formula(f, map); }
TermPtr substitute(const TermPtr& t, const SubstMap& map) { return subst_term(t, map); }

// -- rendering ---------------------------------------------------------------

namespace {

// Formula precedence, loosest first: <=> 1, => 2, OR 3, AND 4, NOT 5, atom 6.
// Term precedence: +,- 1, *,/,% 2, unary 3, atom 4.

struct Renderer {
  RenderStyle style;
  std::ostringstream out;

  bool raw() const { return style == RenderStyle::Raw; }

  static const char* cmp_str(CmpOp op) {
    switch (op) {
      case CmpOp::Eq: return "=";
      case CmpOp::Ne: return "/=";
      case CmpOp::Lt: return "<";
      case CmpOp::Le: return "<=";
      case CmpOp::Gt: return ">";
      default: return ">=";
    }
  }

  void term(const TermPtr& t, int parent_prec) {
    int prec;
    const char* op = nullptr;
    switch (t->kind) {
      case Term::Kind::IntLit: out << t->value; return;
      case Term::Kind::Var: out << t->var.str(); return;
      case Term::Kind::MinInt: out << "MIN_INT"; return;
      case Term::Kind::MaxInt: out << "MAX_INT"; return;
      case Term::Kind::App: {
        out << t->fn << "(";
        for (std::size_t i = 0; i < t->args.size(); ++i) {
          if (i) out << ", ";
          term(t->args[i], 0);
        }
        out << ")";
        return;
      }
      case Term::Kind::Ite:
        out << "IF ";
        formula(t->cond, 0);
        out << " THEN ";
        term(t->args[0], 0);
        out << " ELSE ";
        term(t->args[1], 0);
        out << " ENDIF";
        return;
      case Term::Kind::Neg: {
        bool paren = raw() || parent_prec > 3;
        if (paren) out << "(";
        out << "-";
        term(t->args[0], 4);
        if (paren) out << ")";
        return;
      }
      case Term::Kind::Add: prec = 1; op = " + "; break;
      case Term::Kind::Sub: prec = 1; op = " - "; break;
      case Term::Kind::Mul: prec = 2; op = " * "; break;
      case Term::Kind::Div: prec = 2; op = " / "; break;
      default: prec = 2; op = " % "; break;
    }
    bool paren = raw() || parent_prec > prec;
    if (paren) out << "(";
    term(t->args[0], prec);
    out << op;
    // left-associative: right operand binds tighter
    term(t->args[1], prec + 1);
    if (paren) out << ")";
  }

  void nary(const std::vector<FormulaPtr>& kids, const char* op, int prec, int parent_prec) {
    bool paren = raw() || parent_prec > prec;
    if (paren) out << "(";
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (i) out << " " << op << " ";
      formula(kids[i], prec + 1);
    }
    if (paren) out << ")";
  }

  void formula(const FormulaPtr& f, int parent_prec) {
    switch (f->kind) {
      case Formula::Kind::True: out << "TRUE"; return;
      case Formula::Kind::False: out << "FALSE"; return;
      case Formula::Kind::Cmp: {
        bool paren = raw() && parent_prec > 0;
        if (paren) out << "(";
        term(f->lhs, 1);
        out << " " << cmp_str(f->cmp) << " ";
        term(f->rhs, 1);
        if (paren) out << ")";
        return;
      }
      case Formula::Kind::Pred: {
        out << f->fn << "(";
        for (std::size_t i = 0; i < f->targs.size(); ++i) {
          if (i) out << ", ";
          term(f->targs[i], 0);
        }
        out << ")";
        return;
      }
      case Formula::Kind::Not: {
        bool paren = raw() || parent_prec > 5;
        if (paren) out << "(";
        out << "NOT ";
        formula(f->kids[0], 6);
        if (paren) out << ")";
        return;
      }
      case Formula::Kind::And: nary(f->kids, "AND", 4, parent_prec); return;
      case Formula::Kind::Or: nary(f->kids, "OR", 3, parent_prec); return;
      case Formula::Kind::Implies: {
        bool paren = raw() || parent_prec > 2;
        if (paren) out << "(";
        formula(f->kids[0], 3);
        out << " => ";
        formula(f->kids[1], 2);  // right-assoc
        if (paren) out << ")";
        return;
      }
      case Formula::Kind::Iff: {
        bool paren = raw() || parent_prec > 1;
        if (paren) out << "(";
        formula(f->kids[0], 2);
        out << " <=> ";
        formula(f->kids[1], 2);
        if (paren) out << ")";
        return;
      }
      case Formula::Kind::Ite:
        out << "IF ";
        formula(f->kids[0], 0);
        out << " THEN ";
        formula(f->kids[1], 0);
        out << " ELSE ";
        formula(f->kids[2], 0);
        out << " ENDIF";
        return;
      case Formula::Kind::Forall:
      case Formula::Kind::Exists: {
        bool paren = parent_prec > 0;
        if (paren) out << "(";
        out << (f->kind == Formula::Kind::Forall ? "FORALL(" : "EXISTS(");
        for (std::size_t i = 0; i < f->binders.size(); ++i) {
          if (i) out << ", ";
          out << f->binders[i].name << ": INT";
        }
        out << "): ";
        formula(f->body, 0);
        if (paren) out << ")";
        return;
      }
    }
  }
};

}  // namespace

std::string render(const FormulaPtr& f, RenderStyle style) {
  Renderer r{style, {}};
  r.formula(f, 0);
  return r.out.str();
}

std::string render(const TermPtr& t, RenderStyle style) {
  Renderer r{style, {}};
  r.term(t, 0);
  return r.out.str();
}

}  // namespace mw
