#include "exprsem.hpp"

#include <stdexcept>

namespace mw {

namespace {

// MIN_INT <= t AND t <= MAX_INT
FormulaPtr in_range(const TermPtr& t) {
  return f_and(f_cmp(CmpOp::Le, t_min_int(), t), f_cmp(CmpOp::Le, t, t_max_int()));
}

}  // namespace

ExprTranslation translate_expr(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::IntLit:
      return {t_int(e->value), nullptr, f_true()};
    case Expr::Kind::Var:
      return {t_var(pre_var(e->name)), nullptr, f_true()};
    case Expr::Kind::MinInt:
      return {t_min_int(), nullptr, f_true()};
    case Expr::Kind::MaxInt:
      return {t_max_int(), nullptr, f_true()};
    case Expr::Kind::Neg: {
      ExprTranslation a = translate_expr(e->lhs);
      TermPtr t = t_neg(a.term);
      return {t, nullptr, conj(a.defined, in_range(t))};
    }
    case Expr::Kind::Not: {
      ExprTranslation a = translate_expr(e->lhs);
      return {nullptr, f_not(a.formula), a.defined};
    }
    case Expr::Kind::Bin: {
      ExprTranslation a = translate_expr(e->lhs);
      switch (e->op) {
        // && and || are short-circuit: the right operand only needs to be
        // defined when it is actually evaluated.
        case Expr::Op::And: {
          ExprTranslation b = translate_expr(e->rhs);
          return {nullptr, f_and(a.formula, b.formula),
                  conj(a.defined, impl(a.formula, b.defined))};
        }
        case Expr::Op::Or: {
          ExprTranslation b = translate_expr(e->rhs);
          return {nullptr, f_or(a.formula, b.formula),
                  conj(a.defined, impl(f_not(a.formula), b.defined))};
        }
        case Expr::Op::Eq:
        case Expr::Op::Ne:
        case Expr::Op::Lt:
        case Expr::Op::Le:
        case Expr::Op::Gt:
        case Expr::Op::Ge: {
          ExprTranslation b = translate_expr(e->rhs);
          CmpOp op;
          switch (e->op) {
            case Expr::Op::Eq: op = CmpOp::Eq; break;
            case Expr::Op::Ne: op = CmpOp::Ne; break;
            case Expr::Op::Lt: op = CmpOp::Lt; break;
            case Expr::Op::Le: op = CmpOp::Le; break;
            case Expr::Op::Gt: op = CmpOp::Gt; break;
            default: op = CmpOp::Ge; break;
          }
          return {nullptr, f_cmp(op, a.term, b.term), conj(a.defined, b.defined)};
        }
        default: {
          ExprTranslation b = translate_expr(e->rhs);
          Term::Kind k;
          bool divides = false;
          switch (e->op) {
            case Expr::Op::Add: k = Term::Kind::Add; break;
            case Expr::Op::Sub: k = Term::Kind::Sub; break;
            case Expr::Op::Mul: k = Term::Kind::Mul; break;
            case Expr::Op::Div: k = Term::Kind::Div; divides = true; break;
            default: k = Term::Kind::Mod; divides = true; break;
          }
          TermPtr t = t_bin(k, a.term, b.term);
          FormulaPtr h = conj(a.defined, b.defined);
          if (divides) h = conj(h, f_cmp(CmpOp::Ne, b.term, t_int(0)));
          return {t, nullptr, conj(h, in_range(t))};
        }
      }
    }
  }
  throw std::logic_error("translate_expr: unreachable");
}

}  // namespace mw
