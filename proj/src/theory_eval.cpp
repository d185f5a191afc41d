#include "theory_eval.hpp"

namespace mw {

namespace {

// f(v1,...,vk) with the vi exactly the binder list, in order.
bool matches_head(const TermPtr& t, const std::string& fn,
                  const std::vector<std::string>& binders) {
  if (t->kind != Term::Kind::App || t->fn != fn) return false;
  if (t->args.size() != binders.size()) return false;
  for (std::size_t i = 0; i < binders.size(); ++i) {
    const TermPtr& a = t->args[i];
    if (a->kind != Term::Kind::Var || a->var.tag != VarTag::Logical ||
        a->var.name != binders[i])
      return false;
  }
  return true;
}

bool matches_head(const FormulaPtr& f, const std::string& fn,
                  const std::vector<std::string>& binders) {
  if (f->kind != Formula::Kind::Pred || f->fn != fn) return false;
  if (f->targs.size() != binders.size()) return false;
  for (std::size_t i = 0; i < binders.size(); ++i) {
    const TermPtr& a = f->targs[i];
    if (a->kind != Term::Kind::Var || a->var.tag != VarTag::Logical ||
        a->var.name != binders[i])
      return false;
  }
  return true;
}

// f(vs) = rhs (either orientation); fills rhs.
bool orient_equation(const FormulaPtr& eq, const std::string& fn,
                     const std::vector<std::string>& binders, TermPtr& rhs) {
  if (eq->kind != Formula::Kind::Cmp || eq->cmp != CmpOp::Eq) return false;
  if (matches_head(eq->lhs, fn, binders)) {
    rhs = eq->rhs;
    return true;
  }
  if (matches_head(eq->rhs, fn, binders)) {
    rhs = eq->lhs;
    return true;
  }
  return false;
}

bool orient_iff(const FormulaPtr& eq, const std::string& fn,
                const std::vector<std::string>& binders, FormulaPtr& rhs) {
  if (eq->kind != Formula::Kind::Iff) return false;
  if (matches_head(eq->kids[0], fn, binders)) {
    rhs = eq->kids[1];
    return true;
  }
  if (matches_head(eq->kids[1], fn, binders)) {
    rhs = eq->kids[0];
    return true;
  }
  return false;
}

// Tries to read an axiom as a computation rule for `fn`.
std::optional<ComputeRule> orient(const FormulaPtr& axiom, const TheoryFunc& fn) {
  std::vector<std::string> binders;
  FormulaPtr body = axiom;
  if (body->kind == Formula::Kind::Forall) {
    for (const auto& b : body->binders) binders.push_back(b.name);
    body = body->body;
  }
  if (binders.size() != fn.arg_sorts.size()) return std::nullopt;

  ComputeRule rule;
  rule.binders = binders;
  rule.is_bool = fn.result == Sort::Bool;

  if (body->kind == Formula::Kind::Ite) {
    rule.guard = body->kids[0];
    // the guard may only mention the binders
    for (const auto& v : free_vars(rule.guard))
      if (v.tag != VarTag::Logical ||
          std::find(binders.begin(), binders.end(), v.name) == binders.end())
        return std::nullopt;
    if (rule.is_bool) {
      if (!orient_iff(body->kids[1], fn.name, binders, rule.then_form)) return std::nullopt;
      if (!orient_iff(body->kids[2], fn.name, binders, rule.else_form)) return std::nullopt;
    } else {
      if (!orient_equation(body->kids[1], fn.name, binders, rule.then_term)) return std::nullopt;
      if (!orient_equation(body->kids[2], fn.name, binders, rule.else_term)) return std::nullopt;
    }
    return rule;
  }
  if (rule.is_bool) {
    if (!orient_iff(body, fn.name, binders, rule.then_form)) return std::nullopt;
  } else {
    if (!orient_equation(body, fn.name, binders, rule.then_term)) return std::nullopt;
  }
  return rule;
}

}  // namespace

TheoryEnv TheoryEnv::compile(const Program& p) {
  TheoryEnv env;
  for (const auto& th : p.theories)
    for (const auto& fn : th.functions)
      env.declared[fn.name] = &fn;
  for (const auto& th : p.theories) {
    for (const auto& ax : th.axioms) {
      // attribute the axiom to the single function it defines, first match wins
      for (const auto& [name, fn] : env.declared) {
        if (env.rules.count(name)) continue;
        if (auto rule = orient(ax.formula, *fn)) {
          env.rules[name] = std::move(*rule);
          break;
        }
      }
    }
  }
  return env;
}

}  // namespace mw
