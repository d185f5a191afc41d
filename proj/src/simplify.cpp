#include "simplify.hpp"

#include <algorithm>
#include <functional>

namespace mw {

namespace {

struct Rewriter {
  const SimplifyConfig& cfg;

  bool on(const char* r) const { return cfg.on(r); }

  // ---- helpers ----

  static void conjuncts_of(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
    if (f->kind == Formula::Kind::And) {
      for (const auto& k : f->kids) conjuncts_of(k, out);
    } else {
      out.push_back(f);
    }
  }

  static FormulaPtr and_of(std::vector<FormulaPtr> fs) {
    if (fs.empty()) return f_true();
    if (fs.size() == 1) return fs[0];
    return f_and(std::move(fs));
  }

  static bool is_frame_conjunct(const FormulaPtr& f) {
    // x$1 = x$0 (either orientation)
    if (f->kind != Formula::Kind::Cmp || f->cmp != CmpOp::Eq) return false;
    const TermPtr& a = f->lhs;
    const TermPtr& b = f->rhs;
    if (a->kind != Term::Kind::Var || b->kind != Term::Kind::Var) return false;
    if (a->var.name != b->var.name) return false;
    return (a->var.tag == VarTag::Post && b->var.tag == VarTag::Pre) ||
           (a->var.tag == VarTag::Pre && b->var.tag == VarTag::Post);
  }

  // Picks `v = t` (either orientation) with bound v and v not free in t.
  static bool find_point(const std::vector<FormulaPtr>& conj, const std::vector<VarRef>& binders,
                         std::size_t& idx, VarRef& var, TermPtr& repl) {
    for (std::size_t i = 0; i < conj.size(); ++i) {
      const FormulaPtr& c = conj[i];
      if (c->kind != Formula::Kind::Cmp || c->cmp != CmpOp::Eq) continue;
      for (int side = 0; side < 2; ++side) {
        const TermPtr& v = side == 0 ? c->lhs : c->rhs;
        const TermPtr& t = side == 0 ? c->rhs : c->lhs;
        if (v->kind != Term::Kind::Var || v->var.tag != VarTag::Logical) continue;
        if (std::find(binders.begin(), binders.end(), v->var) == binders.end()) continue;
        if (free_vars(t).count(v->var)) continue;
        idx = i;
        var = v->var;
        repl = t;
        return true;
      }
    }
    return false;
  }

  // ---- per-node rewrites (applied bottom-up) ----

  FormulaPtr one_point(const FormulaPtr& f) {
    if (f->kind == Formula::Kind::Exists) {
      std::vector<VarRef> binders = f->binders;
      std::vector<FormulaPtr> conj;
      conjuncts_of(f->body, conj);
      bool changed = false;
      std::size_t idx;
      VarRef var;
      TermPtr repl;
      while (find_point(conj, binders, idx, var, repl)) {
        conj.erase(conj.begin() + idx);
        SubstMap m{{var, repl}};
        for (auto& c : conj) c = substitute(c, m);
        binders.erase(std::find(binders.begin(), binders.end(), var));
        changed = true;
      }
      if (!changed) return f;
      return f_exists(std::move(binders), and_of(std::move(conj)));
    }
    if (f->kind == Formula::Kind::Forall && f->body->kind == Formula::Kind::Implies) {
      std::vector<VarRef> binders = f->binders;
      std::vector<FormulaPtr> hyp;
      conjuncts_of(f->body->kids[0], hyp);
      FormulaPtr concl = f->body->kids[1];
      bool changed = false;
      std::size_t idx;
      VarRef var;
      TermPtr repl;
      while (find_point(hyp, binders, idx, var, repl)) {
        hyp.erase(hyp.begin() + idx);
        SubstMap m{{var, repl}};
        for (auto& c : hyp) c = substitute(c, m);
        concl = substitute(concl, m);
        binders.erase(std::find(binders.begin(), binders.end(), var));
        changed = true;
      }
      if (!changed) return f;
      FormulaPtr body = hyp.empty() ? concl : f_implies(and_of(std::move(hyp)), concl);
      return f_forall(std::move(binders), std::move(body));
    }
    return f;
  }

  FormulaPtr flatten(const FormulaPtr& f) {
    if (f->kind == Formula::Kind::And || f->kind == Formula::Kind::Or) {
      bool nested = false;
      for (const auto& k : f->kids)
        if (k->kind == f->kind) nested = true;
      if (!nested) return f;
      std::vector<FormulaPtr> flat;
      std::function<void(const FormulaPtr&)> go = [&](const FormulaPtr& g) {
        if (g->kind == f->kind) {
          for (const auto& k : g->kids) go(k);
        } else {
          flat.push_back(g);
        }
      };
      go(f);
      auto n = std::make_shared<Formula>();
      n->kind = f->kind;
      n->kids = std::move(flat);
      return n;
    }
    if ((f->kind == Formula::Kind::Forall || f->kind == Formula::Kind::Exists) &&
        f->body->kind == f->kind) {
      std::vector<VarRef> binders = f->binders;
      // merge only when names stay distinct along the path
      bool clash = false;
      for (const auto& b : f->body->binders)
        if (std::find(binders.begin(), binders.end(), b) != binders.end()) clash = true;
      if (clash) return f;
      for (const auto& b : f->body->binders) binders.push_back(b);
      return f->kind == Formula::Kind::Forall ? f_forall(std::move(binders), f->body->body)
                                              : f_exists(std::move(binders), f->body->body);
    }
    return f;
  }

  FormulaPtr bool_ident(const FormulaPtr& f) {
    switch (f->kind) {
      case Formula::Kind::Not: {
        const FormulaPtr& a = f->kids[0];
        if (is_true(a)) return f_false();
        if (is_false(a)) return f_true();
        if (a->kind == Formula::Kind::Not) return a->kids[0];
        return f;
      }
      case Formula::Kind::And: {
        std::vector<FormulaPtr> kept;
        for (const auto& k : f->kids) {
          if (is_true(k)) continue;
          if (is_false(k)) return f_false();
          kept.push_back(k);
        }
        if (kept.size() == f->kids.size()) return f;
        return and_of(std::move(kept));
      }
      case Formula::Kind::Or: {
        std::vector<FormulaPtr> kept;
        for (const auto& k : f->kids) {
          if (is_false(k)) continue;
          if (is_true(k)) return f_true();
          kept.push_back(k);
        }
        if (kept.size() == f->kids.size()) return f;
        if (kept.empty()) return f_false();
        if (kept.size() == 1) return kept[0];
        return f_or(std::move(kept));
      }
      case Formula::Kind::Implies: {
        const FormulaPtr& a = f->kids[0];
        const FormulaPtr& b = f->kids[1];
        if (is_true(b) || is_false(a)) return f_true();
        if (is_true(a)) return b;
        if (is_false(b)) return f_not(a);
        return f;
      }
      case Formula::Kind::Iff: {
        const FormulaPtr& a = f->kids[0];
        const FormulaPtr& b = f->kids[1];
        if (is_true(a)) return b;
        if (is_true(b)) return a;
        if (is_false(a)) return f_not(b);
        if (is_false(b)) return f_not(a);
        return f;
      }
      default:
        return f;
    }
  }

  FormulaPtr ite_collapse(const FormulaPtr& f) {
    if (f->kind != Formula::Kind::Ite) return f;
    const FormulaPtr& c = f->kids[0];
    const FormulaPtr& a = f->kids[1];
    const FormulaPtr& b = f->kids[2];
    if (is_true(c)) return a;
    if (is_false(c)) return b;
    if (equal(a, b)) return a;
    if (is_true(a) && is_false(b)) return c;
    if (is_false(a) && is_true(b)) return f_not(c);
    return f;
  }

  TermPtr ite_collapse_term(const TermPtr& t) {
    if (t->kind != Term::Kind::Ite) return t;
    if (is_true(t->cond)) return t->args[0];
    if (is_false(t->cond)) return t->args[1];
    if (equal(t->args[0], t->args[1])) return t->args[0];
    return t;
  }

  static bool is_zero(const TermPtr& t) { return t->kind == Term::Kind::IntLit && t->value == 0; }
  static bool is_one(const TermPtr& t) { return t->kind == Term::Kind::IntLit && t->value == 1; }

  TermPtr arith01(const TermPtr& t) {
    switch (t->kind) {
      case Term::Kind::Add:
        if (is_zero(t->args[0])) return t->args[1];
        if (is_zero(t->args[1])) return t->args[0];
        return t;
      case Term::Kind::Sub:
        if (is_zero(t->args[1])) return t->args[0];
        return t;
      case Term::Kind::Mul:
        if (is_one(t->args[0])) return t->args[1];
        if (is_one(t->args[1])) return t->args[0];
        return t;
      default:
        return t;
    }
  }

  FormulaPtr drop_unused(const FormulaPtr& f) {
    if (f->kind != Formula::Kind::Forall && f->kind != Formula::Kind::Exists) return f;
    std::set<VarRef> used = free_vars(f->body);
    std::vector<VarRef> kept;
    for (const auto& b : f->binders)
      if (used.count(b)) kept.push_back(b);
    if (kept.size() == f->binders.size()) return f;
    return f->kind == Formula::Kind::Forall ? f_forall(std::move(kept), f->body)
                                            : f_exists(std::move(kept), f->body);
  }

  FormulaPtr frame_fold(const FormulaPtr& f) {
    if (f->kind != Formula::Kind::And) return f;
    std::vector<FormulaPtr> core, frame;
    for (const auto& k : f->kids)
      (is_frame_conjunct(k) ? frame : core).push_back(k);
    if (frame.empty() || core.empty()) return f;
    bool already = true;
    for (std::size_t i = 0; i < core.size(); ++i)
      if (!equal(f->kids[i], core[i])) already = false;
    if (already) return f;
    core.insert(core.end(), frame.begin(), frame.end());
    return f_and(std::move(core));
  }

  // ---- bottom-up sweeps ----

  TermPtr sweep(const TermPtr& t) {
    TermPtr n = t;
    bool changed = false;
    std::vector<TermPtr> args;
    args.reserve(t->args.size());
    for (const auto& a : t->args) {
      TermPtr s = sweep(a);
      if (s != a) changed = true;
      args.push_back(s);
    }
    FormulaPtr cond = t->cond;
    if (cond) {
      FormulaPtr s = sweep(cond);
      if (s != cond) changed = true;
      cond = s;
    }
    if (changed) {
      auto copy = std::make_shared<Term>();
      copy->kind = t->kind;
      copy->value = t->value;
      copy->var = t->var;
      copy->fn = t->fn;
      copy->cond = cond;
      copy->args = std::move(args);
      n = copy;
    }
    if (on("ite_collapse")) n = ite_collapse_term(n);
    if (on("arith01")) n = arith01(n);
    return n;
  }

  FormulaPtr sweep(const FormulaPtr& f) {
    FormulaPtr n = f;
    switch (f->kind) {
      case Formula::Kind::True:
      case Formula::Kind::False:
        break;
      case Formula::Kind::Cmp: {
        TermPtr l = sweep(f->lhs);
        TermPtr r = sweep(f->rhs);
        if (l != f->lhs || r != f->rhs) n = f_cmp(f->cmp, l, r);
        break;
      }
      case Formula::Kind::Pred: {
        std::vector<TermPtr> args;
        bool changed = false;
        for (const auto& a : f->targs) {
          TermPtr s = sweep(a);
          if (s != a) changed = true;
          args.push_back(s);
        }
        if (changed) n = f_pred(f->fn, std::move(args));
        break;
      }
      case Formula::Kind::Forall:
      case Formula::Kind::Exists: {
        FormulaPtr b = sweep(f->body);
        if (b != f->body) {
          n = f->kind == Formula::Kind::Forall ? f_forall(f->binders, b) : f_exists(f->binders, b);
        }
        break;
      }
      default: {
        std::vector<FormulaPtr> kids;
        bool changed = false;
        for (const auto& k : f->kids) {
          FormulaPtr s = sweep(k);
          if (s != k) changed = true;
          kids.push_back(s);
        }
        if (changed) {
          auto copy = std::make_shared<Formula>();
          copy->kind = f->kind;
          copy->kids = std::move(kids);
          n = copy;
        }
        break;
      }
    }
    // Rule order within a node: one-point exposes structure for the rest.
    if (on("one_point")) n = one_point(n);
    if (on("flatten")) n = flatten(n);
    if (on("bool")) n = bool_ident(n);
    if (on("ite_collapse")) n = ite_collapse(n);
    if (on("drop_unused")) n = drop_unused(n);
    if (on("frame_fold")) n = frame_fold(n);
    return n;
  }
};

}  // namespace

const std::set<std::string>& SimplifyConfig::known_rules() {
  static const std::set<std::string> rules = {"one_point", "flatten",     "bool",      "ite_collapse",
                                              "arith01",   "drop_unused", "frame_fold"};
  return rules;
}

FormulaPtr simplify(const FormulaPtr& f, const SimplifyConfig& cfg) {
  Rewriter rw{cfg};
  FormulaPtr cur = f;
  for (int i = 0; i < std::max(1, cfg.max_passes); ++i) {
    FormulaPtr next = rw.sweep(cur);
    if (equal(next, cur)) return next;
    cur = next;
  }
  return cur;
}

TermPtr simplify(const TermPtr& t, const SimplifyConfig& cfg) {
  Rewriter rw{cfg};
  TermPtr cur = t;
  for (int i = 0; i < std::max(1, cfg.max_passes); ++i) {
    TermPtr next = rw.sweep(cur);
    if (equal(next, cur)) return next;
    cur = next;
  }
  return cur;
}

}  // namespace mw
