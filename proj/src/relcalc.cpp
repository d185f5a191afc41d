#include "relcalc.hpp"

#include "exprsem.hpp"

#include <algorithm>
#include <cassert>

namespace mw {

namespace {

FormulaPtr subst_or_keep(const FormulaPtr& f, const SubstMap& m) {
  return m.empty() ? f : substitute(f, m);
}

// x$1 = x$0 for every frame variable, sorted; TRUE for an empty frame.
FormulaPtr frame_identity(const std::set<std::string>& frame) {
  FormulaPtr acc = f_true();
  for (const auto& x : frame)
    acc = conj(acc, f_eq(t_var(post_var(x)), t_var(pre_var(x))));
  return acc;
}

// Fig. 1 frame extension: lift a judgment to a larger frame by conjoining
// x$1 = x$0 for each added variable.
RelJudgment extend_frame(RelJudgment j, const std::set<std::string>& target) {
  for (const auto& x : target) {
    if (j.frame.count(x)) continue;
    j.relation = conj(j.relation, f_eq(t_var(post_var(x)), t_var(pre_var(x))));
    j.frame.insert(x);
  }
  return j;
}

struct ExprParts {
  FormulaPtr cond;   // boolean expressions
  TermPtr term;      // integer expressions
  FormulaPtr defined;
};

ExprParts translate(const ExprPtr& e) {
  ExprTranslation t = translate_expr(e);
  return {t.formula, t.term, t.defined};
}

void record_rel(MethodContext& ctx, const Command* c, const RelJudgment& j) {
  if (ctx.rel_out) (*ctx.rel_out)[c] = j;
}
void record_term(MethodContext& ctx, const Command* c, const TermJudgment& j) {
  if (ctx.term_out) (*ctx.term_out)[c] = j;
}

}  // namespace

MethodContext make_context(const MethodDecl& m, const Program& p, const DeriveOptions& opts) {
  MethodContext ctx;
  ctx.program = &p;
  ctx.method = &m;
  ctx.options = opts;
  ctx.scope = m.params;
  ctx.scope.push_back(kResultVar);
  return ctx;
}

FormulaPtr pre_of(const RelJudgment& j, const FormulaPtr& f_q, FreshGen& fresh) {
  if (is_true(f_q)) return f_true();
  std::vector<VarRef> binders;
  SubstMap on_rel, on_goal;
  for (const auto& x : j.frame) {
    VarRef v = log_var(fresh());
    binders.push_back(v);
    on_rel[post_var(x)] = t_var(v);
    on_goal[pre_var(x)] = t_var(v);
  }
  return f_forall(std::move(binders),
                  f_implies(subst_or_keep(j.relation, on_rel), subst_or_keep(f_q, on_goal)));
}

FormulaPtr post_of(const RelJudgment& j, const FormulaPtr& f_p, FreshGen& fresh) {
  std::vector<VarRef> binders;
  SubstMap on_pre, on_rel;
  for (const auto& x : j.frame) {
    VarRef v = log_var(fresh());
    binders.push_back(v);
    on_pre[pre_var(x)] = t_var(v);
    on_rel[pre_var(x)] = t_var(v);
    on_rel[post_var(x)] = t_var(pre_var(x));
  }
  return f_exists(std::move(binders),
                  conj(subst_or_keep(f_p, on_pre), subst_or_keep(j.relation, on_rel)));
}

RelJudgment derive_call_relation(const MethodDecl& callee, const std::string& target,
                                 const std::vector<ExprPtr>& args) {
  if (callee.params.size() != args.size())
    throw DeriveError("call to '" + callee.name + "' with wrong arity");
  SubstMap param_map;
  FormulaPtr h = f_true();
  for (std::size_t i = 0; i < args.size(); ++i) {
    ExprTranslation a = translate_expr(args[i]);
    h = conj(h, a.defined);
    param_map[pre_var(callee.params[i])] = a.term;
  }
  h = conj(h, subst_or_keep(callee.contract.requires_f, param_map));
  SubstMap ens_map = param_map;
  ens_map[post_var(kResultVar)] = t_var(post_var(target));
  RelJudgment j;
  j.relation = subst_or_keep(callee.contract.ensures_f, ens_map);
  j.frame = {target};
  j.global = f_true();
  j.pre = h;
  return j;
}

// ---- loop machinery ----

namespace {

// One-state surface invariants read every variable in the current state;
// internally the current state is the post-state for frame variables and
// the (unchanged) pre-state for the rest.
FormulaPtr internalize_invariant(const FormulaPtr& surface, const std::set<std::string>& frame) {
  SubstMap m;
  for (const auto& x : frame) m[pre_var(x)] = t_var(post_var(x));
  return subst_or_keep(surface, m);
}

struct LoopMaps {
  std::vector<VarRef> entry_vars, iter_vars;
  SubstMap inv_y;   // pre -> entry, post -> y
  SubstMap inv_z;   // pre -> entry, post -> z
  SubstMap at_y;    // pre -> y (entry for non-frame)
  SubstMap at_z;    // pre -> z (entry for non-frame)
  SubstMap body_yz; // pre -> y, post -> z
};

LoopMaps loop_maps(const std::set<std::string>& frame, const std::vector<std::string>& scope) {
  LoopMaps lm;
  for (const auto& v : scope) {
    VarRef entry = log_var(v);
    lm.entry_vars.push_back(entry);
    lm.inv_y[pre_var(v)] = t_var(entry);
    lm.inv_z[pre_var(v)] = t_var(entry);
    if (!frame.count(v)) {
      lm.at_y[pre_var(v)] = t_var(entry);
      lm.at_z[pre_var(v)] = t_var(entry);
      lm.body_yz[pre_var(v)] = t_var(entry);
    }
  }
  for (const auto& x : frame) {
    VarRef y = log_var(x + "#y");
    VarRef z = log_var(x + "#z");
    lm.iter_vars.push_back(y);
    lm.iter_vars.push_back(z);
    lm.inv_y[post_var(x)] = t_var(y);
    lm.inv_z[post_var(x)] = t_var(z);
    lm.at_y[pre_var(x)] = t_var(y);
    lm.at_z[pre_var(x)] = t_var(z);
    lm.body_yz[pre_var(x)] = t_var(y);
    lm.body_yz[post_var(x)] = t_var(z);
  }
  return lm;
}

}  // namespace

LoopThreeState loop_three_state(const Command& loop, const RelJudgment& body,
                                const TermJudgment& body_term,
                                const std::vector<std::string>& scope) {
  ExprParts cond = translate(loop.expr);
  FormulaPtr internal_inv = internalize_invariant(loop.invariant, body.frame);
  LoopMaps lm = loop_maps(body.frame, scope);

  LoopThreeState ts;
  ts.entry_vars = lm.entry_vars;
  ts.iter_vars = lm.iter_vars;
  ts.inv_entry_y = subst_or_keep(internal_inv, lm.inv_y);
  ts.inv_entry_z = subst_or_keep(internal_inv, lm.inv_z);
  ts.cond_y = subst_or_keep(cond.cond, lm.at_y);
  ts.cond_def_y = subst_or_keep(cond.defined, lm.at_y);
  ts.body_rel_yz = subst_or_keep(body.relation, lm.body_yz);
  ts.body_pre_y = subst_or_keep(body.pre, lm.at_y);
  ts.body_term_y = subst_or_keep(body_term.cond, lm.at_y);
  ts.measure_y = substitute(loop.measure, lm.at_y);
  ts.measure_z = substitute(loop.measure, lm.at_z);
  return ts;
}

namespace {

std::vector<VarRef> all_binders(const LoopThreeState& ts) {
  std::vector<VarRef> binders = ts.entry_vars;
  binders.insert(binders.end(), ts.iter_vars.begin(), ts.iter_vars.end());
  return binders;
}

// Fig. 1 while rule: the invariant is preserved by the body, and each
// iteration entry satisfies the condition's and the body's preconditions.
FormulaPtr while_invariant_obligation(const LoopThreeState& ts) {
  FormulaPtr hyp = conj_all({ts.inv_entry_y, ts.cond_y, ts.body_rel_yz});
  FormulaPtr concl = conj_all({ts.cond_def_y, ts.body_pre_y, ts.inv_entry_z});
  return f_forall(all_binders(ts), impl(hyp, concl));
}

// Fig. 2 while rule: the body terminates and drives the measure down
// without making it negative.
FormulaPtr while_termination_obligation(const LoopThreeState& ts) {
  FormulaPtr hyp = conj_all({ts.inv_entry_y, ts.cond_y, ts.body_rel_yz});
  FormulaPtr concl = conj_all({ts.body_term_y,
                               f_cmp(CmpOp::Le, t_int(0), ts.measure_z),
                               f_cmp(CmpOp::Lt, ts.measure_z, ts.measure_y)});
  return f_forall(all_binders(ts), impl(hyp, concl));
}

}  // namespace

// ---- the transition rules ----

RelJudgment derive_relation(const CommandPtr& c, MethodContext& ctx) {
  const Mutation mut = ctx.options.mutation;
  RelJudgment j;
  switch (c->kind) {
    case Command::Kind::Assign:
    case Command::Kind::Return: {
      const std::string& target = c->kind == Command::Kind::Return ? kResultVar : c->var;
      ExprParts e = translate(c->expr);
      j.relation = f_eq(t_var(post_var(target)), e.term);
      j.frame = {target};
      if (mut == Mutation::AssignEmptyFrame && c->kind == Command::Kind::Assign) j.frame = {};
      j.global = f_true();
      j.pre = e.defined;
      break;
    }
    case Command::Kind::Call: {
      const MethodDecl* callee = ctx.program->find_method(c->callee);
      if (!callee) throw DeriveError("call to unknown method '" + c->callee + "'");
      j = derive_call_relation(*callee, c->var, c->args);
      break;
    }
    case Command::Kind::VarBlock: {
      ctx.scope.push_back(c->var);
      RelJudgment body = derive_relation(c->c1, ctx);
      ctx.scope.pop_back();
      VarRef v0 = log_var(c->var + "#0");
      VarRef v1 = log_var(c->var + "#1");
      SubstMap m{{pre_var(c->var), t_var(v0)}, {post_var(c->var), t_var(v1)}};
      j.relation = f_exists({v0, v1}, substitute(body.relation, m));
      j.frame = body.frame;
      j.frame.erase(c->var);
      j.global = body.global;
      if (is_true(body.pre)) {
        j.pre = f_true();
      } else {
        SubstMap hm{{pre_var(c->var), t_var(v0)}};
        j.pre = f_forall({v0}, substitute(body.pre, hm));
      }
      break;
    }
    case Command::Kind::Seq: {
      RelJudgment j1 = derive_relation(c->c1, ctx);
      RelJudgment j2 = derive_relation(c->c2, ctx);
      std::set<std::string> frame = j1.frame;
      frame.insert(j2.frame.begin(), j2.frame.end());
      j1 = extend_frame(std::move(j1), frame);
      j2 = extend_frame(std::move(j2), frame);
      std::vector<VarRef> ys;
      SubstMap m1, m2;
      for (const auto& x : frame) {
        VarRef y = log_var(ctx.fresh());
        ys.push_back(y);
        m1[post_var(x)] = t_var(y);
        m2[pre_var(x)] = t_var(y);
      }
      if (mut == Mutation::SeqSecondAtOrigin) m2.clear();
      j.relation =
          f_exists(std::move(ys), f_and(subst_or_keep(j1.relation, m1),
                                        subst_or_keep(j2.relation, m2)));
      j.frame = frame;
      j.global = conj(j1.global, j2.global);
      j.pre = conj(j1.pre, pre_of(j1, j2.pre, ctx.fresh));
      break;
    }
    case Command::Kind::IfThen: {
      ExprParts e = translate(c->expr);
      RelJudgment j1 = derive_relation(c->c1, ctx);
      FormulaPtr skip = frame_identity(j1.frame);
      FormulaPtr then_rel = j1.relation;
      if (mut == Mutation::IfSwapBranches) std::swap(then_rel, skip);
      j.relation = f_ite(e.cond, then_rel, skip);
      j.frame = j1.frame;
      j.global = j1.global;
      j.pre = conj(e.defined, impl(e.cond, j1.pre));
      break;
    }
    case Command::Kind::IfThenElse: {
      ExprParts e = translate(c->expr);
      RelJudgment j1 = derive_relation(c->c1, ctx);
      RelJudgment j2 = derive_relation(c->c2, ctx);
      std::set<std::string> frame = j1.frame;
      frame.insert(j2.frame.begin(), j2.frame.end());
      j1 = extend_frame(std::move(j1), frame);
      j2 = extend_frame(std::move(j2), frame);
      FormulaPtr then_rel = j1.relation;
      FormulaPtr else_rel = j2.relation;
      if (mut == Mutation::IfSwapBranches) std::swap(then_rel, else_rel);
      j.relation = f_ite(e.cond, then_rel, else_rel);
      j.frame = frame;
      j.global = conj(j1.global, j2.global);
      FormulaPtr branch_pre = (is_true(j1.pre) && is_true(j2.pre))
                                  ? f_true()
                                  : f_ite(e.cond, j1.pre, j2.pre);
      j.pre = conj(e.defined, branch_pre);
      break;
    }
    case Command::Kind::While: {
      if (!c->invariant || !c->measure)
        throw DeriveError("while loop is missing its invariant or measure");
      ExprParts e = translate(c->expr);
      RelJudgment body = derive_relation(c->c1, ctx);
      FormulaPtr internal_inv = internalize_invariant(c->invariant, body.frame);
      SubstMap to_post;
      for (const auto& x : body.frame) to_post[pre_var(x)] = t_var(post_var(x));
      FormulaPtr exit_cond = f_not(subst_or_keep(e.cond, to_post));
      switch (mut) {
        case Mutation::WhileExitCondAtPre:
          j.relation = f_and(internal_inv, f_not(e.cond));
          break;
        case Mutation::WhileDropExitCond:
          j.relation = internal_inv;
          break;
        default:
          j.relation = f_and(internal_inv, exit_cond);
          break;
      }
      j.frame = body.frame;
      LoopThreeState ts = loop_three_state(*c, body, TermJudgment{f_true(), f_true()}, ctx.scope);
      j.global = conj(body.global, while_invariant_obligation(ts));
      j.pre = (mut == Mutation::WhileDropEntryInv) ? e.defined : conj(e.defined, c->invariant);
      break;
    }
  }
  record_rel(ctx, c.get(), j);
  return j;
}

// ---- the termination rules ----

TermJudgment derive_termination(const CommandPtr& c, MethodContext& ctx) {
  TermJudgment j{f_true(), f_true()};
  switch (c->kind) {
    case Command::Kind::Assign:
    case Command::Kind::Return:
      break;
    case Command::Kind::Call: {
      const MethodDecl* callee = ctx.program->find_method(c->callee);
      if (!callee) throw DeriveError("call to unknown method '" + c->callee + "'");
      const FormulaPtr& d = callee->contract.diverges_f;
      if (!is_false(d)) {
        SubstMap param_map;
        for (std::size_t i = 0; i < c->args.size(); ++i)
          param_map[pre_var(callee->params[i])] = translate_expr(c->args[i]).term;
        j.cond = f_not(substitute(d, param_map));
      }
      break;
    }
    case Command::Kind::VarBlock: {
      ctx.scope.push_back(c->var);
      TermJudgment body = derive_termination(c->c1, ctx);
      ctx.scope.pop_back();
      j.global = body.global;
      if (!is_true(body.cond)) {
        VarRef v0 = log_var(c->var + "#0");
        j.cond = f_forall({v0}, substitute(body.cond, {{pre_var(c->var), t_var(v0)}}));
      }
      break;
    }
    case Command::Kind::Seq: {
      TermJudgment t1 = derive_termination(c->c1, ctx);
      TermJudgment t2 = derive_termination(c->c2, ctx);
      RelJudgment j1 = derive_relation(c->c1, ctx);
      j.cond = conj(t1.cond, pre_of(j1, t2.cond, ctx.fresh));
      j.global = conj(t1.global, t2.global);
      break;
    }
    case Command::Kind::IfThen: {
      ExprParts e = translate(c->expr);
      TermJudgment t1 = derive_termination(c->c1, ctx);
      j.cond = impl(e.cond, t1.cond);
      j.global = t1.global;
      break;
    }
    case Command::Kind::IfThenElse: {
      ExprParts e = translate(c->expr);
      TermJudgment t1 = derive_termination(c->c1, ctx);
      TermJudgment t2 = derive_termination(c->c2, ctx);
      j.cond = (is_true(t1.cond) && is_true(t2.cond)) ? f_true() : f_ite(e.cond, t1.cond, t2.cond);
      j.global = conj(t1.global, t2.global);
      break;
    }
    case Command::Kind::While: {
      RelJudgment body = derive_relation(c->c1, ctx);
      TermJudgment bt = derive_termination(c->c1, ctx);
      LoopThreeState ts = loop_three_state(*c, body, bt, ctx.scope);
      FormulaPtr g = while_termination_obligation(ts);
      if (ctx.options.mutation == Mutation::WhileTermGlobalTrue) g = f_true();
      j.cond = f_cmp(CmpOp::Ge, c->measure, t_int(0));
      j.global = conj(g, bt.global);
      break;
    }
  }
  record_term(ctx, c.get(), j);
  return j;
}

// ---- semantic model ----

namespace {

struct ModelBuilder {
  const MethodDecl& m;
  const Program& p;
  const SimplifyConfig& scfg;
  const std::optional<KnowledgeInjection>& inject;
  DeriveOptions opts;
  MethodContext ctx;
  std::map<const Command*, RelJudgment> rels;
  std::map<const Command*, TermJudgment> terms;
  std::map<const Command*, FormulaPtr> know_raw;
  std::map<const Command*, FormulaPtr> know;
  SemanticModel model;

  FormulaPtr s(const FormulaPtr& f) { return simplify(f, scfg); }

  FormulaPtr record_knowledge(const CommandPtr& c, FormulaPtr k_raw) {
    if (inject && inject->node == c.get() && !inject->at_post)
      k_raw = conj(k_raw, inject->condition);
    know_raw[c.get()] = k_raw;
    FormulaPtr k = s(k_raw);
    know[c.get()] = k;
    return k;
  }

  // Returns the knowledge after the command (raw); records this node first.
  FormulaPtr walk_knowledge(const CommandPtr& c, FormulaPtr k_raw) {
    FormulaPtr k = record_knowledge(c, k_raw);
    FormulaPtr after;
    switch (c->kind) {
      case Command::Kind::Seq: {
        FormulaPtr mid = walk_knowledge(c->c1, k);
        after = walk_knowledge(c->c2, s(mid));
        break;
      }
      case Command::Kind::VarBlock: {
        walk_knowledge(c->c1, k);
        after = post_of(rels.at(c.get()), k, ctx.fresh);
        break;
      }
      case Command::Kind::IfThen: {
        ExprParts e = translate(c->expr);
        walk_knowledge(c->c1, conj(k, e.cond));
        after = post_of(rels.at(c.get()), k, ctx.fresh);
        break;
      }
      case Command::Kind::IfThenElse: {
        ExprParts e = translate(c->expr);
        walk_knowledge(c->c1, conj(k, e.cond));
        walk_knowledge(c->c2, conj(k, f_not(e.cond)));
        after = post_of(rels.at(c.get()), k, ctx.fresh);
        break;
      }
      case Command::Kind::While: {
        ExprParts e = translate(c->expr);
        walk_knowledge(c->c1, conj(c->invariant, e.cond));
        after = post_of(rels.at(c.get()), k, ctx.fresh);
        break;
      }
      default:
        after = post_of(rels.at(c.get()), k, ctx.fresh);
        break;
    }
    if (inject && inject->node == c.get() && inject->at_post)
      after = conj(after, inject->condition);
    return after;
  }

  void assemble(const CommandPtr& c, int depth, std::vector<std::string>& scope) {
    NodeSemantics n;
    n.node = c;
    n.span = c->span;
    n.depth = depth;
    n.scope = scope;
    n.rel_raw = rels.at(c.get());
    n.rel.relation = s(n.rel_raw.relation);
    n.rel.frame = n.rel_raw.frame;
    n.rel.global = s(n.rel_raw.global);
    n.rel.pre = s(n.rel_raw.pre);
    n.term_raw = terms.at(c.get());
    n.term.cond = s(n.term_raw.cond);
    n.term.global = s(n.term_raw.global);
    n.knowledge_raw = know_raw.at(c.get());
    n.knowledge = know.at(c.get());
    model.nodes.push_back(std::move(n));
    switch (c->kind) {
      case Command::Kind::VarBlock:
        scope.push_back(c->var);
        assemble(c->c1, depth + 1, scope);
        scope.pop_back();
        break;
      case Command::Kind::Seq:
        assemble(c->c1, depth, scope);
        assemble(c->c2, depth, scope);
        break;
      case Command::Kind::IfThen:
      case Command::Kind::While:
        assemble(c->c1, depth + 1, scope);
        break;
      case Command::Kind::IfThenElse:
        assemble(c->c1, depth + 1, scope);
        assemble(c->c2, depth + 1, scope);
        break;
      default:
        break;
    }
  }

  SemanticModel build() {
    ctx = make_context(m, p, opts);
    ctx.rel_out = &rels;
    ctx.term_out = &terms;
    derive_relation(m.body, ctx);
    derive_termination(m.body, ctx);
    walk_knowledge(m.body, m.contract.requires_f);
    model.method = &m;
    std::vector<std::string> scope = ctx.scope;
    assemble(m.body, 0, scope);
    return std::move(model);
  }
};

}  // namespace

const NodeSemantics* SemanticModel::find(const Command* c) const {
  for (const auto& n : nodes)
    if (n.node.get() == c) return &n;
  return nullptr;
}

const NodeSemantics* SemanticModel::at_line(int line) const {
  const NodeSemantics* best = nullptr;
  for (const auto& n : nodes) {
    if (!n.span.covers_line(line)) continue;
    if (!best || (n.span.end_line - n.span.line) <= (best->span.end_line - best->span.line))
      best = &n;
  }
  return best;
}

SemanticModel build_semantic_model(const MethodDecl& m, const Program& p,
                                   const DeriveOptions& opts, const SimplifyConfig& scfg,
                                   const std::optional<KnowledgeInjection>& inject) {
  ModelBuilder b{m, p, scfg, inject, opts, {}, {}, {}, {}, {}, {}};
  return b.build();
}

}  // namespace mw
