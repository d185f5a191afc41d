#include "oracle.hpp"

#include "relcalc.hpp"
#include "simplify.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace mw {

// ---- Store ----

bool Store::has(const std::string& n) const {
  for (const auto& [k, v] : vars)
    if (k == n) return true;
  return false;
}

Value Store::get(const std::string& n) const {
  for (const auto& [k, v] : vars)
    if (k == n) return v;
  throw OracleError("store has no variable '" + n + "'");
}

void Store::set(const std::string& n, Value v) {
  for (auto& [k, old] : vars) {
    if (k == n) {
      old = v;
      return;
    }
  }
  vars.emplace_back(n, v);
}

void Store::remove(const std::string& n) {
  vars.erase(std::remove_if(vars.begin(), vars.end(),
                            [&](const auto& kv) { return kv.first == n; }),
             vars.end());
}

std::string Store::str() const {
  std::ostringstream out;
  out << "{";
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) out << ", ";
    out << vars[i].first << ": " << vars[i].second;
  }
  out << "}";
  return out.str();
}

std::string Outcome::str() const {
  switch (kind) {
    case Kind::Terminated: return "terminated " + store.str();
    case Kind::FuelExhausted: return "fuel exhausted";
    default:
      switch (reason) {
        case TrapReason::Overflow: return "trap: overflow at " + span.str();
        case TrapReason::DivByZero: return "trap: division by zero at " + span.str();
        default: return "trap: precondition violated at " + span.str();
      }
  }
}

// ---- formula evaluation ----

namespace {

constexpr Value kSatBound = 1LL << 62;

// Formula arithmetic is total; clamp far outside the machine-int range so
// deep terms cannot wrap.
Value sat(__int128 v) {
  if (v > kSatBound) return kSatBound;
  if (v < -kSatBound) return -kSatBound;
  return static_cast<Value>(v);
}

Value trunc_div(Value a, Value b) {
  if (b == 0) return 0;  // total extension, mirrored in the SMT encoding
  if (a == std::numeric_limits<Value>::min() && b == -1) return kSatBound;
  return a / b;
}

Value trunc_mod(Value a, Value b) {
  if (b == 0) return 0;
  if (b == -1 || b == 1) return 0;
  return a % b;
}

bool cmp_holds(CmpOp op, Value a, Value b) {
  switch (op) {
    case CmpOp::Eq: return a == b;
    case CmpOp::Ne: return a != b;
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Gt: return a > b;
    default: return a >= b;
  }
}

constexpr int kMaxTheoryDepth = 10000;

}  // namespace

Value Evaluator::apply(const std::string& fn, const std::vector<Value>& args, bool* as_bool) {
  auto it = theories_.rules.find(fn);
  if (it == theories_.rules.end())
    throw OracleError("theory function '" + fn +
                      "' has no axiom orientable as a computation rule");
  const ComputeRule& rule = it->second;
  if (rule.binders.size() != args.size())
    throw OracleError("arity mismatch applying '" + fn + "'");
  if (++depth_ > kMaxTheoryDepth) {
    --depth_;
    throw OracleError("theory evaluation depth exceeded applying '" + fn + "'");
  }
  Env local;
  local.reserve(args.size());
  for (std::size_t i = 0; i < args.size(); ++i) local.emplace_back(rule.binders[i], args[i]);
  Value out = 0;
  bool bout = false;
  bool take_then = true;
  if (rule.guard) take_then = eval(rule.guard, nullptr, nullptr, local);
  if (rule.is_bool) {
    const FormulaPtr& rhs = take_then ? rule.then_form : rule.else_form;
    if (!rhs) throw OracleError("predicate '" + fn + "' has no branch definition");
    bout = eval(rhs, nullptr, nullptr, local);
  } else {
    const TermPtr& rhs = take_then ? rule.then_term : rule.else_term;
    if (!rhs) throw OracleError("function '" + fn + "' has no branch definition");
    out = eval(rhs, nullptr, nullptr, local);
  }
  --depth_;
  if (as_bool) *as_bool = bout;
  return out;
}

Value Evaluator::eval(const TermPtr& t, const Store* pre, const Store* post, Env& env) {
  switch (t->kind) {
    case Term::Kind::IntLit: return t->value;
    case Term::Kind::MinInt: return cfg_.min_int;
    case Term::Kind::MaxInt: return cfg_.max_int;
    case Term::Kind::Var: {
      const VarRef& v = t->var;
      if (v.tag == VarTag::Logical) {
        for (auto it = env.rbegin(); it != env.rend(); ++it)
          if (it->first == v.name) return it->second;
        throw OracleError("unbound logical variable '" + v.name + "'");
      }
      const Store* s = v.tag == VarTag::Pre ? pre : post;
      if (!s) throw OracleError("no " + std::string(v.tag == VarTag::Pre ? "pre" : "post") +
                                "-state for variable '" + v.name + "'");
      return s->get(v.name);
    }
    case Term::Kind::Neg: return sat(-static_cast<__int128>(eval(t->args[0], pre, post, env)));
    case Term::Kind::Add:
      return sat(static_cast<__int128>(eval(t->args[0], pre, post, env)) +
                 eval(t->args[1], pre, post, env));
    case Term::Kind::Sub:
      return sat(static_cast<__int128>(eval(t->args[0], pre, post, env)) -
                 eval(t->args[1], pre, post, env));
    case Term::Kind::Mul:
      return sat(static_cast<__int128>(eval(t->args[0], pre, post, env)) *
                 eval(t->args[1], pre, post, env));
    case Term::Kind::Div:
      return trunc_div(eval(t->args[0], pre, post, env), eval(t->args[1], pre, post, env));
    case Term::Kind::Mod:
      return trunc_mod(eval(t->args[0], pre, post, env), eval(t->args[1], pre, post, env));
    case Term::Kind::Ite:
      return eval(t->cond, pre, post, env) ? eval(t->args[0], pre, post, env)
                                           : eval(t->args[1], pre, post, env);
    case Term::Kind::App: {
      std::vector<Value> args;
      args.reserve(t->args.size());
      for (const auto& a : t->args) args.push_back(eval(a, pre, post, env));
      return apply(t->fn, args, nullptr);
    }
  }
  throw OracleError("eval: unreachable term kind");
}

bool Evaluator::eval(const FormulaPtr& f, const Store* pre, const Store* post, Env& env) {
  switch (f->kind) {
    case Formula::Kind::True: return true;
    case Formula::Kind::False: return false;
    case Formula::Kind::Cmp:
      return cmp_holds(f->cmp, eval(f->lhs, pre, post, env), eval(f->rhs, pre, post, env));
    case Formula::Kind::Pred: {
      std::vector<Value> args;
      args.reserve(f->targs.size());
      for (const auto& a : f->targs) args.push_back(eval(a, pre, post, env));
      bool b = false;
      apply(f->fn, args, &b);
      return b;
    }
    case Formula::Kind::Not: return !eval(f->kids[0], pre, post, env);
    case Formula::Kind::And:
      for (const auto& k : f->kids)
        if (!eval(k, pre, post, env)) return false;
      return true;
    case Formula::Kind::Or:
      for (const auto& k : f->kids)
        if (eval(k, pre, post, env)) return true;
      return false;
    case Formula::Kind::Implies:
      return !eval(f->kids[0], pre, post, env) || eval(f->kids[1], pre, post, env);
    case Formula::Kind::Iff:
      return eval(f->kids[0], pre, post, env) == eval(f->kids[1], pre, post, env);
    case Formula::Kind::Ite:
      return eval(f->kids[0], pre, post, env) ? eval(f->kids[1], pre, post, env)
                                              : eval(f->kids[2], pre, post, env);
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      bool want = f->kind == Formula::Kind::Exists;
      std::size_t base = env.size();
      for (const auto& b : f->binders) env.emplace_back(b.name, -cfg_.dom);
      bool result = !want;
      // odometer over [-dom, dom]^binders
      while (true) {
        if (eval(f->body, pre, post, env) == want) {
          result = want;
          break;
        }
        std::size_t i = base;
        for (; i < env.size(); ++i) {
          if (env[i].second < cfg_.dom) {
            ++env[i].second;
            for (std::size_t k = base; k < i; ++k) env[k].second = -cfg_.dom;
            break;
          }
        }
        if (i == env.size()) break;
      }
      env.resize(base);
      return result;
    }
  }
  throw OracleError("eval: unreachable formula kind");
}

bool Evaluator::eval_closed(const FormulaPtr& f) {
  Env env;
  return eval(f, nullptr, nullptr, env);
}

bool Evaluator::valid(const FormulaPtr& f) {
  std::set<VarRef> free = free_vars(f);
  Store pre, post;
  Env env;
  std::vector<Value*> slots;
  for (const auto& v : free) {
    switch (v.tag) {
      case VarTag::Pre: pre.set(v.name, 0); break;
      case VarTag::Post: post.set(v.name, 0); break;
      case VarTag::Logical: env.emplace_back(v.name, 0); break;
    }
  }
  for (auto& [k, val] : pre.vars) slots.push_back(&val);
  for (auto& [k, val] : post.vars) slots.push_back(&val);
  for (auto& [k, val] : env) slots.push_back(&val);
  for (Value* s : slots) *s = -cfg_.dom;
  while (true) {
    if (!eval(f, &pre, &post, env)) return false;
    std::size_t i = 0;
    for (; i < slots.size(); ++i) {
      if (*slots[i] < cfg_.dom) {
        ++*slots[i];
        for (std::size_t k = 0; k < i; ++k) *slots[k] = -cfg_.dom;
        break;
      }
    }
    if (i == slots.size()) return true;
  }
}

bool eval_formula(const FormulaPtr& f, const Program& prog, const SemConfig& cfg,
                  const Store* pre, const Store* post, const Env& env) {
  Evaluator ev(prog, cfg);
  Env e = env;
  return ev.eval(f, pre, post, e);
}

bool for_each_store(std::vector<Value>& slots, Value dom, const std::function<bool()>& fn) {
  for (auto& s : slots) s = -dom;
  while (true) {
    if (!fn()) return false;
    std::size_t i = 0;
    for (; i < slots.size(); ++i) {
      if (slots[i] < dom) {
        ++slots[i];
        for (std::size_t k = 0; k < i; ++k) slots[k] = -dom;
        break;
      }
    }
    if (i == slots.size()) return true;
  }
}

// ---- execution ----

namespace {

class Executor {
 public:
  Executor(const Program& prog, const SemConfig& cfg)
      : prog_(prog), cfg_(cfg), eval_(prog, cfg) {}

  Outcome run(const CommandPtr& c, Store s, long long fuel) {
    store_ = std::move(s);
    fuel_ = fuel;
    failed_ = false;
    Outcome out;
    if (run_cmd(c)) {
      out.kind = Outcome::Kind::Terminated;
      out.store = std::move(store_);
    } else {
      out.kind = kind_;
      out.reason = reason_;
      out.span = span_;
    }
    return out;
  }

 private:
  const Program& prog_;
  const SemConfig& cfg_;
  Evaluator eval_;
  Store store_;
  long long fuel_ = 0;
  bool failed_ = false;
  Outcome::Kind kind_ = Outcome::Kind::Trap;
  TrapReason reason_ = TrapReason::Overflow;
  Span span_;

  bool trap(TrapReason r, Span sp) {
    failed_ = true;
    kind_ = Outcome::Kind::Trap;
    reason_ = r;
    span_ = sp;
    return false;
  }

  bool charge(Span sp) {
    if (fuel_ <= 0) {
      failed_ = true;
      kind_ = Outcome::Kind::FuelExhausted;
      span_ = sp;
      return false;
    }
    --fuel_;
    return true;
  }

  bool in_range(Value v) const { return v >= cfg_.min_int && v <= cfg_.max_int; }

  bool eval_expr(const ExprPtr& e, const Store& s, Value& out) {
    switch (e->kind) {
      case Expr::Kind::IntLit: out = e->value; return true;
      case Expr::Kind::MinInt: out = cfg_.min_int; return true;
      case Expr::Kind::MaxInt: out = cfg_.max_int; return true;
      case Expr::Kind::Var: out = s.get(e->name); return true;
      case Expr::Kind::Neg: {
        Value a;
        if (!eval_expr(e->lhs, s, a)) return false;
        out = -a;
        if (!in_range(out)) return trap(TrapReason::Overflow, e->span);
        return true;
      }
      case Expr::Kind::Not: {
        Value a;
        if (!eval_expr(e->lhs, s, a)) return false;
        out = a ? 0 : 1;
        return true;
      }
      case Expr::Kind::Bin: {
        // short-circuit first
        if (e->op == Expr::Op::And || e->op == Expr::Op::Or) {
          Value a;
          if (!eval_expr(e->lhs, s, a)) return false;
          if (e->op == Expr::Op::And && !a) { out = 0; return true; }
          if (e->op == Expr::Op::Or && a) { out = 1; return true; }
          Value b;
          if (!eval_expr(e->rhs, s, b)) return false;
          out = b ? 1 : 0;
          return true;
        }
        Value a, b;
        if (!eval_expr(e->lhs, s, a)) return false;
        if (!eval_expr(e->rhs, s, b)) return false;
        switch (e->op) {
          case Expr::Op::Eq: out = a == b; return true;
          case Expr::Op::Ne: out = a != b; return true;
          case Expr::Op::Lt: out = a < b; return true;
          case Expr::Op::Le: out = a <= b; return true;
          case Expr::Op::Gt: out = a > b; return true;
          case Expr::Op::Ge: out = a >= b; return true;
          case Expr::Op::Div:
          case Expr::Op::Mod: {
            if (b == 0) return trap(TrapReason::DivByZero, e->span);
            Value q = (b == -1) ? -a : a / b;
            Value r = (b == -1 || b == 1) ? 0 : a % b;
            out = e->op == Expr::Op::Div ? q : r;
            if (!in_range(out)) return trap(TrapReason::Overflow, e->span);
            return true;
          }
          default: {
            __int128 wide;
            if (e->op == Expr::Op::Add) wide = static_cast<__int128>(a) + b;
            else if (e->op == Expr::Op::Sub) wide = static_cast<__int128>(a) - b;
            else wide = static_cast<__int128>(a) * b;
            if (wide < cfg_.min_int || wide > cfg_.max_int)
              return trap(TrapReason::Overflow, e->span);
            out = static_cast<Value>(wide);
            return true;
          }
        }
      }
    }
    return trap(TrapReason::Overflow, e->span);
  }

  bool run_cmd(const CommandPtr& c) {
    switch (c->kind) {
      case Command::Kind::Assign: {
        if (!charge(c->span)) return false;
        Value v;
        if (!eval_expr(c->expr, store_, v)) return false;
        store_.set(c->var, v);
        return true;
      }
      case Command::Kind::Return: {
        if (!charge(c->span)) return false;
        Value v;
        if (!eval_expr(c->expr, store_, v)) return false;
        store_.set(kResultVar, v);
        return true;
      }
      case Command::Kind::Call: {
        if (!charge(c->span)) return false;
        const MethodDecl* callee = prog_.find_method(c->callee);
        if (!callee) throw OracleError("call to unknown method '" + c->callee + "'");
        Store inner;
        for (std::size_t i = 0; i < c->args.size(); ++i) {
          Value v;
          if (!eval_expr(c->args[i], store_, v)) return false;
          inner.set(callee->params[i], v);
        }
        inner.set(kResultVar, 0);
        Env env;
        if (!eval_.eval(callee->contract.requires_f, &inner, nullptr, env))
          return trap(TrapReason::Precondition, c->span);
        Store saved = std::move(store_);
        store_ = std::move(inner);
        bool ok = run_cmd(callee->body);
        Store done = std::move(store_);
        store_ = std::move(saved);
        if (!ok) return false;
        store_.set(c->var, done.get(kResultVar));
        return true;
      }
      case Command::Kind::VarBlock: {
        store_.set(c->var, 0);
        bool ok = run_cmd(c->c1);
        if (ok) store_.remove(c->var);
        return ok;
      }
      case Command::Kind::Seq:
        return run_cmd(c->c1) && run_cmd(c->c2);
      case Command::Kind::IfThen: {
        if (!charge(c->span)) return false;
        Value v;
        if (!eval_expr(c->expr, store_, v)) return false;
        return v ? run_cmd(c->c1) : true;
      }
      case Command::Kind::IfThenElse: {
        if (!charge(c->span)) return false;
        Value v;
        if (!eval_expr(c->expr, store_, v)) return false;
        return v ? run_cmd(c->c1) : run_cmd(c->c2);
      }
      case Command::Kind::While: {
        while (true) {
          if (!charge(c->span)) return false;
          Value v;
          if (!eval_expr(c->expr, store_, v)) return false;
          if (!v) return true;
          if (!run_cmd(c->c1)) return false;
        }
      }
    }
    throw OracleError("exec: unreachable command kind");
  }
};

}  // namespace

Outcome exec(const CommandPtr& c, const Program& prog, const Store& s, long long fuel,
             const SemConfig& cfg) {
  Executor ex(prog, cfg);
  return ex.run(c, s, fuel);
}

Outcome exec_method(const MethodDecl& m, const Program& prog, const Store& args, long long fuel,
                    const SemConfig& cfg) {
  Store s = args;
  if (!s.has(kResultVar)) s.set(kResultVar, 0);
  Executor ex(prog, cfg);
  return ex.run(m.body, s, fuel);
}

// ---- soundness ----

std::string SoundnessViolation::str() const {
  std::ostringstream out;
  out << "statement " << statement << " violated in method " << method << " at " << span.str()
      << ": " << detail << " pre=" << pre.str();
  if (post) out << " post=" << post->str();
  return out.str();
}

namespace {

// Post-conditions for the statement-3 checks, read at the post-state.
std::vector<FormulaPtr> statement3_family(const std::vector<std::string>& scope) {
  std::vector<FormulaPtr> fam = {f_true(), f_false()};
  for (const auto& v : scope)
    fam.push_back(f_cmp(CmpOp::Ge, t_var(pre_var(v)), t_int(0)));
  return fam;
}

struct SoundnessChecker {
  const Program& prog;
  const SemConfig& cfg;
  DeriveOptions opts;
  SoundnessReport report;
  Executor* unused = nullptr;

  void check_method(const MethodDecl& m) {
    SemanticModel model = build_semantic_model(m, prog, opts);
    Evaluator ev(prog, cfg);

    for (const auto& node : model.nodes) {
      report.nodes_checked++;
      bool g_valid = ev.valid(node.rel.global);
      if (!g_valid) {
        report.warnings.push_back({m.name, node.span,
                                   "side condition g is not valid at dom=" +
                                       std::to_string(cfg.dom) + "; statements 1-2 skipped"});
        continue;
      }
      bool gc_valid = ev.valid(node.term.global);
      if (!gc_valid)
        report.warnings.push_back({m.name, node.span,
                                   "termination side condition g_c is not valid at dom=" +
                                       std::to_string(cfg.dom) + "; statement 2 skipped"});

      check_node(m, node, gc_valid, ev);
    }
    check_statement3(m, model, ev);
  }

  void check_node(const MethodDecl& m, const NodeSemantics& node, bool check_term,
                  Evaluator& ev) {
    double space = 1;
    for (std::size_t i = 0; i < node.scope.size(); ++i) space *= (2.0 * cfg.dom + 1);
    if (space > static_cast<double>(cfg.state_cap))
      throw OracleError("state space too large for soundness check at " + node.span.str());

    Store s;
    for (const auto& v : node.scope) s.set(v, 0);
    Env env;

    std::vector<Value> dims(node.scope.size(), -cfg.dom);
    for_each_store(dims, cfg.dom, [&]() {
      for (std::size_t i = 0; i < dims.size(); ++i) s.vars[i].second = dims[i];
      report.stores_checked++;
      bool h_holds = ev.eval(node.rel.pre, &s, nullptr, env);
      if (!h_holds) return true;

      Outcome out = exec(node.node, prog, s, cfg.fuel, cfg);
      if (out.terminated()) {
        // statement 1: the relation covers the transition...
        if (!ev.eval(node.rel.relation, &s, &out.store, env)) {
          report.violations.push_back({1, m.name, node.span, s, out.store,
                                       "executed transition is outside the derived relation"});
        }
        // ... and variables outside the frame are untouched
        for (const auto& v : node.scope) {
          if (node.rel.frame.count(v)) continue;
          if (s.get(v) != out.store.get(v)) {
            report.violations.push_back({1, m.name, node.span, s, out.store,
                                         "variable '" + v + "' outside the frame changed"});
            break;
          }
        }
      }
      if (check_term && ev.eval(node.term.cond, &s, nullptr, env)) {
        // statement 2: the termination condition promises a transition
        if (!out.terminated()) {
          report.violations.push_back({2, m.name, node.span, s, std::nullopt,
                                       "termination condition holds but execution " +
                                           std::string(out.kind == Outcome::Kind::FuelExhausted
                                                           ? "ran out of fuel"
                                                           : "trapped")});
        }
      }
      return true;
    });
  }

  // Statement 3 at the method-body node, judged over the full variable set.
  void check_statement3(const MethodDecl& m, const SemanticModel& model, Evaluator& ev) {
    const NodeSemantics& body = model.body();
    RelJudgment j = body.rel;
    for (const auto& v : body.scope) {
      if (j.frame.count(v)) continue;
      j.relation = conj(j.relation, f_eq(t_var(post_var(v)), t_var(pre_var(v))));
      j.frame.insert(v);
    }
    FreshGen fresh{1000};
    SimplifyConfig scfg;
    FormulaPtr rel = simplify(j.relation, scfg);

    Store s, s2;
    for (const auto& v : body.scope) {
      s.set(v, 0);
      s2.set(v, 0);
    }
    Env env;

    for (const FormulaPtr& fq : statement3_family(body.scope)) {
      FormulaPtr fp = simplify(pre_of(j, fq, fresh), scfg);
      // PRE direction: fp(s) and rel(s,s') imply fq(s')
      std::vector<Value> pre_dims(body.scope.size(), 0);
      for_each_store(pre_dims, cfg.dom, [&]() {
        for (std::size_t i = 0; i < pre_dims.size(); ++i) s.vars[i].second = pre_dims[i];
        if (!ev.eval(fp, &s, nullptr, env)) return true;
        std::vector<Value> post_dims(body.scope.size(), 0);
        for_each_store(post_dims, cfg.dom, [&]() {
          for (std::size_t i = 0; i < post_dims.size(); ++i) s2.vars[i].second = post_dims[i];
          if (!ev.eval(rel, &s, &s2, env)) return true;
          if (!ev.eval(fq, &s2, nullptr, env)) {
            report.violations.push_back({3, m.name, body.span, s, s2,
                                         "PRE(" + render(fq) + ") does not guarantee it"});
            return false;
          }
          return true;
        });
        return true;
      });
      // POST direction: fq2 := POST(fp0); fp0(s) and rel(s,s') imply fq2(s')
      const FormulaPtr& fp0 = fq;  // reuse the family as pre-conditions
      FormulaPtr fq2 = simplify(post_of(j, fp0, fresh), scfg);
      for_each_store(pre_dims, cfg.dom, [&]() {
        for (std::size_t i = 0; i < pre_dims.size(); ++i) s.vars[i].second = pre_dims[i];
        if (!ev.eval(fp0, &s, nullptr, env)) return true;
        std::vector<Value> post_dims(body.scope.size(), 0);
        for_each_store(post_dims, cfg.dom, [&]() {
          for (std::size_t i = 0; i < post_dims.size(); ++i) s2.vars[i].second = post_dims[i];
          if (!ev.eval(rel, &s, &s2, env)) return true;
          if (!ev.eval(fq2, &s2, nullptr, env)) {
            report.violations.push_back({3, m.name, body.span, s, s2,
                                         "POST(" + render(fp0) + ") does not hold afterwards"});
            return false;
          }
          return true;
        });
        return true;
      });
    }
  }
};

}  // namespace

SoundnessReport check_soundness(const Program& p, const SemConfig& cfg,
                                const DeriveOptions& opts) {
  SoundnessChecker checker{p, cfg, opts, {}, nullptr};
  for (const auto& m : p.methods) checker.check_method(m);
  return checker.report;
}

}  // namespace mw
