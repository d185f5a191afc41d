#include "vcgen.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace mw {

const char* category_name(TaskCategory c) {
  switch (c) {
    case TaskCategory::Postcondition: return "Postcondition";
    case TaskCategory::Termination: return "Termination";
    case TaskCategory::Precondition: return "Precondition";
    case TaskCategory::LoopInvariant: return "LoopInvariant";
    case TaskCategory::LoopBodyTerminates: return "LoopBodyTerminates";
    case TaskCategory::LoopMeasureWellFormed: return "LoopMeasureWellFormed";
    case TaskCategory::LoopMeasureDecreased: return "LoopMeasureDecreased";
    case TaskCategory::GlobalSideCondition: return "GlobalSideCondition";
    case TaskCategory::EffectsReport: return "EffectsReport";
    case TaskCategory::SpecNontrivial: return "SpecNontrivial";
    default: return "SpecSatisfiable";
  }
}

std::optional<TaskCategory> category_from_name(const std::string& s) {
  static const std::map<std::string, TaskCategory> names = {
      {"Postcondition", TaskCategory::Postcondition},
      {"Termination", TaskCategory::Termination},
      {"Precondition", TaskCategory::Precondition},
      {"LoopInvariant", TaskCategory::LoopInvariant},
      {"LoopBodyTerminates", TaskCategory::LoopBodyTerminates},
      {"LoopMeasureWellFormed", TaskCategory::LoopMeasureWellFormed},
      {"LoopMeasureDecreased", TaskCategory::LoopMeasureDecreased},
      {"GlobalSideCondition", TaskCategory::GlobalSideCondition},
      {"EffectsReport", TaskCategory::EffectsReport},
      {"SpecNontrivial", TaskCategory::SpecNontrivial},
      {"SpecSatisfiable", TaskCategory::SpecSatisfiable},
  };
  auto it = names.find(s);
  if (it == names.end()) return std::nullopt;
  return it->second;
}

bool is_loop_category(TaskCategory c) {
  return c == TaskCategory::LoopInvariant || c == TaskCategory::LoopBodyTerminates ||
         c == TaskCategory::LoopMeasureWellFormed || c == TaskCategory::LoopMeasureDecreased;
}

const char* status_name(TaskStatus s) {
  switch (s) {
    case TaskStatus::Unknown: return "unknown";
    case TaskStatus::Valid: return "valid";
    case TaskStatus::Falsified: return "falsified";
    default: return "solver-timeout";
  }
}

std::string CounterModel::str() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < bindings.size(); ++i) {
    if (i) out << ", ";
    out << bindings[i].first.str() << " = " << bindings[i].second;
  }
  return out.str();
}

FormulaPtr VerificationTask::closed_formula() const {
  FormulaPtr hyp = f_true();
  for (const auto& [name, f] : hypotheses) hyp = conj(hyp, f);
  return impl(hyp, goal);
}

namespace {

struct TaskBuilder {
  const MethodDecl& m;
  const SemanticModel& model;
  const Program& p;
  std::vector<VerificationTask> tasks;
  std::map<std::string, int> id_counts;

  std::string make_id(Span sp, TaskCategory cat) {
    std::string base = m.name + ":" + std::to_string(sp.line) + ":" + std::to_string(sp.col) +
                       ":" + category_name(cat);
    int n = id_counts[base]++;
    if (n == 0) return base;
    return base + "#" + std::to_string(n);
  }

  VerificationTask& add(TaskCategory cat, Span sp, FormulaPtr goal,
                        std::vector<std::pair<std::string, FormulaPtr>> hyps = {}) {
    VerificationTask t;
    t.category = cat;
    t.method = m.name;
    t.span = sp;
    t.goal = std::move(goal);
    t.hypotheses = std::move(hyps);
    t.id = make_id(sp, cat);
    tasks.push_back(std::move(t));
    return tasks.back();
  }

  // q with the return value replaced by a fresh logical variable
  FormulaPtr ensures_on(const TermPtr& result_value) const {
    return substitute(m.contract.ensures_f, {{post_var(kResultVar), result_value}});
  }

  void postcondition() {
    const NodeSemantics& body = model.body();
    std::vector<std::pair<std::string, FormulaPtr>> hyps;
    if (!is_true(m.contract.requires_f)) hyps.emplace_back("requires", m.contract.requires_f);
    hyps.emplace_back("body relation", body.rel.relation);
    add(TaskCategory::Postcondition, m.span, m.contract.ensures_f, std::move(hyps));
  }

  void termination() {
    const NodeSemantics& body = model.body();
    std::vector<std::pair<std::string, FormulaPtr>> hyps;
    if (!is_true(m.contract.requires_f)) hyps.emplace_back("requires", m.contract.requires_f);
    if (!is_false(m.contract.diverges_f))
      hyps.emplace_back("not diverges", f_not(m.contract.diverges_f));
    add(TaskCategory::Termination, m.span, body.term.cond, std::move(hyps));
  }

  void preconditions() {
    for (const auto& node : model.nodes) {
      if (is_true(node.rel_raw.pre)) continue;
      add(TaskCategory::Precondition, node.span, node.rel.pre,
          {{"pre-state knowledge", node.knowledge}});
    }
  }

  void loops() {
    for (const auto& node : model.nodes) {
      if (node.node->kind != Command::Kind::While) continue;
      const NodeSemantics* body_sem = model.find(node.node->c1.get());
      LoopThreeState ts =
          loop_three_state(*node.node, body_sem->rel_raw, body_sem->term_raw, node.scope);
      SimplifyConfig scfg;
      FormulaPtr inv_y = simplify(ts.inv_entry_y, scfg);
      FormulaPtr cond_y = simplify(ts.cond_y, scfg);
      FormulaPtr rel_yz = simplify(ts.body_rel_yz, scfg);
      add(TaskCategory::LoopInvariant, node.span, simplify(ts.inv_entry_z, scfg),
          {{"invariant before iteration", inv_y},
           {"loop condition", cond_y},
           {"body relation", rel_yz}});
      add(TaskCategory::LoopBodyTerminates, node.span, simplify(ts.body_term_y, scfg),
          {{"invariant before iteration", inv_y}, {"loop condition", cond_y}});
      add(TaskCategory::LoopMeasureWellFormed, node.span,
          f_cmp(CmpOp::Le, t_int(0), ts.measure_z),
          {{"invariant before iteration", inv_y},
           {"loop condition", cond_y},
           {"body relation", rel_yz}});
      add(TaskCategory::LoopMeasureDecreased, node.span,
          f_cmp(CmpOp::Lt, ts.measure_z, ts.measure_y),
          {{"invariant before iteration", inv_y},
           {"loop condition", cond_y},
           {"body relation", rel_yz}});
    }
  }

  void side_conditions() {
    // Loops are the only source of g / g_c conjuncts; report each one where
    // it arises. The loop node's own global also carries its body's
    // conjuncts, so take the judgment-local contribution only.
    for (const auto& node : model.nodes) {
      if (node.node->kind != Command::Kind::While) continue;
      const NodeSemantics* body_sem = model.find(node.node->c1.get());
      LoopThreeState ts =
          loop_three_state(*node.node, body_sem->rel_raw, body_sem->term_raw, node.scope);
      // recreate the judgment-local obligations exactly as the rules do
      FormulaPtr hyp = conj_all({ts.inv_entry_y, ts.cond_y, ts.body_rel_yz});
      FormulaPtr g = f_forall(
          [&] {
            std::vector<VarRef> b = ts.entry_vars;
            b.insert(b.end(), ts.iter_vars.begin(), ts.iter_vars.end());
            return b;
          }(),
          impl(hyp, conj_all({ts.cond_def_y, ts.body_pre_y, ts.inv_entry_z})));
      FormulaPtr gc = f_forall(
          [&] {
            std::vector<VarRef> b = ts.entry_vars;
            b.insert(b.end(), ts.iter_vars.begin(), ts.iter_vars.end());
            return b;
          }(),
          impl(hyp, conj_all({ts.body_term_y, f_cmp(CmpOp::Le, t_int(0), ts.measure_z),
                              f_cmp(CmpOp::Lt, ts.measure_z, ts.measure_y)})));
      SimplifyConfig scfg;
      if (!is_true(g)) {
        auto& t = add(TaskCategory::GlobalSideCondition, node.span, simplify(g, scfg));
        t.note = "invariant preservation (g)";
      }
      if (!is_true(gc)) {
        auto& t = add(TaskCategory::GlobalSideCondition, node.span, simplify(gc, scfg));
        t.note = "loop termination (g_c)";
      }
    }
  }

  void effects() {
    const NodeSemantics& body = model.body();
    std::set<std::string> allowed = m.contract.assignable;
    allowed.insert(kResultVar);
    std::vector<std::string> excess;
    for (const auto& v : body.rel.frame)
      if (!allowed.count(v)) excess.push_back(v);
    auto& t = add(TaskCategory::EffectsReport, m.span, f_bool(excess.empty()));
    std::ostringstream note;
    note << "derived frame {";
    bool first = true;
    for (const auto& v : body.rel.frame) {
      if (!first) note << ", ";
      note << v;
      first = false;
    }
    note << "}";
    if (!excess.empty()) {
      note << "; outside assignable:";
      for (const auto& v : excess) note << " " << v;
    }
    t.note = note.str();
  }

  void spec_validation() {
    VarRef out = log_var("res");
    FormulaPtr q = ensures_on(t_var(out));
    // every precondition state admits an output the spec rejects
    add(TaskCategory::SpecNontrivial, m.span,
        impl(m.contract.requires_f, f_exists({out}, f_not(q))));
    // and an output the spec accepts
    add(TaskCategory::SpecSatisfiable, m.span,
        impl(m.contract.requires_f, f_exists({out}, q)));

    for (const auto& ex : m.contract.examples) {
      SubstMap inputs;
      for (const auto& [name, value] : ex.inputs) inputs[pre_var(name)] = t_int(value);
      FormulaPtr p_inst = substitute(m.contract.requires_f, inputs);
      FormulaPtr q_inst = substitute(ensures_on(t_int(ex.output)), inputs);
      if (ex.positive) {
        auto& t = add(TaskCategory::SpecSatisfiable, ex.span, conj(p_inst, q_inst));
        t.note = "concrete example accepted";
      } else {
        auto& t = add(TaskCategory::SpecNontrivial, ex.span, conj(p_inst, f_not(q_inst)));
        t.note = "concrete counterexample rejected";
      }
    }
  }

  std::vector<VerificationTask> build() {
    postcondition();
    termination();
    preconditions();
    loops();
    side_conditions();
    effects();
    spec_validation();
    return std::move(tasks);
  }
};

}  // namespace

std::vector<VerificationTask> gen_tasks(const MethodDecl& m, const SemanticModel& model,
                                        const Program& p) {
  TaskBuilder b{m, model, p, {}, {}};
  return b.build();
}

TaskStatus check_with_oracle(VerificationTask& t, const Program& p, const SemConfig& cfg) {
  SimplifyConfig scfg;
  FormulaPtr formula = simplify(t.closed_formula(), scfg);
  Evaluator ev(p, cfg);

  std::set<VarRef> free = free_vars(formula);
  Store pre, post;
  Env env;
  for (const auto& v : free) {
    switch (v.tag) {
      case VarTag::Pre: pre.set(v.name, 0); break;
      case VarTag::Post: post.set(v.name, 0); break;
      case VarTag::Logical: env.emplace_back(v.name, 0); break;
    }
  }
  double space = 1;
  for (std::size_t i = 0; i < free.size(); ++i) space *= (2.0 * cfg.dom + 1);
  if (space > static_cast<double>(cfg.state_cap))
    throw OracleError("state space too large for task " + t.id);

  std::vector<Value*> slots;
  for (auto& [k, v] : pre.vars) slots.push_back(&v);
  for (auto& [k, v] : post.vars) slots.push_back(&v);
  for (auto& [k, v] : env) slots.push_back(&v);

  std::vector<Value> dims(slots.size(), 0);
  bool ok = for_each_store(dims, cfg.dom, [&]() {
    for (std::size_t i = 0; i < slots.size(); ++i) *slots[i] = dims[i];
    return ev.eval(formula, &pre, &post, env);
  });

  if (ok) {
    t.status = TaskStatus::Valid;
    t.model.reset();
    return t.status;
  }
  CounterModel cm;
  for (const auto& [k, v] : pre.vars) cm.bindings.emplace_back(pre_var(k), v);
  for (const auto& [k, v] : post.vars) cm.bindings.emplace_back(post_var(k), v);
  for (const auto& [k, v] : env) cm.bindings.emplace_back(log_var(k), v);
  t.model = std::move(cm);
  t.status = TaskStatus::Falsified;
  return t.status;
}

}  // namespace mw
