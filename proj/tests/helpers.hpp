#pragma once

#include "oracle.hpp"
#include "parser.hpp"
#include "typecheck.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace mw::test {

inline Program empty_program() { return Program{}; }

inline SemConfig small_config(Value dom = 4) {
  SemConfig cfg;
  cfg.min_int = -8;
  cfg.max_int = 7;
  cfg.dom = dom;
  return cfg;
}

// Truth tables over all assignments of both formulas' free variables.
inline bool equivalent(const FormulaPtr& a, const FormulaPtr& b, const Program& prog,
                       const SemConfig& cfg) {
  Evaluator ev(prog, cfg);
  std::set<VarRef> free = free_vars(a);
  collect_free_vars(b, free);
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
  for (auto& [k, v] : pre.vars) slots.push_back(&v);
  for (auto& [k, v] : post.vars) slots.push_back(&v);
  for (auto& [k, v] : env) slots.push_back(&v);
  std::vector<Value> dims(slots.size(), 0);
  return for_each_store(dims, cfg.dom, [&]() {
    for (std::size_t i = 0; i < slots.size(); ++i) *slots[i] = dims[i];
    return ev.eval(a, &pre, &post, env) == ev.eval(b, &pre, &post, env);
  });
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Program load_checked(const std::string& path, Value min_int = -8, Value max_int = 7) {
  Program p = parse_program(read_file(path), path);
  TypecheckConfig cfg{min_int, max_int};
  auto diags = typecheck(p, cfg);
  if (!diags.empty()) {
    std::string msg = "typecheck failed for " + path + ":";
    for (const auto& d : diags) msg += "\n  " + d.str();
    throw std::runtime_error(msg);
  }
  return p;
}

// Random two-state formulas for the simplifier / renderer property tests.
struct FormulaGen {
  std::mt19937 rng;
  int binder_count = 0;
  std::vector<VarRef> bound;

  explicit FormulaGen(unsigned seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  TermPtr term(int depth) {
    int choice = pick(depth <= 0 ? 2 : 8);
    switch (choice) {
      case 0: return t_int(pick(9) - 4);
      case 1: {
        std::vector<VarRef> pool = {pre_var("x"), post_var("x"), pre_var("y")};
        for (const auto& b : bound) pool.push_back(b);
        return t_var(pool[pick(static_cast<int>(pool.size()))]);
      }
      case 2: return t_neg(term(depth - 1));
      case 3: return t_add(term(depth - 1), term(depth - 1));
      case 4: return t_sub(term(depth - 1), term(depth - 1));
      case 5: return t_mul(term(depth - 1), term(depth - 1));
      case 6: return t_ite(formula(depth - 1), term(depth - 1), term(depth - 1));
      default: return pick(2) ? t_add(term(depth - 1), t_int(0)) : t_mul(term(depth - 1), t_int(1));
    }
  }

  FormulaPtr formula(int depth) {
    int choice = pick(depth <= 0 ? 3 : 12);
    switch (choice) {
      case 0: return f_bool(pick(2));
      case 1:
      case 2:
        return f_cmp(static_cast<CmpOp>(pick(6)), term(depth - 1), term(depth - 1));
      case 3: return f_not(formula(depth - 1));
      case 4: return f_and(formula(depth - 1), formula(depth - 1));
      case 5: return f_or(formula(depth - 1), formula(depth - 1));
      case 6: return f_implies(formula(depth - 1), formula(depth - 1));
      case 7: return f_iff(formula(depth - 1), formula(depth - 1));
      case 8: return f_ite(formula(depth - 1), formula(depth - 1), formula(depth - 1));
      case 9:
      case 10: {
        VarRef b = log_var("q" + std::to_string(++binder_count));
        bound.push_back(b);
        FormulaPtr body = formula(depth - 1);
        bound.pop_back();
        // bias towards one-point shapes
        if (pick(2)) body = f_and(f_eq(t_var(b), term(depth - 1)), body);
        return choice == 9 ? f_forall({b}, body) : f_exists({b}, body);
      }
      default: return f_and(formula(depth - 1), f_true());
    }
  }
};

}  // namespace mw::test
