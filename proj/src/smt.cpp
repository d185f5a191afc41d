#include "smt.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <sys/wait.h>
#include <thread>

namespace mw {

namespace {

bool uses_division(const TermPtr& t);

bool uses_division(const FormulaPtr& f) {
  if (!f) return false;
  if (uses_division(f->lhs) || uses_division(f->rhs)) return true;
  for (const auto& t : f->targs)
    if (uses_division(t)) return true;
  for (const auto& k : f->kids)
    if (uses_division(k)) return true;
  return uses_division(f->body);
}

bool uses_division(const TermPtr& t) {
  if (!t) return false;
  if (t->kind == Term::Kind::Div || t->kind == Term::Kind::Mod) return true;
  if (uses_division(t->cond)) return true;
  for (const auto& a : t->args)
    if (uses_division(a)) return true;
  return false;
}

std::string smt_symbol(const std::string& name) { return "|" + name + "|"; }

std::string smt_int(Value v) {
  if (v < 0) return "(- " + std::to_string(-v) + ")";
  return std::to_string(v);
}

struct Emitter {
  const SmtOptions& opts;
  std::ostringstream out;

  std::string range_guard(const std::string& sym, bool state_range) const {
    std::string lo, hi;
    if (opts.bounded && state_range) {
      lo = smt_int(-opts.bound);
      hi = smt_int(opts.bound);
    } else {
      lo = "MIN_INT";
      hi = "MAX_INT";
    }
    return "(and (<= " + lo + " " + sym + ") (<= " + sym + " " + hi + "))";
  }

  void term(const TermPtr& t) {
    switch (t->kind) {
      case Term::Kind::IntLit: out << smt_int(t->value); return;
      case Term::Kind::Var: out << smt_symbol(t->var.str()); return;
      case Term::Kind::MinInt: out << "MIN_INT"; return;
      case Term::Kind::MaxInt: out << "MAX_INT"; return;
      case Term::Kind::Neg:
        out << "(- ";
        term(t->args[0]);
        out << ")";
        return;
      case Term::Kind::Add:
      case Term::Kind::Sub:
      case Term::Kind::Mul: {
        const char* op = t->kind == Term::Kind::Add ? "+" : t->kind == Term::Kind::Sub ? "-" : "*";
        out << "(" << op << " ";
        term(t->args[0]);
        out << " ";
        term(t->args[1]);
        out << ")";
        return;
      }
      case Term::Kind::Div:
      case Term::Kind::Mod:
        out << "(" << (t->kind == Term::Kind::Div ? "tdiv" : "tmod") << " ";
        term(t->args[0]);
        out << " ";
        term(t->args[1]);
        out << ")";
        return;
      case Term::Kind::Ite:
        out << "(ite ";
        formula(t->cond, false);
        out << " ";
        term(t->args[0]);
        out << " ";
        term(t->args[1]);
        out << ")";
        return;
      case Term::Kind::App:
        if (t->args.empty()) {
          out << smt_symbol(t->fn);
          return;
        }
        out << "(" << smt_symbol(t->fn);
        for (const auto& a : t->args) {
          out << " ";
          term(a);
        }
        out << ")";
        return;
    }
  }

  // bound_quants: restrict quantified variables to the bounded range
  // (used for hypotheses/goal in bounded mode, never for axioms).
  void formula(const FormulaPtr& f, bool bound_quants) {
    switch (f->kind) {
      case Formula::Kind::True: out << "true"; return;
      case Formula::Kind::False: out << "false"; return;
      case Formula::Kind::Cmp: {
        const char* op;
        bool negate = false;
        switch (f->cmp) {
          case CmpOp::Eq: op = "="; break;
          case CmpOp::Ne: op = "="; negate = true; break;
          case CmpOp::Lt: op = "<"; break;
          case CmpOp::Le: op = "<="; break;
          case CmpOp::Gt: op = ">"; break;
          default: op = ">="; break;
        }
        if (negate) out << "(not ";
        out << "(" << op << " ";
        term(f->lhs);
        out << " ";
        term(f->rhs);
        out << ")";
        if (negate) out << ")";
        return;
      }
      case Formula::Kind::Pred:
        if (f->targs.empty()) {
          out << smt_symbol(f->fn);
          return;
        }
        out << "(" << smt_symbol(f->fn);
        for (const auto& a : f->targs) {
          out << " ";
          term(a);
        }
        out << ")";
        return;
      case Formula::Kind::Not:
        out << "(not ";
        formula(f->kids[0], bound_quants);
        out << ")";
        return;
      case Formula::Kind::And:
      case Formula::Kind::Or: {
        out << "(" << (f->kind == Formula::Kind::And ? "and" : "or");
        for (const auto& k : f->kids) {
          out << " ";
          formula(k, bound_quants);
        }
        out << ")";
        return;
      }
      case Formula::Kind::Implies:
        out << "(=> ";
        formula(f->kids[0], bound_quants);
        out << " ";
        formula(f->kids[1], bound_quants);
        out << ")";
        return;
      case Formula::Kind::Iff:
        out << "(= ";
        formula(f->kids[0], bound_quants);
        out << " ";
        formula(f->kids[1], bound_quants);
        out << ")";
        return;
      case Formula::Kind::Ite:
        out << "(ite ";
        formula(f->kids[0], bound_quants);
        out << " ";
        formula(f->kids[1], bound_quants);
        out << " ";
        formula(f->kids[2], bound_quants);
        out << ")";
        return;
      case Formula::Kind::Forall:
      case Formula::Kind::Exists: {
        bool forall = f->kind == Formula::Kind::Forall;
        out << "(" << (forall ? "forall" : "exists") << " (";
        for (std::size_t i = 0; i < f->binders.size(); ++i) {
          if (i) out << " ";
          out << "(" << smt_symbol(f->binders[i].str()) << " Int)";
        }
        out << ") ";
        if (bound_quants && opts.bounded) {
          std::string guard;
          for (const auto& b : f->binders) {
            std::string g = range_guard(smt_symbol(b.str()), true);
            guard = guard.empty() ? g : "(and " + guard + " " + g + ")";
          }
          out << (forall ? "(=> " : "(and ") << guard << " ";
          formula(f->body, bound_quants);
          out << ")";
        } else {
          formula(f->body, bound_quants);
        }
        out << ")";
        return;
      }
    }
  }
};

// First application of a declared function that mentions every binder, used
// as an instantiation pattern for the axiom.
TermPtr find_pattern(const FormulaPtr& axiom) {
  if (axiom->kind != Formula::Kind::Forall) return nullptr;
  std::set<VarRef> binders(axiom->binders.begin(), axiom->binders.end());
  TermPtr found;
  std::function<void(const TermPtr&)> scan_t = [&](const TermPtr& t) {
    if (!t || found) return;
    if (t->kind == Term::Kind::App) {
      std::set<VarRef> fv = free_vars(t);
      bool all = true;
      for (const auto& b : binders)
        if (!fv.count(b)) all = false;
      if (all) {
        found = t;
        return;
      }
    }
    if (t->cond) {
      // conditions scanned below via formulas
    }
    for (const auto& a : t->args) scan_t(a);
  };
  std::function<void(const FormulaPtr&)> scan_f = [&](const FormulaPtr& f) {
    if (!f || found) return;
    scan_t(f->lhs);
    scan_t(f->rhs);
    for (const auto& t : f->targs) scan_t(t);
    for (const auto& k : f->kids) scan_f(k);
    scan_f(f->body);
  };
  scan_f(axiom->body);
  return found;
}

}  // namespace

std::string emit_smtlib(const VerificationTask& t, const Program& p, const SmtOptions& opts) {
  Emitter em{opts, {}};
  std::ostringstream& out = em.out;
  out << "; task " << t.id << " (" << category_name(t.category) << ")\n";
  out << "; validity is encoded as unsatisfiability of hypotheses and negated goal\n";
  out << "(set-logic ALL)\n";

  if (opts.bounded) {
    out << "(define-fun MIN_INT () Int " << smt_int(opts.min_int) << ")\n";
    out << "(define-fun MAX_INT () Int " << smt_int(opts.max_int) << ")\n";
  } else {
    out << "(declare-const MIN_INT Int)\n(declare-const MAX_INT Int)\n";
    out << "(assert (< MIN_INT 0))\n(assert (> MAX_INT 0))\n";
  }

  bool division = uses_division(t.goal);
  for (const auto& [name, h] : t.hypotheses) division = division || uses_division(h);
  for (const auto& th : p.theories)
    for (const auto& ax : th.axioms) division = division || uses_division(ax.formula);
  if (division) {
    // truncated division, total with t/0 = 0 and t%0 = 0 like the oracle
    out << "(define-fun tdiv ((a Int) (b Int)) Int\n"
           "  (ite (= b 0) 0 (ite (or (= (mod a b) 0) (>= a 0)) (div a b)\n"
           "    (ite (> b 0) (+ (div a b) 1) (- (div a b) 1)))))\n";
    out << "(define-fun tmod ((a Int) (b Int)) Int (ite (= b 0) 0 (- a (* b (tdiv a b)))))\n";
  }

  for (const auto& th : p.theories) {
    for (const auto& fn : th.functions) {
      out << "(declare-fun " << smt_symbol(fn.name) << " (";
      for (std::size_t i = 0; i < fn.arg_sorts.size(); ++i) {
        if (i) out << " ";
        out << (fn.arg_sorts[i] == Sort::Int ? "Int" : "Bool");
      }
      out << ") " << (fn.result == Sort::Int ? "Int" : "Bool") << ")\n";
    }
  }
  for (const auto& th : p.theories) {
    for (const auto& ax : th.axioms) {
      out << "; axiom " << ax.name << "\n";
      TermPtr pattern = find_pattern(ax.formula);
      if (pattern && ax.formula->kind == Formula::Kind::Forall) {
        out << "(assert (forall (";
        for (std::size_t i = 0; i < ax.formula->binders.size(); ++i) {
          if (i) out << " ";
          out << "(" << smt_symbol(ax.formula->binders[i].str()) << " Int)";
        }
        out << ") (! ";
        em.formula(ax.formula->body, false);
        out << " :pattern (";
        em.term(pattern);
        out << "))))\n";
      } else {
        out << "(assert ";
        em.formula(ax.formula, false);
        out << ")\n";
      }
    }
  }

  // free variables of the task become state constants over the int range
  std::set<VarRef> free = free_vars(t.goal);
  for (const auto& [name, h] : t.hypotheses) collect_free_vars(h, free);
  for (const auto& v : free) {
    std::string sym = smt_symbol(v.str());
    out << "(declare-const " << sym << " Int)\n";
    out << "(assert " << em.range_guard(sym, true) << ")\n";
  }

  for (const auto& [name, h] : t.hypotheses) {
    out << "; hypothesis: " << name << "\n(assert ";
    em.formula(h, true);
    out << ")\n";
  }
  out << "; negated goal\n(assert (not ";
  em.formula(t.goal, true);
  out << "))\n";
  out << "(check-sat)\n(get-model)\n";
  return out.str();
}

std::string script_file_name(const std::string& task_id) {
  std::string name = task_id;
  for (char& c : name)
    if (c == ':' || c == '#' || c == '/' || c == ' ') c = '_';
  return name + ".smt2";
}

namespace {

std::string run_command(const std::string& cmd, int& exit_code) {
  std::string full = cmd + " 2>&1";
  FILE* pipe = popen(full.c_str(), "r");
  if (!pipe) {
    exit_code = -1;
    return "";
  }
  std::string output;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) output.append(buf, n);
  int rc = pclose(pipe);
  exit_code = (rc >= 0 && WIFEXITED(rc)) ? WEXITSTATUS(rc) : -1;
  return output;
}

std::optional<VarRef> var_from_symbol(std::string sym) {
  if (sym.size() >= 2 && sym.front() == '|' && sym.back() == '|')
    sym = sym.substr(1, sym.size() - 2);
  if (sym.size() > 2 && sym[sym.size() - 2] == '$') {
    std::string base = sym.substr(0, sym.size() - 2);
    return VarRef{base, sym.back() == '0' ? VarTag::Pre : VarTag::Post};
  }
  if (sym == "MIN_INT" || sym == "MAX_INT" || sym == "tdiv" || sym == "tmod") return std::nullopt;
  return log_var(sym);
}

CounterModel parse_model(const std::string& output, const VerificationTask& t) {
  CounterModel cm;
  cm.raw = output;
  std::set<VarRef> wanted = free_vars(t.goal);
  for (const auto& [name, h] : t.hypotheses) collect_free_vars(h, wanted);
  static const std::regex def_re(
      R"(\(define-fun\s+(\|[^|]+\||[^\s()]+)\s+\(\)\s+Int\s+(\(-\s*\d+\)|-?\d+)\s*\))");
  auto begin = std::sregex_iterator(output.begin(), output.end(), def_re);
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    std::optional<VarRef> v = var_from_symbol((*it)[1].str());
    if (!v || !wanted.count(*v)) continue;
    std::string val = (*it)[2].str();
    Value x = 0;
    if (val.front() == '(') {
      std::string digits;
      for (char c : val)
        if (isdigit(static_cast<unsigned char>(c))) digits += c;
      x = -std::stoll(digits);
    } else {
      x = std::stoll(val);
    }
    cm.bindings.emplace_back(*v, x);
  }
  std::sort(cm.bindings.begin(), cm.bindings.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return cm;
}

}  // namespace

SolverResult check_task(VerificationTask& t, const Program& p, const SmtOptions& opts,
                        const std::string& solver_template, int timeout_secs,
                        const std::string& script_path) {
  SolverResult res;
  std::string script = emit_smtlib(t, p, opts);
  {
    std::ofstream f(script_path);
    if (!f) {
      res.infra_error = true;
      res.detail = "cannot write " + script_path;
      return res;
    }
    f << script;
  }
  std::string cmd = solver_template;
  const std::string key = "{file}";
  for (std::size_t pos = cmd.find(key); pos != std::string::npos; pos = cmd.find(key))
    cmd.replace(pos, key.size(), script_path);
  if (timeout_secs > 0)
    cmd = "timeout " + std::to_string(timeout_secs) + "s " + cmd;

  int exit_code = 0;
  std::string output = run_command(cmd, exit_code);
  res.raw = output;

  std::istringstream lines(output);
  std::string verdict;
  std::getline(lines, verdict);
  while (!verdict.empty() && (verdict.back() == '\r' || verdict.back() == ' '))
    verdict.pop_back();

  if (exit_code == 124) {
    t.status = TaskStatus::SolverTimeout;
    res.status = t.status;
    return res;
  }
  if (verdict == "unsat") {
    t.status = TaskStatus::Valid;
    t.model.reset();
  } else if (verdict == "sat") {
    t.status = TaskStatus::Falsified;
    t.model = parse_model(output, t);
  } else if (verdict == "unknown") {
    t.status = TaskStatus::Unknown;
  } else {
    res.infra_error = true;
    res.detail = "solver produced no verdict (exit " + std::to_string(exit_code) + ")";
    return res;
  }
  res.status = t.status;
  return res;
}

void check_tasks_with_solver(std::vector<VerificationTask>& tasks, const Program& p,
                             const SmtOptions& opts, const std::string& solver_template,
                             int timeout_secs, int jobs, const std::string& outdir) {
  std::filesystem::create_directories(outdir);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      std::string path = (std::filesystem::path(outdir) / script_file_name(tasks[i].id)).string();
      check_task(tasks[i], p, opts, solver_template, timeout_secs, path);
    }
  };
  jobs = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace mw
