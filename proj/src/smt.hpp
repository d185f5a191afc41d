#pragma once

#include "ast.hpp"
#include "vcgen.hpp"

#include <string>
#include <vector>

namespace mw {

struct SmtOptions {
  // Unbounded mode reasons over mathematical integers with MIN_INT/MAX_INT
  // symbolic; bounded mode fixes them as numerals and restricts state
  // constants and goal quantifiers to [-bound, bound] so verdicts agree
  // with the oracle at the same dom.
  bool bounded = false;
  Value bound = 7;
  Value min_int = -(1LL << 31);
  Value max_int = (1LL << 31) - 1;
};

// Self-contained SMT-LIB 2 script: theory declarations, axioms (with
// instantiation patterns), state constants, hypotheses, negated goal,
// check-sat, get-model. Validity of the task = unsat.
std::string emit_smtlib(const VerificationTask& t, const Program& p, const SmtOptions& opts);

struct SolverResult {
  TaskStatus status = TaskStatus::Unknown;
  bool infra_error = false;  // crash or unreadable output, not a verdict
  std::string detail;
  std::string raw;
};

// Writes the script to `script_path`, runs the solver command template
// (`{file}` is replaced by the path) under `timeout_secs`, and maps
// unsat -> valid, sat -> falsified (with the model parsed back to source
// variables), timeout -> solver-timeout. Updates the task in place.
SolverResult check_task(VerificationTask& t, const Program& p, const SmtOptions& opts,
                        const std::string& solver_template, int timeout_secs,
                        const std::string& script_path);

// Bounded worker pool over independent tasks; scripts land in `outdir`.
void check_tasks_with_solver(std::vector<VerificationTask>& tasks, const Program& p,
                             const SmtOptions& opts, const std::string& solver_template,
                             int timeout_secs, int jobs, const std::string& outdir);

// Script file name for a task id (path-safe).
std::string script_file_name(const std::string& task_id);

}  // namespace mw
