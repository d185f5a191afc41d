#pragma once

#include "oracle.hpp"
#include "relcalc.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mw {

enum class TaskCategory {
  Postcondition,
  Termination,
  Precondition,
  LoopInvariant,
  LoopBodyTerminates,
  LoopMeasureWellFormed,
  LoopMeasureDecreased,
  GlobalSideCondition,
  EffectsReport,
  SpecNontrivial,
  SpecSatisfiable,
};

const char* category_name(TaskCategory c);
std::optional<TaskCategory> category_from_name(const std::string& s);
bool is_loop_category(TaskCategory c);

enum class TaskStatus { Unknown, Valid, Falsified, SolverTimeout };
const char* status_name(TaskStatus s);

struct CounterModel {
  std::vector<std::pair<VarRef, Value>> bindings;
  std::string raw;  // solver text, when it came from a solver
  std::string str() const;
};

struct VerificationTask {
  std::string id;  // deterministic: method:line:col:category[#n]
  TaskCategory category = TaskCategory::Postcondition;
  std::string method;
  Span span;
  FormulaPtr goal;
  std::vector<std::pair<std::string, FormulaPtr>> hypotheses;
  std::string note;
  TaskStatus status = TaskStatus::Unknown;
  std::optional<CounterModel> model;

  // hypotheses => goal
  FormulaPtr closed_formula() const;
};

// The verification-task suite of one method: one Postcondition, one
// Termination, one Precondition per command with a nontrivial derived
// precondition, four tasks per loop, one side-condition task per derived
// g / g_c conjunct, one effects report, and the two specification-validation
// tasks (plus any concrete example checks from the contract).
std::vector<VerificationTask> gen_tasks(const MethodDecl& m, const SemanticModel& model,
                                        const Program& p);

// Exhaustive finite-domain discharge; fills status (and a countermodel on
// falsification). Throws OracleError for non-computable theories or
// oversized state spaces.
TaskStatus check_with_oracle(VerificationTask& t, const Program& p, const SemConfig& cfg);

}  // namespace mw
