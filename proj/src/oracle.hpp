#pragma once

#include "ast.hpp"
#include "formula.hpp"
#include "relcalc_fwd.hpp"
#include "theory_eval.hpp"

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mw {

// Semantics parameters of a run. Stores and quantifiers range over
// [-dom, dom]; machine-int arithmetic traps outside [min_int, max_int].
struct SemConfig {
  Value min_int = -(1LL << 31);
  Value max_int = (1LL << 31) - 1;
  Value dom = 7;
  long long fuel = 10000;
  long long state_cap = 200000000;  // enumeration size guard
};

struct Store {
  std::vector<std::pair<std::string, Value>> vars;

  bool has(const std::string& n) const;
  Value get(const std::string& n) const;
  void set(const std::string& n, Value v);
  void remove(const std::string& n);
  std::string str() const;
  bool operator==(const Store& o) const { return vars == o.vars; }
};

enum class TrapReason { Overflow, DivByZero, Precondition };

struct Outcome {
  enum class Kind { Terminated, Trap, FuelExhausted };
  Kind kind = Kind::Terminated;
  Store store;             // Terminated
  TrapReason reason = TrapReason::Overflow;
  Span span;               // first failing location

  bool terminated() const { return kind == Kind::Terminated; }
  std::string str() const;
};

// Raised for non-computable theory functions, unbound symbols, exploded
// state spaces: infrastructure problems, not verification verdicts.
struct OracleError : std::runtime_error {
  explicit OracleError(const std::string& msg) : std::runtime_error(msg) {}
};

using Env = std::vector<std::pair<std::string, Value>>;

class Evaluator {
 public:
  Evaluator(const Program& prog, const SemConfig& cfg)
      : cfg_(cfg), theories_(TheoryEnv::compile(prog)) {}
  Evaluator(TheoryEnv theories, const SemConfig& cfg)
      : cfg_(cfg), theories_(std::move(theories)) {}

  // Classical evaluation: total arithmetic, quantifiers over [-dom, dom].
  bool eval(const FormulaPtr& f, const Store* pre, const Store* post, Env& env);
  Value eval(const TermPtr& t, const Store* pre, const Store* post, Env& env);

  bool eval_closed(const FormulaPtr& f);
  // validity over all assignments of the free variables (any tag)
  bool valid(const FormulaPtr& f);

  const SemConfig& config() const { return cfg_; }
  const TheoryEnv& theories() const { return theories_; }

 private:
  const SemConfig& cfg_;
  TheoryEnv theories_;
  int depth_ = 0;

  Value apply(const std::string& fn, const std::vector<Value>& args, bool* as_bool);
};

bool eval_formula(const FormulaPtr& f, const Program& prog, const SemConfig& cfg,
                  const Store* pre, const Store* post, const Env& env = {});

// Deterministic big-step execution; every statement and loop iteration
// costs one unit of fuel. Fresh local variables start at 0; calls run the
// callee body after checking its requires clause.
Outcome exec(const CommandPtr& c, const Program& prog, const Store& s, long long fuel,
             const SemConfig& cfg);

// Runs a whole method from a parameter assignment (result starts at 0).
Outcome exec_method(const MethodDecl& m, const Program& prog, const Store& args, long long fuel,
                    const SemConfig& cfg);

// ---- soundness checking ----

struct SoundnessViolation {
  int statement = 1;  // theorem statement 1..3
  std::string method;
  Span span;
  Store pre;
  std::optional<Store> post;
  std::string detail;
  std::string str() const;
};

struct SoundnessWarning {
  std::string method;
  Span span;
  std::string detail;
};

struct SoundnessReport {
  std::vector<SoundnessViolation> violations;
  std::vector<SoundnessWarning> warnings;  // invalid g / g_c assumptions skipped
  long long stores_checked = 0;
  long long nodes_checked = 0;

  bool ok() const { return violations.empty(); }
};

// Enumerates every store over [-dom, dom] per command and checks the three
// statements of the soundness theorem against direct execution. Statement 3
// is checked at the method-body node for a fixed family of post-conditions.
SoundnessReport check_soundness(const Program& p, const SemConfig& cfg,
                                const DeriveOptions& opts = {});

// Odometer over [-dom, dom]^n; calls fn for every assignment, stops early
// when fn returns false. Returns false when stopped early.
bool for_each_store(std::vector<Value>& slots, Value dom, const std::function<bool()>& fn);

}  // namespace mw
