#include "cli.hpp"

#include "formula_json.hpp"
#include "oracle.hpp"
#include "parser.hpp"
#include "relcalc.hpp"
#include "smt.hpp"
#include "typecheck.hpp"
#include "vcgen.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace mw {

namespace {

using nlohmann::json;

struct CommonOpts {
  std::vector<std::string> files;
  Value max_int = (1LL << 31) - 1;
  Value min_int = 0;  // 0 = derive from max_int
  Value dom = 7;
  long long fuel = 10000;
  bool no_simplify = false;
  std::string simplify_rules;
  std::string format = "text";

  SemConfig sem() const {
    SemConfig cfg;
    cfg.max_int = max_int;
    cfg.min_int = min_int != 0 ? min_int : -max_int - 1;
    cfg.dom = dom;
    cfg.fuel = fuel;
    return cfg;
  }

  SimplifyConfig simplify() const {
    SimplifyConfig s;
    if (!simplify_rules.empty()) {
      std::istringstream in(simplify_rules);
      std::string rule;
      while (std::getline(in, rule, ',')) {
        if (!SimplifyConfig::known_rules().count(rule))
          throw CLI::ValidationError("--simplify", "unknown rule '" + rule + "'");
        s.enabled.insert(rule);
      }
    }
    return s;
  }
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_files = true) {
  auto* files = cmd->add_option("files", o.files, "MiniWhile source files (*.mw)");
  if (needs_files) files->required()->expected(-1);
  cmd->add_option("--max-int", o.max_int, "value of MAX_INT (default 2^31-1)");
  cmd->add_option("--min-int", o.min_int, "value of MIN_INT (default -MAX_INT-1)");
  cmd->add_option("--dom", o.dom, "finite domain bound for stores and quantifiers");
  cmd->add_option("--fuel", o.fuel, "execution step budget");
  cmd->add_flag("--no-simplify", o.no_simplify, "show raw formulas instead of simplified ones");
  cmd->add_option("--simplify", o.simplify_rules, "comma-separated simplifier rules to enable");
  cmd->add_option("--format", o.format, "output format: text | json")
      ->check(CLI::IsMember({"text", "json"}));
}

struct Loaded {
  Program program;
};

// Parses and typechecks all input files into one program.
Loaded load(const CommonOpts& o, std::ostream& err) {
  Program merged;
  for (const auto& file : o.files) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file);
    std::stringstream buf;
    buf << in.rdbuf();
    Program p;
    try {
      p = parse_program(buf.str(), file);
    } catch (const ParseError& e) {
      throw std::runtime_error(file + ":" + e.rendered);
    }
    if (merged.file.empty()) merged.file = file;
    for (auto& t : p.theories) merged.theories.push_back(std::move(t));
    for (auto& m : p.methods) merged.methods.push_back(std::move(m));
  }
  SemConfig cfg = o.sem();
  if (cfg.dom > cfg.max_int) throw std::runtime_error("--dom must not exceed MAX_INT");
  TypecheckConfig tcfg{cfg.min_int, cfg.max_int};
  std::vector<Diagnostic> diags = typecheck(merged, tcfg);
  if (!diags.empty()) {
    for (const auto& d : diags) err << d.str() << "\n";
    throw std::runtime_error(std::to_string(diags.size()) + " diagnostic(s)");
  }
  return {std::move(merged)};
}

std::pair<std::string, int> parse_location(const std::string& loc) {
  auto pos = loc.rfind(':');
  if (pos == std::string::npos || pos + 1 >= loc.size())
    throw std::runtime_error("location must be file:line");
  return {loc.substr(0, pos), std::stoi(loc.substr(pos + 1))};
}

const char* node_kind_name(Command::Kind k) {
  switch (k) {
    case Command::Kind::Assign: return "assignment";
    case Command::Kind::VarBlock: return "var block";
    case Command::Kind::Seq: return "sequence";
    case Command::Kind::IfThen: return "if";
    case Command::Kind::IfThenElse: return "if-else";
    case Command::Kind::While: return "while";
    case Command::Kind::Call: return "call";
    default: return "return";
  }
}

std::string frame_str(const std::set<std::string>& frame) {
  std::string out = "{";
  bool first = true;
  for (const auto& v : frame) {
    if (!first) out += ", ";
    out += v;
    first = false;
  }
  return out + "}";
}

json span_json(const Span& sp) {
  return json{{"line", sp.line}, {"col", sp.col}, {"end_line", sp.end_line},
              {"end_col", sp.end_col}};
}

json node_json(const NodeSemantics& n) {
  json j;
  j["kind"] = node_kind_name(n.node->kind);
  j["span"] = span_json(n.span);
  j["frame"] = n.rel.frame;
  j["relation"] = {{"raw", render(n.rel_raw.relation)},
                   {"simplified", render(n.rel.relation)},
                   {"json", to_json(n.rel.relation)}};
  j["termination"] = {{"raw", render(n.term_raw.cond)}, {"simplified", render(n.term.cond)}};
  j["precondition"] = {{"raw", render(n.rel_raw.pre)}, {"simplified", render(n.rel.pre)}};
  j["knowledge"] = {{"raw", render(n.knowledge_raw)}, {"simplified", render(n.knowledge)}};
  j["global"] = {{"raw", render(n.rel_raw.global)}, {"simplified", render(n.rel.global)}};
  j["termination_global"] = {{"raw", render(n.term_raw.global)},
                             {"simplified", render(n.term.global)}};
  return j;
}

json task_json(const VerificationTask& t) {
  json j;
  j["id"] = t.id;
  j["category"] = category_name(t.category);
  j["method"] = t.method;
  j["span"] = span_json(t.span);
  j["goal"] = {{"text", render(t.goal)}, {"json", to_json(t.goal)}};
  json hyps = json::array();
  for (const auto& [name, f] : t.hypotheses)
    hyps.push_back(json{{"name", name}, {"text", render(f)}});
  j["hypotheses"] = std::move(hyps);
  if (!t.note.empty()) j["note"] = t.note;
  j["status"] = status_name(t.status);
  if (t.model) j["countermodel"] = t.model->str();
  return j;
}

// ---- subcommand bodies ----

int cmd_translate(const CommonOpts& o, bool raw, std::ostream& out, std::ostream& err) {
  Loaded l = load(o, err);
  SimplifyConfig scfg = o.simplify();
  json jmethods = json::array();
  for (const auto& m : l.program.methods) {
    SemanticModel model = build_semantic_model(m, l.program, {}, scfg);
    if (o.format == "json") {
      json jm;
      jm["method"] = m.name;
      json nodes = json::array();
      for (const auto& n : model.nodes) nodes.push_back(node_json(n));
      jm["nodes"] = std::move(nodes);
      jmethods.push_back(std::move(jm));
      continue;
    }
    const NodeSemantics& body = model.body();
    out << "method " << m.name << ":\n";
    out << "  frame: " << frame_str(body.rel.frame) << "\n";
    out << "  relation: " << render(o.no_simplify ? body.rel_raw.relation : body.rel.relation)
        << "\n";
    if (raw && !o.no_simplify) out << "  relation (raw): " << render(body.rel_raw.relation) << "\n";
    out << "  termination: " << render(o.no_simplify ? body.term_raw.cond : body.term.cond)
        << "\n";
    if (!is_true(body.rel.global))
      out << "  side condition g: " << render(body.rel.global) << "\n";
    if (!is_true(body.term.global))
      out << "  side condition g_c: " << render(body.term.global) << "\n";
    out << "  commands:\n";
    for (const auto& n : model.nodes) {
      out << "    " << std::string(2 * n.depth, ' ') << "[" << n.span.str() << "] "
          << node_kind_name(n.node->kind) << "  frame " << frame_str(n.rel.frame) << "\n";
      out << "    " << std::string(2 * n.depth, ' ') << "  relation: "
          << render(o.no_simplify ? n.rel_raw.relation : n.rel.relation) << "\n";
    }
    out << "\n";
  }
  if (o.format == "json") out << jmethods.dump(2) << "\n";
  return 0;
}

// The method and node addressed by file:line, or null.
const MethodDecl* method_at(const Program& p, int line) {
  for (const auto& m : p.methods)
    if (m.span.covers_line(line)) return &m;
  return nullptr;
}

int cmd_semantics(const CommonOpts& o, const std::string& at, std::ostream& out,
                  std::ostream& err) {
  Loaded l = load(o, err);
  auto [file, line] = parse_location(at);
  const MethodDecl* m = method_at(l.program, line);
  if (!m) {
    err << "no command at " << at << "\n";
    return 2;
  }
  SemanticModel model = build_semantic_model(*m, l.program, {}, o.simplify());
  const NodeSemantics* n = model.at_line(line);
  if (!n) {
    err << "no command at " << at << "\n";
    return 2;
  }
  if (o.format == "json") {
    out << node_json(*n).dump(2) << "\n";
    return 0;
  }
  out << node_kind_name(n->node->kind) << " at " << n->span.str() << " in method " << m->name
      << ":\n";
  bool rawmode = o.no_simplify;
  out << "  transition relation: " << render(rawmode ? n->rel_raw.relation : n->rel.relation)
      << "\n";
  out << "  termination condition: " << render(rawmode ? n->term_raw.cond : n->term.cond) << "\n";
  out << "  effect: may modify " << frame_str(n->rel.frame) << "\n";
  out << "  precondition: " << render(rawmode ? n->rel_raw.pre : n->rel.pre) << "\n";
  out << "  pre-state knowledge: " << render(rawmode ? n->knowledge_raw : n->knowledge) << "\n";
  return 0;
}

int cmd_assert_at(const CommonOpts& o, const std::string& at, const std::string& pre_f,
                  const std::string& post_f, std::ostream& out, std::ostream& err) {
  Loaded l = load(o, err);
  auto [file, line] = parse_location(at);
  const MethodDecl* m = method_at(l.program, line);
  if (!m) {
    err << "no command at " << at << "\n";
    return 2;
  }
  SimplifyConfig scfg = o.simplify();
  SemanticModel base = build_semantic_model(*m, l.program, {}, scfg);
  const NodeSemantics* n = base.at_line(line);
  if (!n) {
    err << "no command at " << at << "\n";
    return 2;
  }
  KnowledgeInjection inj;
  inj.node = n->node.get();
  inj.at_post = !post_f.empty();
  inj.condition = parse_formula(inj.at_post ? post_f : pre_f, FormulaMode::State);
  SemanticModel enriched = build_semantic_model(*m, l.program, {}, scfg, inj);
  out << "assuming " << render(inj.condition) << " on the " << (inj.at_post ? "post" : "pre")
      << "-state of " << node_kind_name(n->node->kind) << " at " << n->span.str() << ":\n";
  for (std::size_t i = 0; i < enriched.nodes.size(); ++i) {
    const NodeSemantics& e = enriched.nodes[i];
    const NodeSemantics& b = base.nodes[i];
    if (equal(e.knowledge, b.knowledge)) continue;
    out << "  [" << e.span.str() << "] " << node_kind_name(e.node->kind)
        << " now knows: " << render(e.knowledge) << "\n";
  }
  return 0;
}

std::vector<VerificationTask> all_tasks(const Program& p, const SimplifyConfig& scfg,
                                        const std::string& filter) {
  std::optional<TaskCategory> want;
  if (!filter.empty()) {
    want = category_from_name(filter);
    if (!want) throw std::runtime_error("unknown task category '" + filter + "'");
  }
  std::vector<VerificationTask> tasks;
  for (const auto& m : p.methods) {
    SemanticModel model = build_semantic_model(m, p, {}, scfg);
    for (auto& t : gen_tasks(m, model, p)) {
      if (want && t.category != *want) continue;
      tasks.push_back(std::move(t));
    }
  }
  return tasks;
}

int cmd_vcs(const CommonOpts& o, const std::string& outdir, bool bounded,
            const std::string& filter, std::ostream& out, std::ostream& err) {
  Loaded l = load(o, err);
  std::vector<VerificationTask> tasks = all_tasks(l.program, o.simplify(), filter);
  SemConfig cfg = o.sem();
  SmtOptions sopts;
  sopts.bounded = bounded;
  sopts.bound = cfg.dom;
  sopts.min_int = cfg.min_int;
  sopts.max_int = cfg.max_int;
  std::filesystem::create_directories(outdir);
  for (const auto& t : tasks) {
    std::string path = (std::filesystem::path(outdir) / script_file_name(t.id)).string();
    std::ofstream f(path);
    f << emit_smtlib(t, l.program, sopts);
  }
  if (o.format == "json") {
    json j = json::array();
    for (const auto& t : tasks) j.push_back(task_json(t));
    out << j.dump(2) << "\n";
  } else {
    for (const auto& t : tasks) {
      out << t.id;
      if (!t.note.empty()) out << "  (" << t.note << ")";
      out << "\n";
    }
    out << tasks.size() << " task(s) written to " << outdir << "\n";
  }
  return 0;
}

int cmd_check(const CommonOpts& o, bool use_oracle, const std::string& solver, bool bounded,
              const std::string& filter, int timeout, int jobs, const std::string& outdir,
              std::ostream& out, std::ostream& err) {
  Loaded l = load(o, err);
  std::vector<VerificationTask> tasks = all_tasks(l.program, o.simplify(), filter);
  SemConfig cfg = o.sem();
  if (use_oracle) {
    for (auto& t : tasks) check_with_oracle(t, l.program, cfg);
  } else {
    SmtOptions sopts;
    sopts.bounded = bounded;
    sopts.bound = cfg.dom;
    sopts.min_int = cfg.min_int;
    sopts.max_int = cfg.max_int;
    check_tasks_with_solver(tasks, l.program, sopts, solver, timeout, jobs, outdir);
  }
  int falsified = 0, valid = 0, other = 0;
  if (o.format == "json") {
    json j;
    json arr = json::array();
    for (const auto& t : tasks) arr.push_back(task_json(t));
    j["tasks"] = std::move(arr);
    for (const auto& t : tasks) {
      if (t.status == TaskStatus::Valid) ++valid;
      else if (t.status == TaskStatus::Falsified) ++falsified;
      else ++other;
    }
    j["counts"] = {{"valid", valid}, {"falsified", falsified}, {"other", other}};
    out << j.dump(2) << "\n";
  } else {
    std::size_t width = 0;
    for (const auto& t : tasks) width = std::max(width, t.id.size());
    for (const auto& t : tasks) {
      out << t.id << std::string(width - t.id.size() + 2, ' ') << status_name(t.status);
      if (t.model) out << "  [" << t.model->str() << "]";
      if (!t.note.empty()) out << "  (" << t.note << ")";
      out << "\n";
      if (t.status == TaskStatus::Valid) ++valid;
      else if (t.status == TaskStatus::Falsified) ++falsified;
      else ++other;
    }
    out << valid << " valid, " << falsified << " falsified, " << other << " other\n";
  }
  return falsified > 0 ? 1 : 0;
}

int cmd_oracle(const CommonOpts& o, const std::string& mutate, std::ostream& out,
               std::ostream& err) {
  Loaded l = load(o, err);
  DeriveOptions opts;
  static const std::map<std::string, Mutation> mutations = {
      {"none", Mutation::None},
      {"while-exit-at-pre", Mutation::WhileExitCondAtPre},
      {"while-drop-exit", Mutation::WhileDropExitCond},
      {"assign-empty-frame", Mutation::AssignEmptyFrame},
      {"seq-second-at-origin", Mutation::SeqSecondAtOrigin},
      {"if-swap-branches", Mutation::IfSwapBranches},
      {"while-drop-entry-inv", Mutation::WhileDropEntryInv},
      {"while-term-global-true", Mutation::WhileTermGlobalTrue},
  };
  if (!mutate.empty()) {
    auto it = mutations.find(mutate);
    if (it == mutations.end()) throw std::runtime_error("unknown mutation '" + mutate + "'");
    opts.mutation = it->second;
  }
  SemConfig cfg = o.sem();
  SoundnessReport report = check_soundness(l.program, cfg, opts);
  if (o.format == "json") {
    json j;
    j["stores_checked"] = report.stores_checked;
    j["nodes_checked"] = report.nodes_checked;
    json v = json::array();
    for (const auto& x : report.violations) {
      v.push_back(json{{"statement", x.statement},
                       {"method", x.method},
                       {"span", span_json(x.span)},
                       {"detail", x.detail},
                       {"pre", x.pre.str()},
                       {"post", x.post ? x.post->str() : ""}});
    }
    j["violations"] = std::move(v);
    json w = json::array();
    for (const auto& x : report.warnings)
      w.push_back(json{{"method", x.method}, {"span", span_json(x.span)}, {"detail", x.detail}});
    j["warnings"] = std::move(w);
    out << j.dump(2) << "\n";
  } else {
    for (const auto& w : report.warnings)
      out << "warning: " << w.method << " at " << w.span.str() << ": " << w.detail << "\n";
    for (const auto& v : report.violations) out << v.str() << "\n";
    out << report.violations.size() << " violation(s), " << report.warnings.size()
        << " warning(s), " << report.stores_checked << " store(s) checked\n";
  }
  return report.violations.empty() ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"MiniWhile semantic-essence translator and verifier"};
  app.require_subcommand(1);

  CommonOpts translate_o, semantics_o, assert_o, vcs_o, check_o, oracle_o;
  bool translate_raw = false;
  std::string semantics_at, assert_at_loc, assert_pre, assert_post;
  std::string vcs_out = "vc-out", vcs_filter, check_filter, check_solver, check_out = "vc-out";
  bool vcs_bounded = false, check_bounded = false, check_oracle_flag = false;
  int check_timeout = 30, check_jobs = 4;
  std::string oracle_mutate;

  auto* t = app.add_subcommand("translate", "print derived relations and termination conditions");
  add_common(t, translate_o);
  t->add_flag("--raw", translate_raw, "also print the unsimplified relation");

  auto* s = app.add_subcommand("semantics", "inspect the semantic model of one command");
  add_common(s, semantics_o);
  s->add_option("--at", semantics_at, "location file:line")->required();

  auto* a = app.add_subcommand("assert-at", "propagate a user condition from one command");
  add_common(a, assert_o);
  a->add_option("--at", assert_at_loc, "location file:line")->required();
  a->add_option("--pre", assert_pre, "condition on the command's pre-state");
  a->add_option("--post", assert_post, "condition on the command's post-state");

  auto* v = app.add_subcommand("vcs", "generate verification tasks and SMT-LIB scripts");
  add_common(v, vcs_o);
  v->add_option("--out", vcs_out, "output directory for .smt2 files");
  v->add_flag("--bounded", vcs_bounded, "bounded SMT mode (match the oracle domain)");
  v->add_option("--filter", vcs_filter, "only this task category");

  auto* c = app.add_subcommand("check", "discharge verification tasks");
  add_common(c, check_o);
  c->add_flag("--oracle", check_oracle_flag, "check by finite-domain enumeration");
  c->add_option("--solver", check_solver, "solver command template, {file} = script path");
  c->add_flag("--bounded", check_bounded, "bounded SMT mode");
  c->add_option("--filter", check_filter, "only this task category");
  c->add_option("--timeout", check_timeout, "solver timeout in seconds");
  c->add_option("--jobs", check_jobs, "solver worker processes");
  c->add_option("--out", check_out, "directory for generated .smt2 files");

  auto* orc = app.add_subcommand("oracle", "finite-domain soundness check of the calculus");
  add_common(orc, oracle_o);
  orc->add_option("--mutate", oracle_mutate, "apply a deliberate calculus mutation");

  // CLI11 consumes argv back-to-front
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help
      out << app.help() << "\n";
      return 0;
    }
    err << e.what() << "\n";
    return 2;
  }

  try {
    if (t->parsed()) return cmd_translate(translate_o, translate_raw, out, err);
    if (s->parsed()) return cmd_semantics(semantics_o, semantics_at, out, err);
    if (a->parsed()) {
      if (assert_pre.empty() == assert_post.empty()) {
        err << "assert-at needs exactly one of --pre or --post\n";
        return 2;
      }
      return cmd_assert_at(assert_o, assert_at_loc, assert_pre, assert_post, out, err);
    }
    if (v->parsed()) return cmd_vcs(vcs_o, vcs_out, vcs_bounded, vcs_filter, out, err);
    if (c->parsed()) {
      if (check_oracle_flag == !check_solver.empty()) {
        err << "check needs exactly one of --oracle or --solver\n";
        return 2;
      }
      return cmd_check(check_o, check_oracle_flag, check_solver, check_bounded, check_filter,
                       check_timeout, check_jobs, check_out, out, err);
    }
    if (orc->parsed()) return cmd_oracle(oracle_o, oracle_mutate, out, err);
  } catch (const ParseError& e) {
    err << e.rendered << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "no subcommand\n";
  return 2;
}

}  // namespace mw
