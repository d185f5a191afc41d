#include "formula_json.hpp"

#include <stdexcept>

namespace mw {

using nlohmann::json;

namespace {

const char* tag_str(VarTag t) {
  switch (t) {
    case VarTag::Pre: return "pre";
    case VarTag::Post: return "post";
    default: return "logical";
  }
}

VarTag tag_from(const std::string& s) {
  if (s == "pre") return VarTag::Pre;
  if (s == "post") return VarTag::Post;
  if (s == "logical") return VarTag::Logical;
  throw std::runtime_error("bad variable tag: " + s);
}

const char* cmp_str(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "/=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    default: return ">=";
  }
}

CmpOp cmp_from(const std::string& s) {
  if (s == "=") return CmpOp::Eq;
  if (s == "/=") return CmpOp::Ne;
  if (s == "<") return CmpOp::Lt;
  if (s == "<=") return CmpOp::Le;
  if (s == ">") return CmpOp::Gt;
  if (s == ">=") return CmpOp::Ge;
  throw std::runtime_error("bad comparison op: " + s);
}

const char* term_kind_str(Term::Kind k) {
  switch (k) {
    case Term::Kind::IntLit: return "int";
    case Term::Kind::Var: return "var";
    case Term::Kind::MinInt: return "min_int";
    case Term::Kind::MaxInt: return "max_int";
    case Term::Kind::Neg: return "neg";
    case Term::Kind::Add: return "add";
    case Term::Kind::Sub: return "sub";
    case Term::Kind::Mul: return "mul";
    case Term::Kind::Div: return "div";
    case Term::Kind::Mod: return "mod";
    case Term::Kind::Ite: return "ite";
    default: return "app";
  }
}

}  // namespace

json to_json(const TermPtr& t) {
  json j;
  j["kind"] = term_kind_str(t->kind);
  switch (t->kind) {
    case Term::Kind::IntLit: j["value"] = t->value; break;
    case Term::Kind::Var:
      j["name"] = t->var.name;
      j["tag"] = tag_str(t->var.tag);
      break;
    case Term::Kind::MinInt:
    case Term::Kind::MaxInt: break;
    case Term::Kind::Ite: {
      j["cond"] = to_json(t->cond);
      j["then"] = to_json(t->args[0]);
      j["else"] = to_json(t->args[1]);
      break;
    }
    case Term::Kind::App: {
      j["fn"] = t->fn;
      json args = json::array();
      for (const auto& a : t->args) args.push_back(to_json(a));
      j["args"] = std::move(args);
      break;
    }
    default: {
      json args = json::array();
      for (const auto& a : t->args) args.push_back(to_json(a));
      j["args"] = std::move(args);
      break;
    }
  }
  return j;
}

json to_json(const FormulaPtr& f) {
  json j;
  switch (f->kind) {
    case Formula::Kind::True: j["kind"] = "true"; break;
    case Formula::Kind::False: j["kind"] = "false"; break;
    case Formula::Kind::Cmp:
      j["kind"] = "cmp";
      j["op"] = cmp_str(f->cmp);
      j["lhs"] = to_json(f->lhs);
      j["rhs"] = to_json(f->rhs);
      break;
    case Formula::Kind::Pred: {
      j["kind"] = "pred";
      j["fn"] = f->fn;
      json args = json::array();
      for (const auto& a : f->targs) args.push_back(to_json(a));
      j["args"] = std::move(args);
      break;
    }
    case Formula::Kind::Not:
      j["kind"] = "not";
      j["arg"] = to_json(f->kids[0]);
      break;
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      j["kind"] = f->kind == Formula::Kind::And ? "and" : "or";
      json args = json::array();
      for (const auto& k : f->kids) args.push_back(to_json(k));
      j["args"] = std::move(args);
      break;
    }
    case Formula::Kind::Implies:
      j["kind"] = "implies";
      j["lhs"] = to_json(f->kids[0]);
      j["rhs"] = to_json(f->kids[1]);
      break;
    case Formula::Kind::Iff:
      j["kind"] = "iff";
      j["lhs"] = to_json(f->kids[0]);
      j["rhs"] = to_json(f->kids[1]);
      break;
    case Formula::Kind::Ite:
      j["kind"] = "ite";
      j["cond"] = to_json(f->kids[0]);
      j["then"] = to_json(f->kids[1]);
      j["else"] = to_json(f->kids[2]);
      break;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      j["kind"] = f->kind == Formula::Kind::Forall ? "forall" : "exists";
      json binders = json::array();
      for (const auto& b : f->binders) binders.push_back(b.name);
      j["binders"] = std::move(binders);
      j["body"] = to_json(f->body);
      break;
    }
  }
  return j;
}

TermPtr term_from_json(const json& j) {
  const std::string kind = j.at("kind");
  if (kind == "int") return t_int(j.at("value").get<Value>());
  if (kind == "var") return t_var({j.at("name").get<std::string>(), tag_from(j.at("tag"))});
  if (kind == "min_int") return t_min_int();
  if (kind == "max_int") return t_max_int();
  if (kind == "ite")
    return t_ite(formula_from_json(j.at("cond")), term_from_json(j.at("then")),
                 term_from_json(j.at("else")));
  if (kind == "app") {
    std::vector<TermPtr> args;
    for (const auto& a : j.at("args")) args.push_back(term_from_json(a));
    return t_app(j.at("fn").get<std::string>(), std::move(args));
  }
  std::vector<TermPtr> args;
  for (const auto& a : j.at("args")) args.push_back(term_from_json(a));
  if (kind == "neg") return t_neg(args.at(0));
  Term::Kind k;
  if (kind == "add") k = Term::Kind::Add;
  else if (kind == "sub") k = Term::Kind::Sub;
  else if (kind == "mul") k = Term::Kind::Mul;
  else if (kind == "div") k = Term::Kind::Div;
  else if (kind == "mod") k = Term::Kind::Mod;
  else throw std::runtime_error("bad term kind: " + kind);
  return t_bin(k, args.at(0), args.at(1));
}

FormulaPtr formula_from_json(const json& j) {
  const std::string kind = j.at("kind");
  if (kind == "true") return f_true();
  if (kind == "false") return f_false();
  if (kind == "cmp")
    return f_cmp(cmp_from(j.at("op")), term_from_json(j.at("lhs")), term_from_json(j.at("rhs")));
  if (kind == "pred") {
    std::vector<TermPtr> args;
    for (const auto& a : j.at("args")) args.push_back(term_from_json(a));
    return f_pred(j.at("fn").get<std::string>(), std::move(args));
  }
  if (kind == "not") return f_not(formula_from_json(j.at("arg")));
  if (kind == "and" || kind == "or") {
    std::vector<FormulaPtr> kids;
    for (const auto& a : j.at("args")) kids.push_back(formula_from_json(a));
    return kind == "and" ? f_and(std::move(kids)) : f_or(std::move(kids));
  }
  if (kind == "implies")
    return f_implies(formula_from_json(j.at("lhs")), formula_from_json(j.at("rhs")));
  if (kind == "iff")
    return f_iff(formula_from_json(j.at("lhs")), formula_from_json(j.at("rhs")));
  if (kind == "ite")
    return f_ite(formula_from_json(j.at("cond")), formula_from_json(j.at("then")),
                 formula_from_json(j.at("else")));
  if (kind == "forall" || kind == "exists") {
    std::vector<VarRef> binders;
    for (const auto& b : j.at("binders")) binders.push_back(log_var(b.get<std::string>()));
    auto body = formula_from_json(j.at("body"));
    return kind == "forall" ? f_forall(std::move(binders), std::move(body))
                            : f_exists(std::move(binders), std::move(body));
  }
  throw std::runtime_error("bad formula kind: " + kind);
}

}  // namespace mw
