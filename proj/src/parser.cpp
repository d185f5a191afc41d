#include "parser.hpp"

#include "lexer.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <set>

namespace mw {

namespace {

const std::set<std::string> kReserved = {
    "method", "theory", "var", "if", "else", "while", "return",
    "requires", "ensures", "diverges", "assignable", "invariant", "decreases",
    "example", "counterexample", "input", "output", "result",
    "TRUE", "FALSE", "NOT", "AND", "OR", "IF", "THEN", "ELSE", "ENDIF",
    "FORALL", "EXISTS", "INT", "BOOL", "AXIOM", "MIN_INT", "MAX_INT"};

bool plain_ident(const std::string& s) {
  return s.find('#') == std::string::npos && s.find('$') == std::string::npos;
}

// Untyped expression tree shared by the formula and term surface syntax;
// sorts are resolved in a second step.
struct PNode;
using PNodePtr = std::shared_ptr<PNode>;

struct PNode {
  enum class K { Int, True, False, MinInt, MaxInt, Name, App, Neg, Not, Bin, Ite, Quant };
  K k = K::Int;
  Value value = 0;
  std::string name;  // Name (may carry $0/$1 suffix), App fn
  std::string op;    // Bin
  bool forall = true;
  std::vector<PNodePtr> kids;
  std::vector<std::string> binders;
  Span span;
};

PNodePtr pnode(PNode::K k, Span sp) {
  auto n = std::make_shared<PNode>();
  n->k = k;
  n->span = sp;
  return n;
}

struct Parser {
  std::vector<Token> toks;
  std::size_t pos = 0;

  const Token& peek(std::size_t off = 0) const {
    std::size_t i = std::min(pos + off, toks.size() - 1);
    return toks[i];
  }
  const Token& advance() { return toks[std::min(pos++, toks.size() - 1)]; }
  bool accept_punct(const char* p) {
    if (peek().is_punct(p)) {
      ++pos;
      return true;
    }
    return false;
  }
  bool accept_ident(const char* id) {
    if (peek().is_ident(id)) {
      ++pos;
      return true;
    }
    return false;
  }
  Token expect_punct(const char* p) {
    if (!peek().is_punct(p))
      throw ParseError(peek().span, std::string("expected '") + p + "', found '" + tok_desc() + "'");
    return advance();
  }
  Token expect_ident_kw(const char* id) {
    if (!peek().is_ident(id))
      throw ParseError(peek().span, std::string("expected '") + id + "', found '" + tok_desc() + "'");
    return advance();
  }
  std::string tok_desc() const {
    const Token& t = peek();
    if (t.kind == Token::Kind::Eof) return "end of input";
    if (t.kind == Token::Kind::AnnotStart) return "/*@";
    if (t.kind == Token::Kind::AnnotEnd) return "@*/";
    return t.text;
  }
  Token expect_name(const char* what) {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident)
      throw ParseError(t.span, std::string("expected ") + what + ", found '" + tok_desc() + "'");
    if (kReserved.count(t.text))
      throw ParseError(t.span, "'" + t.text + "' is a reserved word");
    if (!plain_ident(t.text))
      throw ParseError(t.span, "'#' and '$' are not allowed in source identifiers");
    return advance();
  }

  // ---- untyped formula/term grammar ----

  bool at_formula_keyword(const char* kw) const { return peek().is_ident(kw); }

  PNodePtr p_formula() { return p_iff(); }

  PNodePtr p_iff() {
    PNodePtr lhs = p_implies();
    while (peek().is_punct("<=>")) {
      Span sp = advance().span;
      PNodePtr rhs = p_implies();
      auto n = pnode(PNode::K::Bin, sp);
      n->op = "<=>";
      n->kids = {lhs, rhs};
      lhs = n;
    }
    return lhs;
  }

  PNodePtr p_implies() {
    PNodePtr lhs = p_or();
    if (peek().is_punct("=>")) {
      Span sp = advance().span;
      PNodePtr rhs = p_implies();  // right-assoc
      auto n = pnode(PNode::K::Bin, sp);
      n->op = "=>";
      n->kids = {lhs, rhs};
      return n;
    }
    return lhs;
  }

  PNodePtr p_or() {
    PNodePtr lhs = p_and();
    while (at_formula_keyword("OR")) {
      Span sp = advance().span;
      PNodePtr rhs = p_and();
      auto n = pnode(PNode::K::Bin, sp);
      n->op = "OR";
      n->kids = {lhs, rhs};
      lhs = n;
    }
    return lhs;
  }

  PNodePtr p_and() {
    PNodePtr lhs = p_not();
    while (at_formula_keyword("AND")) {
      Span sp = advance().span;
      PNodePtr rhs = p_not();
      auto n = pnode(PNode::K::Bin, sp);
      n->op = "AND";
      n->kids = {lhs, rhs};
      lhs = n;
    }
    return lhs;
  }

  PNodePtr p_not() {
    if (at_formula_keyword("NOT")) {
      Span sp = advance().span;
      PNodePtr arg = p_not();
      auto n = pnode(PNode::K::Not, sp);
      n->kids = {arg};
      return n;
    }
    return p_cmp();
  }

  PNodePtr p_cmp() {
    PNodePtr lhs = p_add();
    static const char* cmps[] = {"=", "/=", "<", "<=", ">", ">="};
    for (const char* op : cmps) {
      if (peek().is_punct(op)) {
        Span sp = advance().span;
        PNodePtr rhs = p_add();
        auto n = pnode(PNode::K::Bin, sp);
        n->op = op;
        n->kids = {lhs, rhs};
        return n;  // comparisons do not chain
      }
    }
    return lhs;
  }

  PNodePtr p_add() {
    PNodePtr lhs = p_mul();
    while (peek().is_punct("+") || peek().is_punct("-")) {
      std::string op = peek().text;
      Span sp = advance().span;
      PNodePtr rhs = p_mul();
      auto n = pnode(PNode::K::Bin, sp);
      n->op = op;
      n->kids = {lhs, rhs};
      lhs = n;
    }
    return lhs;
  }

  PNodePtr p_mul() {
    PNodePtr lhs = p_unary();
    while (peek().is_punct("*") || peek().is_punct("/") || peek().is_punct("%")) {
      std::string op = peek().text;
      Span sp = advance().span;
      PNodePtr rhs = p_unary();
      auto n = pnode(PNode::K::Bin, sp);
      n->op = op;
      n->kids = {lhs, rhs};
      lhs = n;
    }
    return lhs;
  }

  PNodePtr p_unary() {
    if (peek().is_punct("-")) {
      Span sp = advance().span;
      PNodePtr arg = p_unary();
      auto n = pnode(PNode::K::Neg, sp);
      n->kids = {arg};
      return n;
    }
    return p_primary();
  }

  PNodePtr p_primary() {
    const Token& t = peek();
    Span sp = t.span;
    if (t.kind == Token::Kind::Int) {
      advance();
      auto n = pnode(PNode::K::Int, sp);
      n->value = t.value;
      return n;
    }
    if (t.kind == Token::Kind::Ident) {
      if (t.text == "TRUE") { advance(); return pnode(PNode::K::True, sp); }
      if (t.text == "FALSE") { advance(); return pnode(PNode::K::False, sp); }
      if (t.text == "MIN_INT") { advance(); return pnode(PNode::K::MinInt, sp); }
      if (t.text == "MAX_INT") { advance(); return pnode(PNode::K::MaxInt, sp); }
      if (t.text == "IF") {
        advance();
        auto n = pnode(PNode::K::Ite, sp);
        n->kids.push_back(p_formula());
        expect_ident_kw("THEN");
        n->kids.push_back(p_formula());
        expect_ident_kw("ELSE");
        n->kids.push_back(p_formula());
        expect_ident_kw("ENDIF");
        return n;
      }
      if (t.text == "FORALL" || t.text == "EXISTS") {
        advance();
        auto n = pnode(PNode::K::Quant, sp);
        n->forall = (t.text == "FORALL");
        expect_punct("(");
        do {
          Token b = peek();
          if (b.kind != Token::Kind::Ident || kReserved.count(b.text))
            throw ParseError(b.span, "expected a bound variable name");
          if (!plain_ident(b.text))
            throw ParseError(b.span, "'#' and '$' are not allowed in bound variable names");
          advance();
          expect_punct(":");
          Token sort = advance();
          if (!sort.is_ident("INT"))
            throw ParseError(sort.span, "only INT bound variables are supported");
          n->binders.push_back(b.text);
        } while (accept_punct(","));
        expect_punct(")");
        expect_punct(":");
        n->kids.push_back(p_formula());
        return n;
      }
      // plain name or application
      advance();
      if (peek().is_punct("(")) {
        if (!plain_ident(t.text))
          throw ParseError(sp, "function names may not carry state tags");
        advance();
        auto n = pnode(PNode::K::App, sp);
        n->name = t.text;
        if (!peek().is_punct(")")) {
          do {
            n->kids.push_back(p_formula());
          } while (accept_punct(","));
        }
        expect_punct(")");
        return n;
      }
      auto n = pnode(PNode::K::Name, sp);
      n->name = t.text;
      return n;
    }
    if (t.is_punct("(")) {
      advance();
      PNodePtr inner = p_formula();
      expect_punct(")");
      return inner;
    }
    throw ParseError(sp, "expected a formula or term, found '" + tok_desc() + "'");
  }

  // ---- program expressions (C-style operators) ----

  ExprPtr e_or_() {
    ExprPtr lhs = e_and_();
    while (peek().is_punct("||")) {
      Span sp = advance().span;
      lhs = e_bin(Expr::Op::Or, lhs, e_and_(), sp);
    }
    return lhs;
  }
  ExprPtr e_and_() {
    ExprPtr lhs = e_not_();
    while (peek().is_punct("&&")) {
      Span sp = advance().span;
      lhs = e_bin(Expr::Op::And, lhs, e_not_(), sp);
    }
    return lhs;
  }
  ExprPtr e_not_() {
    if (peek().is_punct("!")) {
      Span sp = advance().span;
      return e_not(e_not_(), sp);
    }
    return e_rel_();
  }
  ExprPtr e_rel_() {
    ExprPtr lhs = e_add_();
    struct RelOp { const char* tok; Expr::Op op; };
    static const RelOp rels[] = {{"==", Expr::Op::Eq}, {"!=", Expr::Op::Ne},
                                 {"<=", Expr::Op::Le}, {">=", Expr::Op::Ge},
                                 {"<", Expr::Op::Lt},  {">", Expr::Op::Gt}};
    for (const auto& r : rels) {
      if (peek().is_punct(r.tok)) {
        Span sp = advance().span;
        return e_bin(r.op, lhs, e_add_(), sp);
      }
    }
    return lhs;
  }
  ExprPtr e_add_() {
    ExprPtr lhs = e_mul_();
    while (peek().is_punct("+") || peek().is_punct("-")) {
      Expr::Op op = peek().is_punct("+") ? Expr::Op::Add : Expr::Op::Sub;
      Span sp = advance().span;
      lhs = e_bin(op, lhs, e_mul_(), sp);
    }
    return lhs;
  }
  ExprPtr e_mul_() {
    ExprPtr lhs = e_unary_();
    while (peek().is_punct("*") || peek().is_punct("/") || peek().is_punct("%")) {
      Expr::Op op = peek().is_punct("*")   ? Expr::Op::Mul
                    : peek().is_punct("/") ? Expr::Op::Div
                                           : Expr::Op::Mod;
      Span sp = advance().span;
      lhs = e_bin(op, lhs, e_unary_(), sp);
    }
    return lhs;
  }
  ExprPtr e_unary_() {
    if (peek().is_punct("-")) {
      Span sp = advance().span;
      return e_neg(e_unary_(), sp);
    }
    return e_primary_();
  }
  ExprPtr e_primary_() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Int) {
      advance();
      return e_int(t.value, t.span);
    }
    if (t.is_ident("MIN_INT")) { advance(); return e_min_int(t.span); }
    if (t.is_ident("MAX_INT")) { advance(); return e_max_int(t.span); }
    if (t.kind == Token::Kind::Ident) {
      if (kReserved.count(t.text))
        throw ParseError(t.span, "'" + t.text + "' cannot appear in an expression");
      if (!plain_ident(t.text))
        throw ParseError(t.span, "state tags are not allowed in program expressions");
      advance();
      return e_var(t.text, t.span);
    }
    if (t.is_punct("(")) {
      advance();
      ExprPtr inner = e_or_();
      expect_punct(")");
      return inner;
    }
    throw ParseError(t.span, "expected an expression, found '" + tok_desc() + "'");
  }

  ExprPtr parse_expr() { return e_or_(); }
};

// ---- sort resolution for the untyped formula tree ----

struct Resolver {
  FormulaMode mode;
  std::vector<std::string> bound;  // quantifier binder stack

  bool is_bound(const std::string& n) const {
    return std::find(bound.rbegin(), bound.rend(), n) != bound.rend();
  }

  VarRef resolve_name(const std::string& text, Span sp) const {
    // explicit tags win
    if (text.size() > 2 && text[text.size() - 2] == '$') {
      std::string base = text.substr(0, text.size() - 2);
      VarTag tag = text.back() == '0' ? VarTag::Pre : VarTag::Post;
      return {base, tag};
    }
    if (is_bound(text)) return log_var(text);
    switch (mode) {
      case FormulaMode::Contract:
        if (text == kResultVar) return post_var(text);
        return pre_var(text);
      case FormulaMode::State:
        return pre_var(text);
      default:
        return log_var(text);
    }
    (void)sp;
  }

  FormulaPtr to_formula(const PNodePtr& n) {
    switch (n->k) {
      case PNode::K::True: return f_true();
      case PNode::K::False: return f_false();
      case PNode::K::Not: return f_not(to_formula(n->kids[0]));
      case PNode::K::Quant: {
        std::vector<VarRef> binders;
        for (const auto& b : n->binders) {
          binders.push_back(log_var(b));
          bound.push_back(b);
        }
        FormulaPtr body = to_formula(n->kids[0]);
        bound.resize(bound.size() - n->binders.size());
        return n->forall ? f_forall(std::move(binders), std::move(body))
                         : f_exists(std::move(binders), std::move(body));
      }
      case PNode::K::Ite:
        return f_ite(to_formula(n->kids[0]), to_formula(n->kids[1]), to_formula(n->kids[2]));
      case PNode::K::App: {
        std::vector<TermPtr> args;
        for (const auto& k : n->kids) args.push_back(to_term(k));
        return f_pred(n->name, std::move(args));
      }
      case PNode::K::Bin: {
        const std::string& op = n->op;
        if (op == "AND") return f_and(to_formula(n->kids[0]), to_formula(n->kids[1]));
        if (op == "OR") return f_or(to_formula(n->kids[0]), to_formula(n->kids[1]));
        if (op == "=>") return f_implies(to_formula(n->kids[0]), to_formula(n->kids[1]));
        if (op == "<=>") return f_iff(to_formula(n->kids[0]), to_formula(n->kids[1]));
        CmpOp c;
        if (op == "=") c = CmpOp::Eq;
        else if (op == "/=") c = CmpOp::Ne;
        else if (op == "<") c = CmpOp::Lt;
        else if (op == "<=") c = CmpOp::Le;
        else if (op == ">") c = CmpOp::Gt;
        else if (op == ">=") c = CmpOp::Ge;
        else throw ParseError(n->span, "expected a formula, found arithmetic");
        return f_cmp(c, to_term(n->kids[0]), to_term(n->kids[1]));
      }
      default:
        throw ParseError(n->span, "expected a formula, found a term");
    }
  }

  TermPtr to_term(const PNodePtr& n) {
    switch (n->k) {
      case PNode::K::Int: return t_int(n->value);
      case PNode::K::MinInt: return t_min_int();
      case PNode::K::MaxInt: return t_max_int();
      case PNode::K::Name: return t_var(resolve_name(n->name, n->span));
      case PNode::K::Neg: return t_neg(to_term(n->kids[0]));
      case PNode::K::Ite:
        return t_ite(to_formula(n->kids[0]), to_term(n->kids[1]), to_term(n->kids[2]));
      case PNode::K::App: {
        std::vector<TermPtr> args;
        for (const auto& k : n->kids) args.push_back(to_term(k));
        return t_app(n->name, std::move(args));
      }
      case PNode::K::Bin: {
        const std::string& op = n->op;
        Term::Kind k;
        if (op == "+") k = Term::Kind::Add;
        else if (op == "-") k = Term::Kind::Sub;
        else if (op == "*") k = Term::Kind::Mul;
        else if (op == "/") k = Term::Kind::Div;
        else if (op == "%") k = Term::Kind::Mod;
        else throw ParseError(n->span, "expected a term, found a formula");
        return t_bin(k, to_term(n->kids[0]), to_term(n->kids[1]));
      }
      default:
        throw ParseError(n->span, "expected a term, found a formula");
    }
  }
};

// ---- program structure ----

struct ProgramParser : Parser {
  std::string filename;

  FormulaPtr annot_formula(FormulaMode mode) {
    PNodePtr n = p_formula();
    Resolver r{mode, {}};
    return r.to_formula(n);
  }

  TermPtr annot_term(FormulaMode mode) {
    PNodePtr n = p_formula();
    Resolver r{mode, {}};
    return r.to_term(n);
  }

  Value signed_int() {
    bool neg = accept_punct("-");
    const Token& t = peek();
    if (t.kind != Token::Kind::Int) throw ParseError(t.span, "expected an integer");
    advance();
    return neg ? -t.value : t.value;
  }

  SpecExample parse_example(bool positive, Span sp) {
    SpecExample ex;
    ex.positive = positive;
    ex.span = sp;
    expect_ident_kw("input");
    do {
      Token name = expect_name("a parameter name");
      expect_punct("=");
      ex.inputs.emplace_back(name.text, signed_int());
    } while (accept_punct(","));
    expect_ident_kw("output");
    Token res = advance();
    if (!res.is_ident(kResultVar.c_str()))
      throw ParseError(res.span, "expected 'result' in the output clause");
    expect_punct("=");
    ex.output = signed_int();
    return ex;
  }

  Contract parse_contract() {
    Contract c;
    c.requires_f = f_true();
    c.ensures_f = f_true();
    c.diverges_f = f_false();
    if (peek().kind != Token::Kind::AnnotStart) return c;
    c.span = advance().span;
    bool saw_requires = false, saw_ensures = false, saw_diverges = false;
    while (peek().kind != Token::Kind::AnnotEnd) {
      Token kw = peek();
      if (kw.kind != Token::Kind::Ident)
        throw ParseError(kw.span, "expected a contract clause, found '" + tok_desc() + "'");
      advance();
      if (kw.text == "requires") {
        if (saw_requires) throw ParseError(kw.span, "duplicate requires clause");
        saw_requires = true;
        c.requires_f = annot_formula(FormulaMode::Contract);
      } else if (kw.text == "ensures") {
        if (saw_ensures) throw ParseError(kw.span, "duplicate ensures clause");
        saw_ensures = true;
        c.ensures_f = annot_formula(FormulaMode::Contract);
      } else if (kw.text == "diverges") {
        if (saw_diverges) throw ParseError(kw.span, "duplicate diverges clause");
        saw_diverges = true;
        c.diverges_f = annot_formula(FormulaMode::Contract);
      } else if (kw.text == "assignable") {
        do {
          Token v = expect_name("a variable name");
          c.assignable.insert(v.text);
        } while (accept_punct(","));
      } else if (kw.text == "example" || kw.text == "counterexample") {
        c.examples.push_back(parse_example(kw.text == "example", kw.span));
      } else if (kw.text == "invariant" || kw.text == "decreases") {
        throw ParseError(kw.span, "'" + kw.text + "' is only allowed on a while loop");
      } else {
        throw ParseError(kw.span, "unknown contract clause '" + kw.text + "'");
      }
      expect_punct(";");
    }
    advance();  // @*/
    return c;
  }

  CommandPtr parse_stmt_or_block() {
    if (peek().is_punct("{")) return parse_block();
    return parse_stmt();
  }

  CommandPtr parse_stmt() {
    const Token& t = peek();
    if (t.is_ident("var"))
      throw ParseError(t.span, "variable declarations are only allowed inside a block");
    if (t.is_ident("return")) {
      Span sp = advance().span;
      ExprPtr e = parse_expr();
      Span end = peek().span;
      expect_punct(";");
      sp.end_line = end.end_line;
      sp.end_col = end.end_col;
      return c_return(e, sp);
    }
    if (t.is_ident("if")) {
      Span sp = advance().span;
      expect_punct("(");
      ExprPtr cond = parse_expr();
      expect_punct(")");
      CommandPtr then = parse_stmt_or_block();
      Span end = then->span;
      if (peek().is_ident("else")) {
        advance();
        CommandPtr els = parse_stmt_or_block();
        end = els->span;
        sp.end_line = end.end_line;
        sp.end_col = end.end_col;
        return c_ifelse(cond, then, els, sp);
      }
      sp.end_line = end.end_line;
      sp.end_col = end.end_col;
      return c_if(cond, then, sp);
    }
    if (t.is_ident("while")) {
      Span sp = advance().span;
      expect_punct("(");
      ExprPtr cond = parse_expr();
      expect_punct(")");
      if (peek().kind != Token::Kind::AnnotStart)
        throw ParseError(peek().span, "while loop requires an /*@ invariant ...; decreases ...; @*/ block");
      advance();
      std::vector<FormulaPtr> invs;
      TermPtr measure;
      while (peek().kind != Token::Kind::AnnotEnd) {
        Token kw = peek();
        if (kw.is_ident("invariant")) {
          advance();
          invs.push_back(annot_formula(FormulaMode::Contract));
        } else if (kw.is_ident("decreases")) {
          advance();
          if (measure) throw ParseError(kw.span, "duplicate decreases clause");
          if (invs.empty())
            throw ParseError(kw.span, "decreases requires a preceding invariant");
          measure = annot_term(FormulaMode::Contract);
        } else {
          throw ParseError(kw.span, "expected 'invariant' or 'decreases', found '" + tok_desc() + "'");
        }
        expect_punct(";");
      }
      Token endTok = advance();  // @*/
      if (invs.empty()) throw ParseError(endTok.span, "while loop is missing its invariant");
      if (!measure) throw ParseError(endTok.span, "while loop is missing its decreases clause");
      if (!peek().is_punct("{"))
        throw ParseError(peek().span, "while loop body must be a block");
      CommandPtr body = parse_block();
      FormulaPtr inv = invs[0];
      for (std::size_t i = 1; i < invs.size(); ++i) inv = f_and(inv, invs[i]);
      sp.end_line = body->span.end_line;
      sp.end_col = body->span.end_col;
      return c_while(cond, inv, measure, body, sp);
    }
    // assignment or call: ident '=' ...
    Token name = expect_name("a statement");
    Span sp = name.span;
    expect_punct("=");
    if (peek().kind == Token::Kind::Ident && !kReserved.count(peek().text) &&
        peek(1).is_punct("(")) {
      Token callee = advance();
      advance();  // (
      std::vector<ExprPtr> args;
      if (!peek().is_punct(")")) {
        do {
          args.push_back(parse_expr());
        } while (accept_punct(","));
      }
      expect_punct(")");
      Span end = peek().span;
      expect_punct(";");
      sp.end_line = end.end_line;
      sp.end_col = end.end_col;
      return c_call(name.text, callee.text, std::move(args), sp);
    }
    ExprPtr e = parse_expr();
    Span end = peek().span;
    expect_punct(";");
    sp.end_line = end.end_line;
    sp.end_col = end.end_col;
    return c_assign(name.text, e, sp);
  }

  CommandPtr parse_block() {
    Span sp = expect_punct("{").span;
    struct Item {
      bool is_var = false;
      std::string var;
      Span var_span;
      CommandPtr cmd;
    };
    std::vector<Item> items;
    while (!peek().is_punct("}")) {
      if (peek().kind == Token::Kind::Eof)
        throw ParseError(peek().span, "unterminated block");
      if (peek().is_ident("var")) {
        Span vs = advance().span;
        Token name = expect_name("a variable name");
        expect_punct(";");
        items.push_back({true, name.text, vs, nullptr});
        continue;
      }
      items.push_back({false, "", {}, parse_stmt()});
    }
    Span end = advance().span;  // }
    sp.end_line = end.end_line;
    sp.end_col = end.end_col;
    if (items.empty()) throw ParseError(sp, "empty block");

    // Right-fold into Seq nodes; a `var x;` scopes over the rest of the block.
    std::function<CommandPtr(std::size_t)> fold = [&](std::size_t i) -> CommandPtr {
      const Item& it = items[i];
      if (it.is_var) {
        if (i + 1 >= items.size())
          throw ParseError(it.var_span, "variable declaration at end of block has no scope");
        CommandPtr rest = fold(i + 1);
        Span s = it.var_span;
        s.end_line = rest->span.end_line;
        s.end_col = rest->span.end_col;
        return c_varblock(it.var, rest, s);
      }
      if (i + 1 >= items.size()) return it.cmd;
      CommandPtr rest = fold(i + 1);
      Span s = it.cmd->span;
      s.end_line = rest->span.end_line;
      s.end_col = rest->span.end_col;
      return c_seq(it.cmd, rest, s);
    };
    CommandPtr body = fold(0);
    // widen to the braces
    auto wrapped = std::make_shared<Command>(*body);
    wrapped->span = sp;
    return wrapped;
  }

  TheoryDecl parse_theory() {
    TheoryDecl th;
    th.span = expect_ident_kw("theory").span;
    if (peek().kind == Token::Kind::Ident) {
      Token name = expect_name("a theory name");
      th.name = name.text;
    }
    expect_punct("{");
    while (!peek().is_punct("}")) {
      Token name = expect_name("a function or axiom name");
      expect_punct(":");
      if (peek().is_ident("AXIOM")) {
        advance();
        TheoryAxiom ax;
        ax.name = name.text;
        ax.span = name.span;
        ax.formula = annot_formula(FormulaMode::Plain);
        expect_punct(";");
        th.axioms.push_back(std::move(ax));
      } else {
        TheoryFunc fn;
        fn.name = name.text;
        fn.span = name.span;
        expect_punct("(");
        if (!peek().is_punct(")")) {
          do {
            Token s = advance();
            if (s.is_ident("INT")) fn.arg_sorts.push_back(Sort::Int);
            else if (s.is_ident("BOOL")) fn.arg_sorts.push_back(Sort::Bool);
            else throw ParseError(s.span, "expected INT or BOOL");
          } while (accept_punct(","));
        }
        expect_punct(")");
        expect_punct("->");
        Token s = advance();
        if (s.is_ident("INT")) fn.result = Sort::Int;
        else if (s.is_ident("BOOL")) fn.result = Sort::Bool;
        else throw ParseError(s.span, "expected INT or BOOL");
        expect_punct(";");
        th.functions.push_back(std::move(fn));
      }
    }
    Span end = advance().span;
    th.span.end_line = end.end_line;
    th.span.end_col = end.end_col;
    return th;
  }

  MethodDecl parse_method() {
    MethodDecl m;
    m.span = expect_ident_kw("method").span;
    Token name = expect_name("a method name");
    m.name = name.text;
    expect_punct("(");
    if (!peek().is_punct(")")) {
      do {
        Token p = expect_name("a parameter name");
        m.params.push_back(p.text);
      } while (accept_punct(","));
    }
    expect_punct(")");
    m.contract = parse_contract();
    if (!peek().is_punct("{"))
      throw ParseError(peek().span, "expected a method body block");
    m.body = parse_block();
    m.span.end_line = m.body->span.end_line;
    m.span.end_col = m.body->span.end_col;
    return m;
  }

  Program parse() {
    Program p;
    p.file = filename;
    int anon_theories = 0;
    while (peek().kind != Token::Kind::Eof) {
      if (peek().is_ident("theory")) {
        TheoryDecl th = parse_theory();
        if (th.name.empty()) th.name = "theory#" + std::to_string(++anon_theories);
        p.theories.push_back(std::move(th));
      } else if (peek().is_ident("method")) {
        p.methods.push_back(parse_method());
      } else {
        throw ParseError(peek().span, "expected 'theory' or 'method', found '" + tok_desc() + "'");
      }
    }
    return p;
  }
};

}  // namespace

Program parse_program(const std::string& text, const std::string& filename) {
  ProgramParser pp;
  pp.toks = tokenize(text);
  pp.filename = filename;
  return pp.parse();
}

FormulaPtr parse_formula(const std::string& text, FormulaMode mode) {
  Parser p;
  p.toks = tokenize(text);
  PNodePtr n = p.p_formula();
  if (!p.peek().is(Token::Kind::Eof))
    throw ParseError(p.peek().span, "unexpected trailing input '" + p.tok_desc() + "'");
  Resolver r{mode, {}};
  return r.to_formula(n);
}

TermPtr parse_term(const std::string& text, FormulaMode mode) {
  Parser p;
  p.toks = tokenize(text);
  PNodePtr n = p.p_formula();
  if (!p.peek().is(Token::Kind::Eof))
    throw ParseError(p.peek().span, "unexpected trailing input '" + p.tok_desc() + "'");
  Resolver r{mode, {}};
  return r.to_term(n);
}

}  // namespace mw
