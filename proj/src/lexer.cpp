#include "lexer.hpp"

#include <cctype>

namespace mw {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct Cursor {
  const std::string& s;
  std::size_t i = 0;
  int line = 1;
  int col = 1;

  bool eof() const { return i >= s.size(); }
  char peek(std::size_t off = 0) const { return i + off < s.size() ? s[i + off] : '\0'; }
  char advance() {
    char c = s[i++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }
  bool match2(char a, char b) const { return peek() == a && peek(1) == b; }
};

}  // namespace

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  Cursor c{text};

  auto push = [&](Token::Kind k, std::string t, Span sp, Value v = 0) {
    Token tok;
    tok.kind = k;
    tok.text = std::move(t);
    tok.value = v;
    tok.span = sp;
    out.push_back(std::move(tok));
  };

  while (!c.eof()) {
    char ch = c.peek();
    if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
      c.advance();
      continue;
    }
    Span sp{c.line, c.col, c.line, c.col};
    // comments and annotation delimiters
    if (ch == '/' && c.peek(1) == '/') {
      while (!c.eof() && c.peek() != '\n') c.advance();
      continue;
    }
    if (ch == '/' && c.peek(1) == '*' && c.peek(2) == '@') {
      c.advance(); c.advance(); c.advance();
      sp.end_col = sp.col + 2;
      push(Token::Kind::AnnotStart, "/*@", sp);
      continue;
    }
    if (ch == '/' && c.peek(1) == '*') {
      Span start = sp;
      c.advance(); c.advance();
      bool closed = false;
      while (!c.eof()) {
        if (c.match2('*', '/')) {
          c.advance(); c.advance();
          closed = true;
          break;
        }
        c.advance();
      }
      if (!closed) throw ParseError(start, "unterminated comment");
      continue;
    }
    if (ch == '@' && c.peek(1) == '*' && c.peek(2) == '/') {
      c.advance(); c.advance(); c.advance();
      sp.end_col = sp.col + 2;
      push(Token::Kind::AnnotEnd, "@*/", sp);
      continue;
    }
    if (ident_start(ch)) {
      std::string id;
      while (!c.eof() && ident_char(c.peek())) id += c.advance();
      // internal fresh-name suffix: base#suffix
      if (c.peek() == '#' && ident_char(c.peek(1))) {
        id += c.advance();
        while (!c.eof() && ident_char(c.peek())) id += c.advance();
      }
      // explicit state tag: base$0 / base$1
      if (c.peek() == '$' && (c.peek(1) == '0' || c.peek(1) == '1')) {
        id += c.advance();
        id += c.advance();
      }
      sp.end_col = c.col - 1;
      sp.end_line = c.line;
      push(Token::Kind::Ident, id, sp);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::string num;
      while (!c.eof() && std::isdigit(static_cast<unsigned char>(c.peek()))) num += c.advance();
      sp.end_col = c.col - 1;
      sp.end_line = c.line;
      Value v;
      try {
        v = std::stoll(num);
      } catch (const std::exception&) {
        throw ParseError(sp, "integer literal out of range: " + num);
      }
      push(Token::Kind::Int, num, sp, v);
      continue;
    }
    // multi-char punctuation, longest first
    static const char* multi[] = {"<=>", "=>", "==", "!=", "<=", ">=", "&&", "||", "/=", "->"};
    bool matched = false;
    for (const char* m : multi) {
      std::size_t len = std::string(m).size();
      if (text.compare(c.i, len, m) == 0) {
        for (std::size_t k = 0; k < len; ++k) c.advance();
        sp.end_col = sp.col + static_cast<int>(len) - 1;
        push(Token::Kind::Punct, m, sp);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    static const std::string singles = "+-*/%<>=!(){};,:";
    if (singles.find(ch) != std::string::npos) {
      c.advance();
      push(Token::Kind::Punct, std::string(1, ch), sp);
      continue;
    }
    throw ParseError(sp, std::string("unexpected character '") + ch + "'");
  }
  Span eof_sp{c.line, c.col, c.line, c.col};
  push(Token::Kind::Eof, "", eof_sp);
  return out;
}

}  // namespace mw
