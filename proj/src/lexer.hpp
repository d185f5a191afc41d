#pragma once

#include "formula.hpp"
#include "span.hpp"

#include <string>
#include <vector>

namespace mw {

struct Token {
  enum class Kind { Ident, Int, Punct, AnnotStart, AnnotEnd, Eof };
  Kind kind = Kind::Eof;
  std::string text;
  Value value = 0;  // Int
  Span span;

  bool is(Kind k) const { return kind == k; }
  bool is_punct(const char* p) const { return kind == Kind::Punct && text == p; }
  bool is_ident(const char* id) const { return kind == Kind::Ident && text == id; }
};

// Throws ParseError on illegal characters or unterminated comments.
// `/*@ ... @*/` blocks are tokenized (annotations), `/* ... */` is skipped.
std::vector<Token> tokenize(const std::string& text);

}  // namespace mw
