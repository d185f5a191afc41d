#pragma once

#include <string>
#include <vector>

namespace mw {

// Half-open character positions are not tracked; spans are line/col inclusive.
struct Span {
  int line = 0;
  int col = 0;
  int end_line = 0;
  int end_col = 0;

  bool covers_line(int l) const { return line <= l && l <= end_line; }
  bool contains(const Span& other) const {
    if (other.line < line || other.end_line > end_line) return false;
    if (other.line == line && other.col < col) return false;
    if (other.end_line == end_line && other.end_col > end_col) return false;
    return true;
  }
  bool operator==(const Span& o) const {
    return line == o.line && col == o.col && end_line == o.end_line && end_col == o.end_col;
  }
  std::string str() const {
    return std::to_string(line) + ":" + std::to_string(col);
  }
};

struct Diagnostic {
  Span span;
  std::string message;
  std::string file;

  // "file:line:col: message"
  std::string str() const {
    std::string out;
    if (!file.empty()) out += file + ":";
    out += std::to_string(span.line) + ":" + std::to_string(span.col) + ": " + message;
    return out;
  }
};

struct ParseError : std::exception {
  Span span;
  std::string message;
  std::string rendered;
  ParseError(Span s, std::string msg) : span(s), message(std::move(msg)) {
    rendered = std::to_string(span.line) + ":" + std::to_string(span.col) + ": " + message;
  }
  const char* what() const noexcept override { return rendered.c_str(); }
};

}  // namespace mw
