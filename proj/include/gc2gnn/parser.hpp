#pragma once

// Concrete syntax for GC2 queries.
//
//   formula  := or_expr ;
//   or_expr  := and_expr { "or" and_expr } ;
//   and_expr := unary { "and" unary } ;
//   unary    := "not" unary | "exists>=" INT unary | atom ;
//   atom     := "col(" INT ")" | "true" | "(" formula ")" ;
//
// Whitespace between tokens is insignificant; '#' starts a comment that runs
// to the end of the line.

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gc2gnn/formula.hpp"

namespace gc2gnn {

struct SourceSpan {
  size_t start = 0;
  size_t end = 0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(SourceSpan s, const std::string& msg)
      : std::runtime_error("parse error at " + std::to_string(s.start) + ".." + std::to_string(s.end) + ": " + msg),
        span(s) {}
  SourceSpan span;
};

namespace detail {

class QueryParser {
 public:
  explicit QueryParser(std::string_view text) : text_(text) {}

  Formula parse_all() {
    Formula f = parse_or();
    skip_space();
    if (pos_ != text_.size()) fail(pos_, token_end(pos_), "expected end of input");
    return f;
  }

 private:
  Formula parse_or() {
    Formula f = parse_and();
    while (accept_word("or")) f = Formula::disj(f, parse_and());
    return f;
  }

  Formula parse_and() {
    Formula f = parse_unary();
    while (accept_word("and")) f = Formula::conj(f, parse_unary());
    return f;
  }

  Formula parse_unary() {
    if (accept_word("not")) return Formula::negate(parse_unary());
    skip_space();
    size_t start = pos_;
    if (accept_word("exists")) {
      expect(">=");
      uint32_t n = parse_int();
      if (n == 0) fail(start, pos_, "counting quantifier 'exists>=0' is not allowed; N must be >= 1");
      return Formula::exists_geq(n, parse_unary());
    }
    return parse_atom();
  }

  Formula parse_atom() {
    skip_space();
    size_t start = pos_;
    if (accept_word("true")) return Formula::top();
    if (accept_word("col")) {
      expect("(");
      uint32_t i = parse_int();
      if (i == 0) fail(start, pos_, "color index 0 is not allowed; colors are numbered from 1");
      expect(")");
      return Formula::color(i);
    }
    if (accept("(")) {
      Formula f = parse_or();
      expect(")");
      return f;
    }
    fail(start, token_end(start), "expected 'not', 'exists>=', 'col(', 'true' or '('");
  }

  uint32_t parse_int() {
    skip_space();
    size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
    if (start == pos_) fail(start, token_end(start), "expected integer");
    uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc()) fail(start, pos_, "integer out of range");
    return v;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  static bool is_word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  }

  bool accept(std::string_view tok) {
    skip_space();
    if (text_.substr(pos_, tok.size()) != tok) return false;
    pos_ += tok.size();
    return true;
  }

  // Keyword match that does not split identifiers ("notx" is not "not").
  bool accept_word(std::string_view word) {
    skip_space();
    if (text_.substr(pos_, word.size()) != word) return false;
    size_t after = pos_ + word.size();
    if (after < text_.size() && is_word_char(text_[after])) return false;
    pos_ = after;
    return true;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) fail(pos_, token_end(pos_), "expected '" + std::string(tok) + "'");
  }

  size_t token_end(size_t from) const {
    if (from >= text_.size()) return text_.size();
    size_t e = from;
    while (e < text_.size() && is_word_char(text_[e])) ++e;
    return e == from ? from + 1 : e;
  }

  [[noreturn]] void fail(size_t start, size_t end, const std::string& msg) const {
    end = std::min(end, text_.size());
    start = std::min(start, end);
    throw ParseError({start, end}, msg);
  }

  std::string_view text_;
  size_t pos_ = 0;
};

}  // namespace detail

inline Formula parse(std::string_view text) { return detail::QueryParser(text).parse_all(); }

/// Fully parenthesized binary connectives; parse(render(f)) == f.
inline std::string render(const Formula& f) {
  switch (f.kind()) {
    case NodeKind::Color: return "col(" + std::to_string(f.value()) + ")";
    case NodeKind::Top: return "true";
    case NodeKind::Not: return "not " + render(f.child());
    case NodeKind::ExistsGeq: return "exists>=" + std::to_string(f.value()) + " " + render(f.child());
    case NodeKind::And: return "(" + render(f.left()) + " and " + render(f.right()) + ")";
    case NodeKind::Or: return "(" + render(f.left()) + " or " + render(f.right()) + ")";
  }
  return {};
}

}  // namespace gc2gnn
