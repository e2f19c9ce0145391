#pragma once

// A small closed grammar for metric components in configuration files:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?
//   primary := number | 'pi' | 't' | 'x0'..'x6' | func '(' expr (',' expr)? ')' | '(' expr ')'
//   func    := exp | log | sin | cos | sqrt | pow
//
// `t` is an alias for x0. Expressions are parsed once and evaluated to jets at
// each chart point; nothing else is executable.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "weylcheck/jet.hpp"

namespace weylcheck {

class Expression {
 public:
  /// Throws ConfigError with the offending position on malformed input.
  static Expression parse(std::string_view text);

  /// Evaluate at a chart point; coordinates beyond the expression's highest
  /// variable are ignored. Throws ConfigError if a variable index is >= n.
  Jet3 evaluate(std::span<const double> coords) const;

  /// Highest coordinate index referenced, or -1 for a constant expression.
  int max_variable() const;

  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace weylcheck
