#pragma once

#include <memory>
#include <string>

#include "cohesive/numerics.hpp"

namespace cohesive {

/// Arithmetic expression in one free variable `t`.
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('+' | '-') unary | power
///   power   := primary ('^' unary)?          right associative
///   primary := number | 't' | 'pi' | func '(' expr (',' expr)? ')' | '(' expr ')'
///   func    := exp log sqrt sin cos asin acos acosh tanh atanh abs   (one argument)
///            | min max                                               (two arguments)
class Expression {
 public:
  struct Node;

  static Expression parse(const std::string& text);

  double operator()(double t) const;
  /// Canonical fully parenthesized text; parse(str()) evaluates identically.
  std::string str() const;
  const std::string& source() const { return source_; }
  ScalarFn fn() const;

 private:
  std::shared_ptr<const Node> root_;
  std::string source_;
};

}  // namespace cohesive
