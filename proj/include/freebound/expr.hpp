#pragma once

#include <memory>
#include <string>

namespace freebound {

namespace detail {
struct ExprNode;
}

// Arithmetic height expressions over the unit disk, used by the solver CLI so
// experiments are reproducible from their manifest alone.
//
// Grammar (whitespace ignored, case-sensitive):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?            right-associative
//   primary := number | 'r' | 'x' | 'y'
//            | ('cos' | 'sin' | 'exp') '(' expr ')'
//            | '(' expr ')'
// Numbers are plain decimals with optional fraction and exponent part.
// parse throws ParseError with the offending position on malformed input.
class HeightExpression {
 public:
  static HeightExpression parse(const std::string& text);

  // Evaluates at disk coordinates (x, y) with r = hypot(x, y).
  double operator()(double x, double y) const;

  const std::string& text() const { return text_; }

 private:
  HeightExpression() = default;
  std::shared_ptr<const detail::ExprNode> root_;
  std::string text_;
};

}  // namespace freebound
