#include "freebound/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <utility>

#include "freebound/types.hpp"

namespace freebound {
namespace detail {

struct ExprNode {
  enum class Kind { number, variable, negate, add, sub, mul, div, pow, call };
  enum class Var { r, x, y };
  enum class Fn { cos, sin, exp };

  Kind kind;
  double value = 0;
  Var var = Var::r;
  Fn fn = Fn::cos;
  std::shared_ptr<const ExprNode> lhs, rhs;

  double eval(double x, double y, double r) const {
    switch (kind) {
      case Kind::number:
        return value;
      case Kind::variable:
        return var == Var::r ? r : (var == Var::x ? x : y);
      case Kind::negate:
        return -lhs->eval(x, y, r);
      case Kind::add:
        return lhs->eval(x, y, r) + rhs->eval(x, y, r);
      case Kind::sub:
        return lhs->eval(x, y, r) - rhs->eval(x, y, r);
      case Kind::mul:
        return lhs->eval(x, y, r) * rhs->eval(x, y, r);
      case Kind::div:
        return lhs->eval(x, y, r) / rhs->eval(x, y, r);
      case Kind::pow:
        return std::pow(lhs->eval(x, y, r), rhs->eval(x, y, r));
      case Kind::call: {
        const double a = lhs->eval(x, y, r);
        return fn == Fn::cos ? std::cos(a) : (fn == Fn::sin ? std::sin(a) : std::exp(a));
      }
    }
    return 0;  // unreachable
  }
};

}  // namespace detail

namespace {

using detail::ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_node(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("height expression: " + what + " at position " +
                     std::to_string(pos_) + " in \"" + text_ + "\"");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+'))
        lhs = make_node({ExprNode::Kind::add, 0, {}, {}, lhs, term()});
      else if (eat('-'))
        lhs = make_node({ExprNode::Kind::sub, 0, {}, {}, lhs, term()});
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (eat('*'))
        lhs = make_node({ExprNode::Kind::mul, 0, {}, {}, lhs, unary()});
      else if (eat('/'))
        lhs = make_node({ExprNode::Kind::div, 0, {}, {}, lhs, unary()});
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (eat('-')) return make_node({ExprNode::Kind::negate, 0, {}, {}, unary(), nullptr});
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    // Right-associative: the exponent re-enters at unary so 2^-3 and
    // 2^3^2 = 2^(3^2) parse the usual way.
    if (eat('^')) return make_node({ExprNode::Kind::pow, 0, {}, {}, base, unary()});
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected a value");
    const char c = text_[pos_];

    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();

    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string name;
      while (pos_ < text_.size() &&
             std::isalpha(static_cast<unsigned char>(text_[pos_])))
        name += text_[pos_++];
      if (name == "r")
        return make_node({ExprNode::Kind::variable, 0, ExprNode::Var::r, {}, nullptr, nullptr});
      if (name == "x")
        return make_node({ExprNode::Kind::variable, 0, ExprNode::Var::x, {}, nullptr, nullptr});
      if (name == "y")
        return make_node({ExprNode::Kind::variable, 0, ExprNode::Var::y, {}, nullptr, nullptr});
      ExprNode::Fn fn;
      if (name == "cos")
        fn = ExprNode::Fn::cos;
      else if (name == "sin")
        fn = ExprNode::Fn::sin;
      else if (name == "exp")
        fn = ExprNode::Fn::exp;
      else
        fail("unknown identifier \"" + name + "\" (expected r, x, y, cos, sin, exp)");
      if (!eat('(')) fail("expected '(' after \"" + name + "\"");
      NodePtr arg = expr();
      if (!eat(')')) fail("missing ')'");
      ExprNode n{ExprNode::Kind::call, 0, {}, fn, arg, nullptr};
      return make_node(std::move(n));
    }

    if (eat('(')) {
      NodePtr inner = expr();
      if (!eat(')')) fail("missing ')'");
      return inner;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    const char* start = text_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(start, &end);
    if (end == start) fail("malformed number");
    // strtod accepts leading signs and hex; the tokenizer only hands it
    // inputs starting with a digit or '.', so those cannot occur here.
    pos_ += static_cast<std::size_t>(end - start);
    return make_node({ExprNode::Kind::number, v, {}, {}, nullptr, nullptr});
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

HeightExpression HeightExpression::parse(const std::string& text) {
  HeightExpression h;
  h.root_ = Parser(text).run();
  h.text_ = text;
  return h;
}

double HeightExpression::operator()(double x, double y) const {
  return root_->eval(x, y, std::hypot(x, y));
}

}  // namespace freebound
