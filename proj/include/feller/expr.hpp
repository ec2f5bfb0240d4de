#ifndef FELLER_EXPR_HPP
#define FELLER_EXPR_HPP

#include <cctype>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "feller/errors.hpp"

namespace feller {

// Arithmetic expressions in one variable `x`. Grammar:
//   expr    := term (('+'|'-') term)*
//   term    := factor (('*'|'/') factor)*
//   factor  := '-' factor | primary
//   primary := number | 'x' | name '(' expr (',' expr)? ')' | '(' expr ')'
//   name    := exp | log | sinh | cosh | pow
class Expr {
 public:
  static Expr parse(const std::string& text) {
    Parser p{text, 0};
    Expr e;
    e.root_ = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size())
      raise(Errc::ConfigError, "trailing characters in expression at offset " +
                                   std::to_string(p.pos) + ": '" + text + "'");
    e.text_ = text;
    return e;
  }

  double operator()(double x) const { return eval(*root_, x); }
  const std::string& text() const { return text_; }

 private:
  enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Exp, Log, Sinh, Cosh, Pow };
  struct Node {
    Op op;
    double value = 0.0;
    std::shared_ptr<Node> a, b;
  };
  using P = std::shared_ptr<Node>;

  static double eval(const Node& n, double x) {
    switch (n.op) {
      case Op::Const: return n.value;
      case Op::Var: return x;
      case Op::Add: return eval(*n.a, x) + eval(*n.b, x);
      case Op::Sub: return eval(*n.a, x) - eval(*n.b, x);
      case Op::Mul: return eval(*n.a, x) * eval(*n.b, x);
      case Op::Div: return eval(*n.a, x) / eval(*n.b, x);
      case Op::Neg: return -eval(*n.a, x);
      case Op::Exp: return std::exp(eval(*n.a, x));
      case Op::Log: return std::log(eval(*n.a, x));
      case Op::Sinh: return std::sinh(eval(*n.a, x));
      case Op::Cosh: return std::cosh(eval(*n.a, x));
      case Op::Pow: return std::pow(eval(*n.a, x), eval(*n.b, x));
    }
    return 0.0;
  }

  struct Parser {
    const std::string& s;
    std::size_t pos;

    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
      skip_ws();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    [[noreturn]] void fail(const std::string& m) {
      raise(Errc::ConfigError, m + " at offset " + std::to_string(pos) + " in '" + s + "'");
    }

    P parse_expr() {
      P lhs = parse_term();
      for (;;) {
        if (eat('+')) lhs = mk(Op::Add, lhs, parse_term());
        else if (eat('-')) lhs = mk(Op::Sub, lhs, parse_term());
        else return lhs;
      }
    }
    P parse_term() {
      P lhs = parse_factor();
      for (;;) {
        if (eat('*')) lhs = mk(Op::Mul, lhs, parse_factor());
        else if (eat('/')) lhs = mk(Op::Div, lhs, parse_factor());
        else return lhs;
      }
    }
    P parse_factor() {
      if (eat('-')) return mk(Op::Neg, parse_factor(), nullptr);
      return parse_primary();
    }
    P parse_primary() {
      skip_ws();
      if (pos >= s.size()) fail("unexpected end of expression");
      char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t n = 0;
        double v = std::stod(s.substr(pos), &n);
        pos += n;
        return mk_const(v);
      }
      if (c == '(') {
        ++pos;
        P e = parse_expr();
        if (!eat(')')) fail("expected ')'");
        return e;
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t start = pos;
        while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
        std::string name = s.substr(start, pos - start);
        if (name == "x") return mk(Op::Var, nullptr, nullptr);
        Op op;
        bool binary = false;
        if (name == "exp") op = Op::Exp;
        else if (name == "log") op = Op::Log;
        else if (name == "sinh") op = Op::Sinh;
        else if (name == "cosh") op = Op::Cosh;
        else if (name == "pow") { op = Op::Pow; binary = true; }
        else fail("unknown function '" + name + "'");
        if (!eat('(')) fail("expected '(' after '" + name + "'");
        P a = parse_expr();
        P b;
        if (binary) {
          if (!eat(',')) fail("pow takes two arguments");
          b = parse_expr();
        }
        if (!eat(')')) fail("expected ')'");
        return mk(op, a, b);
      }
      fail(std::string("unexpected character '") + c + "'");
    }

    static P mk(Op op, P a, P b) {
      auto n = std::make_shared<Node>();
      n->op = op;
      n->a = std::move(a);
      n->b = std::move(b);
      return n;
    }
    static P mk_const(double v) {
      auto n = std::make_shared<Node>();
      n->op = Op::Const;
      n->value = v;
      return n;
    }
  };

  P root_;
  std::string text_;
};

}  // namespace feller

#endif
