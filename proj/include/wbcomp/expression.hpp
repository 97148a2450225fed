#pragma once

// Profile expression language. Grammar (whitespace ignored):
//
//   expr    := term   (('+' | '-') term)*
//   term    := unary  (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right associative, -t^2 = -(t^2)
//   primary := number | 't' | 'pi' | func '(' expr ')' | '(' expr ')'
//   func    := exp | log | sin | cos | sinh | cosh | sqrt
//   number  := digits ['.' digits] [('e'|'E') ['+'|'-'] digits]
//
// The single variable is t. Evaluation runs on second-order jets, so every
// expression yields its exact first and second derivatives.

#include <cctype>
#include <cstdlib>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wbcomp/jet.hpp"

namespace wbcomp {

class ExpressionError : public std::runtime_error {
 public:
  ExpressionError(const std::string& message, std::size_t column)
      : std::runtime_error(message + " at column " + std::to_string(column)), column_(column) {}
  [[nodiscard]] std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

class Expression {
 public:
  static Expression parse(const std::string& text);

  [[nodiscard]] Jet eval(const Jet& t) const { return eval_node(root_, t); }
  [[nodiscard]] Jet at(double t) const { return eval(Jet::variable(t)); }
  [[nodiscard]] const std::string& text() const { return text_; }

 private:
  enum class Op { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Exp, Log, Sin, Cos, Sinh, Cosh, Sqrt };
  struct Node {
    Op op = Op::Number;
    double value = 0.0;
    int lhs = -1;
    int rhs = -1;
  };

  class Parser;

  [[nodiscard]] Jet eval_node(int i, const Jet& t) const {
    const Node& n = nodes_[i];
    switch (n.op) {
      case Op::Number: return Jet::constant(n.value);
      case Op::Var: return t;
      case Op::Neg: return -eval_node(n.lhs, t);
      case Op::Add: return eval_node(n.lhs, t) + eval_node(n.rhs, t);
      case Op::Sub: return eval_node(n.lhs, t) - eval_node(n.rhs, t);
      case Op::Mul: return eval_node(n.lhs, t) * eval_node(n.rhs, t);
      case Op::Div: return eval_node(n.lhs, t) / eval_node(n.rhs, t);
      case Op::Pow: return pow(eval_node(n.lhs, t), eval_node(n.rhs, t));
      case Op::Exp: return exp(eval_node(n.lhs, t));
      case Op::Log: return log(eval_node(n.lhs, t));
      case Op::Sin: return sin(eval_node(n.lhs, t));
      case Op::Cos: return cos(eval_node(n.lhs, t));
      case Op::Sinh: return sinh(eval_node(n.lhs, t));
      case Op::Cosh: return cosh(eval_node(n.lhs, t));
      case Op::Sqrt: return sqrt(eval_node(n.lhs, t));
    }
    return {};
  }

  std::string text_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

class Expression::Parser {
 public:
  Parser(const std::string& s, Expression& e) : s_(s), e_(e) {}

  int parse_all() {
    const int root = expr();
    skip();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ExpressionError(what, pos_ + 1); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  int add(Op op, int lhs = -1, int rhs = -1, double value = 0.0) {
    e_.nodes_.push_back({op, value, lhs, rhs});
    return int(e_.nodes_.size()) - 1;
  }

  int expr() {
    int lhs = term();
    for (;;) {
      if (accept('+')) lhs = add(Op::Add, lhs, term());
      else if (accept('-')) lhs = add(Op::Sub, lhs, term());
      else return lhs;
    }
  }
  int term() {
    int lhs = unary();
    for (;;) {
      if (accept('*')) lhs = add(Op::Mul, lhs, unary());
      else if (accept('/')) lhs = add(Op::Div, lhs, unary());
      else return lhs;
    }
  }
  int unary() {
    if (accept('-')) return add(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }
  int power() {
    const int base = primary();
    if (accept('^')) return add(Op::Pow, base, unary());
    return base;
  }
  int primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (accept('(')) {
      const int inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "t") return add(Op::Var);
      if (name == "pi") return add(Op::Number, -1, -1, 3.14159265358979323846264338327950288);
      static const std::pair<const char*, Op> funcs[] = {
          {"exp", Op::Exp}, {"log", Op::Log},   {"sin", Op::Sin},  {"cos", Op::Cos},
          {"sinh", Op::Sinh}, {"cosh", Op::Cosh}, {"sqrt", Op::Sqrt}};
      for (const auto& [fname, op] : funcs) {
        if (name != fname) continue;
        if (!accept('(')) fail("expected '(' after " + name);
        const int arg = expr();
        if (!accept(')')) fail("expected ')'");
        return add(op, arg);
      }
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }
  int number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t from = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return pos_ > from;
    };
    bool any = digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      any = digits() || any;
    }
    if (!any) fail("malformed number");
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (!digits()) fail("malformed exponent");
    }
    return add(Op::Number, -1, -1, std::strtod(s_.c_str() + start, nullptr));
  }

  const std::string& s_;
  Expression& e_;
  std::size_t pos_ = 0;
};

inline Expression Expression::parse(const std::string& text) {
  Expression e;
  e.text_ = text;
  Parser p(e.text_, e);
  e.root_ = p.parse_all();
  return e;
}

}  // namespace wbcomp
