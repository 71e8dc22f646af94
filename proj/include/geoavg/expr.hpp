#pragma once

// Small arithmetic expression language for user-defined systems:
//   numbers, t, x_1..x_n, pi, e, + - * / ^, unary minus, parentheses and
//   sin cos tan exp log sqrt abs pow(a, b).
// Expressions compile to a postfix program; evaluation has no side effects
// and cannot reach anything but its arguments.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "geoavg/errors.hpp"
#include "geoavg/manifold.hpp"

namespace geoavg {

class ExprError : public std::runtime_error {
 public:
  ExprError(std::size_t pos, const std::string& what)
      : std::runtime_error("at column " + std::to_string(pos + 1) + ": " + what), pos_(pos) {}
  std::size_t position() const noexcept { return pos_; }

 private:
  std::size_t pos_;
};

class Expr {
 public:
  enum class Op { Const, Time, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Tan, Exp, Log, Sqrt, Abs };

  struct Instr {
    Op op;
    double value = 0.0;
    int index = 0;
  };

  Expr() = default;

  static Expr parse(const std::string& text, int max_var = -1) {
    Parser p{text, 0, max_var, {}};
    p.skip();
    if (p.pos >= text.size()) throw ExprError(0, "empty expression");
    p.expr();
    p.skip();
    if (p.pos != text.size()) throw ExprError(p.pos, "unexpected '" + std::string(1, text[p.pos]) + "'");
    Expr e;
    e.src_ = text;
    e.code_ = std::move(p.code);
    e.max_var_ = p.seen_var + 1;
    return e;
  }

  double operator()(const Vec& x, double t) const {
    double st[64];
    int sp = 0;
    for (const Instr& in : code_) {
      switch (in.op) {
        case Op::Const: st[sp++] = in.value; break;
        case Op::Time: st[sp++] = t; break;
        case Op::Var: st[sp++] = x[in.index]; break;
        case Op::Add: --sp; st[sp - 1] = st[sp - 1] + st[sp]; break;
        case Op::Sub: --sp; st[sp - 1] = st[sp - 1] - st[sp]; break;
        case Op::Mul: --sp; st[sp - 1] = st[sp - 1] * st[sp]; break;
        case Op::Div: --sp; st[sp - 1] = st[sp - 1] / st[sp]; break;
        case Op::Pow: --sp; st[sp - 1] = std::pow(st[sp - 1], st[sp]); break;
        case Op::Neg: st[sp - 1] = -st[sp - 1]; break;
        case Op::Sin: st[sp - 1] = std::sin(st[sp - 1]); break;
        case Op::Cos: st[sp - 1] = std::cos(st[sp - 1]); break;
        case Op::Tan: st[sp - 1] = std::tan(st[sp - 1]); break;
        case Op::Exp: st[sp - 1] = std::exp(st[sp - 1]); break;
        case Op::Log: st[sp - 1] = std::log(st[sp - 1]); break;
        case Op::Sqrt: st[sp - 1] = std::sqrt(st[sp - 1]); break;
        case Op::Abs: st[sp - 1] = std::abs(st[sp - 1]); break;
      }
    }
    return st[0];
  }

  const std::string& source() const { return src_; }
  /// Highest N among the x_N referenced, 0 if none.
  int max_var() const { return max_var_; }
  bool uses_time() const {
    for (const auto& in : code_) {
      if (in.op == Op::Time) return true;
    }
    return false;
  }

 private:
  struct Parser {
    const std::string& s;
    std::size_t pos;
    int max_var;
    std::vector<Instr> code;
    int seen_var = -1;
    int depth = 0;
    int stack = 0;
    int peak = 0;

    void emit(Op op, double v = 0.0, int idx = 0) {
      code.push_back({op, v, idx});
      switch (op) {
        case Op::Const: case Op::Time: case Op::Var: ++stack; break;
        case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: case Op::Pow: --stack; break;
        default: break;
      }
      peak = std::max(peak, stack);
      if (peak > 60) throw ExprError(pos, "expression too deeply nested");
    }

    void skip() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
      skip();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    // expr := term (('+'|'-') term)*
    void expr() {
      if (++depth > 40) throw ExprError(pos, "expression too deeply nested");
      term();
      while (true) {
        if (eat('+')) {
          term();
          emit(Op::Add);
        } else if (eat('-')) {
          term();
          emit(Op::Sub);
        } else {
          break;
        }
      }
      --depth;
    }
    // term := unary (('*'|'/') unary)*
    void term() {
      unary();
      while (true) {
        if (eat('*')) {
          unary();
          emit(Op::Mul);
        } else if (eat('/')) {
          unary();
          emit(Op::Div);
        } else {
          break;
        }
      }
    }
    // unary := '-' unary | power
    void unary() {
      if (eat('-')) {
        unary();
        emit(Op::Neg);
      } else if (eat('+')) {
        unary();
      } else {
        power();
      }
    }
    // power := atom ('^' unary)?   (right associative)
    void power() {
      atom();
      if (eat('^')) {
        unary();
        emit(Op::Pow);
      }
    }
    void atom() {
      skip();
      if (pos >= s.size()) throw ExprError(pos, "unexpected end of expression");
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        const char* b = s.c_str() + pos;
        char* e = nullptr;
        const double v = std::strtod(b, &e);
        if (e == b) throw ExprError(pos, "bad number");
        pos += static_cast<std::size_t>(e - b);
        emit(Op::Const, v);
        return;
      }
      if (c == '(') {
        ++pos;
        expr();
        if (!eat(')')) throw ExprError(pos, "expected ')'");
        return;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        const std::size_t start = pos;
        while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
        const std::string id = s.substr(start, pos - start);
        if (id == "t") return emit(Op::Time);
        if (id == "pi") return emit(Op::Const, std::numbers::pi);
        if (id == "e") return emit(Op::Const, std::numbers::e);
        if (id.size() > 2 && id[0] == 'x' && id[1] == '_') {
          const std::string num = id.substr(2);
          if (num.find_first_not_of("0123456789") != std::string::npos || num[0] == '0') {
            throw ExprError(start, "bad variable '" + id + "'");
          }
          const int k = std::stoi(num) - 1;
          if (max_var >= 0 && k >= max_var) {
            throw ExprError(start, "variable '" + id + "' exceeds dimension " + std::to_string(max_var));
          }
          seen_var = std::max(seen_var, k);
          return emit(Op::Var, 0.0, k);
        }
        Op f;
        if (id == "sin") f = Op::Sin;
        else if (id == "cos") f = Op::Cos;
        else if (id == "tan") f = Op::Tan;
        else if (id == "exp") f = Op::Exp;
        else if (id == "log") f = Op::Log;
        else if (id == "sqrt") f = Op::Sqrt;
        else if (id == "abs") f = Op::Abs;
        else if (id == "pow") f = Op::Pow;
        else throw ExprError(start, "unknown identifier '" + id + "'");
        if (!eat('(')) throw ExprError(pos, "expected '(' after " + id);
        expr();
        if (f == Op::Pow) {
          if (!eat(',')) throw ExprError(pos, "pow takes two arguments");
          expr();
        }
        if (!eat(')')) throw ExprError(pos, "expected ')'");
        emit(f);
        return;
      }
      throw ExprError(pos, "unexpected '" + std::string(1, c) + "'");
    }
  };

  std::string src_;
  std::vector<Instr> code_;
  int max_var_ = 0;
};

}  // namespace geoavg
