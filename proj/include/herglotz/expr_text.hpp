#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>

#include "herglotz/expr.hpp"

// Text form of expressions. The grammar, loosest to tightest:
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := '-' factor | power
//   power  := atom ('^' factor)?
//   atom   := number | variable | function '(' expr ')' | '(' expr ')'
//
// '+ - * /' associate left, '^' associates right and binds tighter than
// unary minus. Variables are t, z, x, D1x..D9x; functions are exp, log,
// sin, cos, sqrt. There are no named constants: write exp(1) for e.

namespace herglotz {

namespace detail {

struct Lexer {
  std::string_view src;
  std::size_t pos = 0;

  enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

  Tok type = Tok::End;
  double number = 0.0;
  std::string_view ident;
  std::size_t tok_offset = 0;

  explicit Lexer(std::string_view text) : src(text) { advance(); }

  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  }
  static bool is_ident_char(char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9');
  }
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }

  void advance() {
    while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t' ||
                                src[pos] == '\r' || src[pos] == '\n')) {
      ++pos;
    }
    tok_offset = pos;
    if (pos == src.size()) {
      type = Tok::End;
      return;
    }
    const char c = src[pos];
    switch (c) {
      case '+': type = Tok::Plus; ++pos; return;
      case '-': type = Tok::Minus; ++pos; return;
      case '*': type = Tok::Star; ++pos; return;
      case '/': type = Tok::Slash; ++pos; return;
      case '^': type = Tok::Caret; ++pos; return;
      case '(': type = Tok::LParen; ++pos; return;
      case ')': type = Tok::RParen; ++pos; return;
      default: break;
    }
    if (is_digit(c) || c == '.') {
      lex_number();
      return;
    }
    if (is_ident_start(c)) {
      std::size_t end = pos;
      while (end < src.size() && is_ident_char(src[end])) ++end;
      ident = src.substr(pos, end - pos);
      pos = end;
      type = Tok::Ident;
      return;
    }
    throw SyntaxError(pos, "a number, name, operator or parenthesis");
  }

  void lex_number() {
    std::size_t end = pos;
    while (end < src.size() && is_digit(src[end])) ++end;
    if (end < src.size() && src[end] == '.') {
      ++end;
      while (end < src.size() && is_digit(src[end])) ++end;
    }
    if (end == pos || (end == pos + 1 && src[pos] == '.')) {
      throw SyntaxError(pos, "a digit");
    }
    if (end < src.size() && (src[end] == 'e' || src[end] == 'E')) {
      std::size_t exp_end = end + 1;
      if (exp_end < src.size() && (src[exp_end] == '+' || src[exp_end] == '-')) ++exp_end;
      if (exp_end < src.size() && is_digit(src[exp_end])) {
        while (exp_end < src.size() && is_digit(src[exp_end])) ++exp_end;
        end = exp_end;
      }
    }
    const char* first = src.data() + pos;
    const char* last = src.data() + end;
    auto [ptr, ec] = std::from_chars(first, last, number);
    if (ec != std::errc() || ptr != last) {
      throw SyntaxError(pos, "a representable number");
    }
    pos = end;
    type = Tok::Number;
  }
};

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : lex_(text) {}

  Expr run() {
    Expr e = parse_expr();
    if (lex_.type != Lexer::Tok::End) {
      throw SyntaxError(lex_.tok_offset, "an operator or end of input");
    }
    return e;
  }

 private:
  Lexer lex_;

  Expr parse_expr() {
    Expr e = parse_term();
    while (lex_.type == Lexer::Tok::Plus || lex_.type == Lexer::Tok::Minus) {
      const bool plus = lex_.type == Lexer::Tok::Plus;
      lex_.advance();
      Expr rhs = parse_term();
      e = plus ? Expr::add(std::move(e), std::move(rhs))
               : Expr::sub(std::move(e), std::move(rhs));
    }
    return e;
  }

  Expr parse_term() {
    Expr e = parse_factor();
    while (lex_.type == Lexer::Tok::Star || lex_.type == Lexer::Tok::Slash) {
      const bool star = lex_.type == Lexer::Tok::Star;
      lex_.advance();
      Expr rhs = parse_factor();
      e = star ? Expr::mul(std::move(e), std::move(rhs))
               : Expr::div(std::move(e), std::move(rhs));
    }
    return e;
  }

  Expr parse_factor() {
    if (lex_.type == Lexer::Tok::Minus) {
      lex_.advance();
      return Expr::neg(parse_factor());
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (lex_.type == Lexer::Tok::Caret) {
      lex_.advance();
      return Expr::pow(std::move(base), parse_factor());
    }
    return base;
  }

  Expr parse_atom() {
    switch (lex_.type) {
      case Lexer::Tok::Number: {
        Expr e = Expr::constant(lex_.number);
        lex_.advance();
        return e;
      }
      case Lexer::Tok::Ident:
        return parse_name();
      case Lexer::Tok::LParen: {
        lex_.advance();
        Expr e = parse_expr();
        expect_rparen();
        return e;
      }
      default:
        throw SyntaxError(lex_.tok_offset,
                          "a number, variable, function or '('");
    }
  }

  Expr parse_name() {
    const std::string_view name = lex_.ident;
    const std::size_t offset = lex_.tok_offset;
    lex_.advance();

    if (auto fn = function_named(name)) {
      if (lex_.type != Lexer::Tok::LParen) {
        throw SyntaxError(lex_.tok_offset,
                          "'(' after function name '" + std::string(name) + "'");
      }
      lex_.advance();
      Expr arg = parse_expr();
      expect_rparen();
      return Expr::call(*fn, std::move(arg));
    }

    if (name == "t") return Expr::variable(VarId::time());
    if (name == "z") return Expr::variable(VarId::z());
    if (name == "x") return Expr::variable(VarId::x_deriv(0));
    if (name.size() == 3 && name[0] == 'D' && name[2] == 'x' &&
        name[1] >= '1' && name[1] <= '9') {
      return Expr::variable(VarId::x_deriv(name[1] - '0'));
    }
    throw UnknownIdentifier(std::string(name), offset);
  }

  static std::optional<Expr::Fn> function_named(std::string_view name) {
    if (name == "exp") return Expr::Fn::Exp;
    if (name == "log") return Expr::Fn::Log;
    if (name == "sin") return Expr::Fn::Sin;
    if (name == "cos") return Expr::Fn::Cos;
    if (name == "sqrt") return Expr::Fn::Sqrt;
    return std::nullopt;
  }

  void expect_rparen() {
    if (lex_.type != Lexer::Tok::RParen) {
      throw SyntaxError(lex_.tok_offset, "')'");
    }
    lex_.advance();
  }
};

}  // namespace detail

inline Expr parse(std::string_view text) {
  return detail::ExprParser(text).run();
}

namespace detail {

// Shortest decimal that reads back to the same double.
inline std::string format_shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("number formatting failed");
  return std::string(buf, ptr);
}

inline const char* function_name(Expr::Fn f) {
  switch (f) {
    case Expr::Fn::Exp: return "exp";
    case Expr::Fn::Log: return "log";
    case Expr::Fn::Sin: return "sin";
    case Expr::Fn::Cos: return "cos";
    case Expr::Fn::Sqrt: return "sqrt";
  }
  return "?";
}

// Binding strength used for parenthesization. Negative constants print
// with a leading '-' and therefore bind like a negation.
inline int print_precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
      return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div:
      return 2;
    case Expr::Kind::Neg:
      return 3;
    case Expr::Kind::Pow:
      return 4;
    case Expr::Kind::Constant:
      return e.constant_value() < 0.0 ? 3 : 5;
    default:
      return 5;
  }
}

inline void print_rec(const Expr& e, std::string& out);

inline void print_child(const Expr& child, bool needs_parens, std::string& out) {
  if (needs_parens) {
    out += '(';
    print_rec(child, out);
    out += ')';
  } else {
    print_rec(child, out);
  }
}

inline void print_rec(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      out += format_shortest(e.constant_value());
      return;
    case Expr::Kind::Variable:
      out += e.var().name();
      return;
    case Expr::Kind::Add:
    case Expr::Kind::Sub: {
      print_child(e.left(), print_precedence(e.left()) < 1, out);
      out += e.kind() == Expr::Kind::Add ? " + " : " - ";
      print_child(e.right(), print_precedence(e.right()) <= 1, out);
      return;
    }
    case Expr::Kind::Mul:
    case Expr::Kind::Div: {
      print_child(e.left(), print_precedence(e.left()) < 2, out);
      out += e.kind() == Expr::Kind::Mul ? " * " : " / ";
      print_child(e.right(), print_precedence(e.right()) <= 2, out);
      return;
    }
    case Expr::Kind::Neg:
      out += '-';
      print_child(e.left(), print_precedence(e.left()) < 3, out);
      return;
    case Expr::Kind::Pow:
      print_child(e.left(), print_precedence(e.left()) <= 4, out);
      out += '^';
      print_child(e.right(), print_precedence(e.right()) < 3, out);
      return;
    case Expr::Kind::Call:
      out += function_name(e.fn());
      out += '(';
      print_rec(e.left(), out);
      out += ')';
      return;
  }
  throw Error("corrupt expression node");
}

}  // namespace detail

// Minimal parenthesization: parse(print(e)) rebuilds e node for node,
// except that negative constants read back as negated positives.
inline std::string print(const Expr& e) {
  std::string out;
  detail::print_rec(e, out);
  return out;
}

}  // namespace herglotz
