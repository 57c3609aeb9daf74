#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "herglotz/errors.hpp"

namespace herglotz {

// Identifies one of the jet variables: the time t, the Herglotz state z,
// or a trajectory derivative Dkx (D0x is x itself).
class VarId {
 public:
  enum class Tag : std::uint8_t { Time, Z, XDeriv };

  static constexpr VarId time() { return VarId(Tag::Time, 0); }
  static constexpr VarId z() { return VarId(Tag::Z, 0); }
  static constexpr VarId x_deriv(int order) {
    return order < 0 ? throw IndexError("negative derivative order")
                     : VarId(Tag::XDeriv, order);
  }

  constexpr Tag tag() const { return tag_; }

  // Only meaningful for XDeriv; 0 for t and z.
  constexpr int order() const { return order_; }

  std::string name() const {
    switch (tag_) {
      case Tag::Time:
        return "t";
      case Tag::Z:
        return "z";
      case Tag::XDeriv:
        return order_ == 0 ? "x" : "D" + std::to_string(order_) + "x";
    }
    return "?";
  }

  friend constexpr bool operator==(VarId a, VarId b) {
    return a.tag_ == b.tag_ && a.order_ == b.order_;
  }
  friend constexpr bool operator!=(VarId a, VarId b) { return !(a == b); }

 private:
  constexpr VarId(Tag tag, int order) : tag_(tag), order_(order) {}

  Tag tag_;
  int order_;
};

// A point of the extended jet space: time, the derivatives x, x', ...,
// x^(m), and the state z. Evaluation happens against one of these.
class Jet {
 public:
  Jet(double t, std::vector<double> x_derivs, double z)
      : t_(t), x_derivs_(std::move(x_derivs)), z_(z) {}

  double t() const { return t_; }
  double z() const { return z_; }

  // Highest derivative order carried; -1 when no x data is present.
  int max_order() const { return static_cast<int>(x_derivs_.size()) - 1; }

  double x_deriv(int k) const {
    if (k < 0 || k > max_order()) {
      throw MissingDerivative("jet carries x-derivatives up to order " +
                              std::to_string(max_order()) + ", order " +
                              std::to_string(k) + " was requested");
    }
    return x_derivs_[static_cast<std::size_t>(k)];
  }

  double value(VarId v) const {
    switch (v.tag()) {
      case VarId::Tag::Time:
        return t_;
      case VarId::Tag::Z:
        return z_;
      case VarId::Tag::XDeriv:
        return x_deriv(v.order());
    }
    throw Error("corrupt variable id");
  }

  const std::vector<double>& x_derivs() const { return x_derivs_; }

 private:
  double t_;
  std::vector<double> x_derivs_;
  double z_;
};

// Immutable expression tree over {t, z, Dkx}, real constants, the four
// arithmetic operations, unary minus, powers, and the primitives exp,
// log, sin, cos, sqrt. Copies share structure.
class Expr {
 public:
  enum class Kind : std::uint8_t {
    Constant,
    Variable,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Pow,
    Call
  };

  enum class Fn : std::uint8_t { Exp, Log, Sin, Cos, Sqrt };

  // An empty expression; using it in any operation is a logic error.
  Expr() = default;

  static Expr constant(double value);
  static Expr variable(VarId v);

  // k must be one of the five binary kinds.
  static Expr binary(Kind k, Expr l, Expr r);

  static Expr add(Expr l, Expr r) { return binary(Kind::Add, std::move(l), std::move(r)); }
  static Expr sub(Expr l, Expr r) { return binary(Kind::Sub, std::move(l), std::move(r)); }
  static Expr mul(Expr l, Expr r) { return binary(Kind::Mul, std::move(l), std::move(r)); }
  static Expr div(Expr l, Expr r) { return binary(Kind::Div, std::move(l), std::move(r)); }
  static Expr pow(Expr base, Expr exponent) {
    return binary(Kind::Pow, std::move(base), std::move(exponent));
  }

  static Expr neg(Expr operand);
  static Expr call(Fn f, Expr argument);

  bool empty() const { return node_ == nullptr; }

  Kind kind() const;

  double constant_value() const;
  VarId var() const;
  Fn fn() const;

  // First child: left operand, Neg/Call argument, Pow base.
  const Expr& left() const;

  // Second child: right operand, Pow exponent.
  const Expr& right() const;

  bool is_constant() const;
  bool is_constant(double value) const;

 private:
  struct Node;

  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  const Node& require() const;

  std::shared_ptr<const Node> node_;
};

struct Expr::Node {
  Kind kind;
  double value;
  VarId var;
  Fn fn;
  Expr child0;
  Expr child1;
};

inline const Expr::Node& Expr::require() const {
  if (!node_) throw Error("operation on an empty expression");
  return *node_;
}

inline Expr::Kind Expr::kind() const { return require().kind; }
inline double Expr::constant_value() const { return require().value; }
inline VarId Expr::var() const { return require().var; }
inline Expr::Fn Expr::fn() const { return require().fn; }
inline const Expr& Expr::left() const { return require().child0; }
inline const Expr& Expr::right() const { return require().child1; }

inline Expr Expr::constant(double value) {
  return Expr(std::make_shared<const Node>(
      Node{Kind::Constant, value, VarId::time(), Fn::Exp, {}, {}}));
}

inline Expr Expr::variable(VarId v) {
  return Expr(std::make_shared<const Node>(
      Node{Kind::Variable, 0.0, v, Fn::Exp, {}, {}}));
}

inline Expr Expr::binary(Kind k, Expr l, Expr r) {
  if (k != Kind::Add && k != Kind::Sub && k != Kind::Mul && k != Kind::Div &&
      k != Kind::Pow) {
    throw Error("binary() needs a binary node kind");
  }
  return Expr(std::make_shared<const Node>(
      Node{k, 0.0, VarId::time(), Fn::Exp, std::move(l), std::move(r)}));
}

inline Expr Expr::neg(Expr operand) {
  return Expr(std::make_shared<const Node>(
      Node{Kind::Neg, 0.0, VarId::time(), Fn::Exp, std::move(operand), {}}));
}

inline Expr Expr::call(Fn f, Expr argument) {
  return Expr(std::make_shared<const Node>(
      Node{Kind::Call, 0.0, VarId::time(), f, std::move(argument), {}}));
}

inline bool Expr::is_constant() const {
  return node_ != nullptr && node_->kind == Kind::Constant;
}

inline bool Expr::is_constant(double value) const {
  return is_constant() && node_->value == value;
}

inline Expr operator+(Expr l, Expr r) { return Expr::add(std::move(l), std::move(r)); }
inline Expr operator-(Expr l, Expr r) { return Expr::sub(std::move(l), std::move(r)); }
inline Expr operator*(Expr l, Expr r) { return Expr::mul(std::move(l), std::move(r)); }
inline Expr operator/(Expr l, Expr r) { return Expr::div(std::move(l), std::move(r)); }
inline Expr operator-(Expr e) { return Expr::neg(std::move(e)); }

inline bool structural_equal(const Expr& a, const Expr& b) {
  if (a.empty() || b.empty()) return a.empty() && b.empty();
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::Constant:
      return a.constant_value() == b.constant_value();
    case Expr::Kind::Variable:
      return a.var() == b.var();
    case Expr::Kind::Neg:
      return structural_equal(a.left(), b.left());
    case Expr::Kind::Call:
      return a.fn() == b.fn() && structural_equal(a.left(), b.left());
    default:
      return structural_equal(a.left(), b.left()) &&
             structural_equal(a.right(), b.right());
  }
}

// Largest k such that Dkx appears; 0 when the expression has no x
// dependence at all.
inline int max_jet_order(const Expr& e) {
  if (e.empty()) return 0;
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return 0;
    case Expr::Kind::Variable:
      return e.var().tag() == VarId::Tag::XDeriv ? e.var().order() : 0;
    case Expr::Kind::Neg:
    case Expr::Kind::Call:
      return max_jet_order(e.left());
    default:
      return std::max(max_jet_order(e.left()), max_jet_order(e.right()));
  }
}

inline bool depends_on(const Expr& e, VarId v) {
  if (e.empty()) return false;
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return false;
    case Expr::Kind::Variable:
      return e.var() == v;
    case Expr::Kind::Neg:
    case Expr::Kind::Call:
      return depends_on(e.left(), v);
    default:
      return depends_on(e.left(), v) || depends_on(e.right(), v);
  }
}

namespace detail {

inline bool is_integer_valued(double v) {
  return std::isfinite(v) && v == std::floor(v);
}

inline double checked_pow(double base, double exponent) {
  if (base == 0.0 && exponent < 0.0) {
    throw DomainError("zero raised to a negative power");
  }
  if (base < 0.0 && !is_integer_valued(exponent)) {
    throw DomainError("fractional power of a negative base");
  }
  return std::pow(base, exponent);
}

inline double checked_call(Expr::Fn f, double a) {
  switch (f) {
    case Expr::Fn::Exp:
      return std::exp(a);
    case Expr::Fn::Log:
      if (a <= 0.0) throw DomainError("log of a nonpositive value");
      return std::log(a);
    case Expr::Fn::Sin:
      return std::sin(a);
    case Expr::Fn::Cos:
      return std::cos(a);
    case Expr::Fn::Sqrt:
      if (a < 0.0) throw DomainError("square root of a negative value");
      return std::sqrt(a);
  }
  throw Error("corrupt function id");
}

}  // namespace detail

inline double eval(const Expr& e, const Jet& at) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return e.constant_value();
    case Expr::Kind::Variable:
      return at.value(e.var());
    case Expr::Kind::Add:
      return eval(e.left(), at) + eval(e.right(), at);
    case Expr::Kind::Sub:
      return eval(e.left(), at) - eval(e.right(), at);
    case Expr::Kind::Mul:
      return eval(e.left(), at) * eval(e.right(), at);
    case Expr::Kind::Div: {
      const double denom = eval(e.right(), at);
      if (denom == 0.0) throw DomainError("division by zero");
      return eval(e.left(), at) / denom;
    }
    case Expr::Kind::Neg:
      return -eval(e.left(), at);
    case Expr::Kind::Pow:
      return detail::checked_pow(eval(e.left(), at), eval(e.right(), at));
    case Expr::Kind::Call:
      return detail::checked_call(e.fn(), eval(e.left(), at));
  }
  throw Error("corrupt expression node");
}

namespace detail {

// Folds a node whose children are constants, but only when the result is
// finite and the operation is defined there; otherwise returns empty and
// the node is kept symbolic.
inline Expr try_fold(Expr::Kind k, const Expr& l, const Expr& r) {
  const double a = l.constant_value();
  switch (k) {
    case Expr::Kind::Neg:
      return Expr::constant(-a);
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
    case Expr::Kind::Mul:
    case Expr::Kind::Div:
    case Expr::Kind::Pow: {
      const double b = r.constant_value();
      double v = 0.0;
      if (k == Expr::Kind::Add) v = a + b;
      if (k == Expr::Kind::Sub) v = a - b;
      if (k == Expr::Kind::Mul) v = a * b;
      if (k == Expr::Kind::Div) {
        if (b == 0.0) return Expr();
        v = a / b;
      }
      if (k == Expr::Kind::Pow) {
        if (a == 0.0 && b < 0.0) return Expr();
        if (a < 0.0 && !is_integer_valued(b)) return Expr();
        v = std::pow(a, b);
      }
      return std::isfinite(v) ? Expr::constant(v) : Expr();
    }
    default:
      return Expr();
  }
}

inline Expr try_fold_call(Expr::Fn f, const Expr& arg) {
  const double a = arg.constant_value();
  if (f == Expr::Fn::Log && a <= 0.0) return Expr();
  if (f == Expr::Fn::Sqrt && a < 0.0) return Expr();
  const double v = checked_call(f, a);
  return std::isfinite(v) ? Expr::constant(v) : Expr();
}

}  // namespace detail

// Light normalization: constant folding plus the identity rules for 0 and
// 1 and double negation. Applied bottom-up; value-preserving wherever the
// original expression evaluates.
inline Expr simplify(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
    case Expr::Kind::Variable:
      return e;
    case Expr::Kind::Neg: {
      Expr c = simplify(e.left());
      if (c.is_constant()) return Expr::constant(-c.constant_value());
      if (c.kind() == Expr::Kind::Neg) return c.left();
      return Expr::neg(std::move(c));
    }
    case Expr::Kind::Call: {
      Expr c = simplify(e.left());
      if (c.is_constant()) {
        Expr folded = detail::try_fold_call(e.fn(), c);
        if (!folded.empty()) return folded;
      }
      return Expr::call(e.fn(), std::move(c));
    }
    default:
      break;
  }

  Expr l = simplify(e.left());
  Expr r = simplify(e.right());
  const Expr::Kind k = e.kind();

  if (l.is_constant() && r.is_constant()) {
    Expr folded = detail::try_fold(k, l, r);
    if (!folded.empty()) return folded;
  }

  switch (k) {
    case Expr::Kind::Add:
      if (l.is_constant(0.0)) return r;
      if (r.is_constant(0.0)) return l;
      break;
    case Expr::Kind::Sub:
      if (r.is_constant(0.0)) return l;
      break;
    case Expr::Kind::Mul:
      if (l.is_constant(0.0) || r.is_constant(0.0)) return Expr::constant(0.0);
      if (l.is_constant(1.0)) return r;
      if (r.is_constant(1.0)) return l;
      break;
    case Expr::Kind::Div:
      if (r.is_constant(1.0)) return l;
      break;
    case Expr::Kind::Pow:
      if (r.is_constant(1.0)) return l;
      if (r.is_constant(0.0)) return Expr::constant(1.0);
      break;
    default:
      break;
  }
  return Expr::binary(k, std::move(l), std::move(r));
}

namespace detail {

// Unsimplified symbolic partial; the public entry point simplifies once
// at the top.
inline Expr partial_raw(const Expr& e, VarId v) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Constant:
      return Expr::constant(0.0);
    case K::Variable:
      return Expr::constant(e.var() == v ? 1.0 : 0.0);
    case K::Add:
      return Expr::add(partial_raw(e.left(), v), partial_raw(e.right(), v));
    case K::Sub:
      return Expr::sub(partial_raw(e.left(), v), partial_raw(e.right(), v));
    case K::Neg:
      return Expr::neg(partial_raw(e.left(), v));
    case K::Mul:
      return Expr::add(Expr::mul(partial_raw(e.left(), v), e.right()),
                       Expr::mul(e.left(), partial_raw(e.right(), v)));
    case K::Div:
      return Expr::div(
          Expr::sub(Expr::mul(partial_raw(e.left(), v), e.right()),
                    Expr::mul(e.left(), partial_raw(e.right(), v))),
          Expr::pow(e.right(), Expr::constant(2.0)));
    case K::Pow: {
      const Expr& base = e.left();
      const Expr& expo = e.right();
      if (expo.is_constant()) {
        const double c = expo.constant_value();
        return Expr::mul(
            Expr::mul(Expr::constant(c),
                      Expr::pow(base, Expr::constant(c - 1.0))),
            partial_raw(base, v));
      }
      if (!depends_on(expo, v)) {
        return Expr::mul(
            Expr::mul(expo, Expr::pow(base, Expr::sub(expo, Expr::constant(1.0)))),
            partial_raw(base, v));
      }
      // General case via b^w = exp(w log b); requires b > 0 to evaluate,
      // which matches the domain of the expression itself.
      return Expr::mul(
          e, Expr::add(Expr::mul(partial_raw(expo, v),
                                 Expr::call(Expr::Fn::Log, base)),
                       Expr::div(Expr::mul(expo, partial_raw(base, v)), base)));
    }
    case K::Call: {
      Expr inner = partial_raw(e.left(), v);
      switch (e.fn()) {
        case Expr::Fn::Exp:
          return Expr::mul(e, std::move(inner));
        case Expr::Fn::Log:
          return Expr::div(std::move(inner), e.left());
        case Expr::Fn::Sin:
          return Expr::mul(Expr::call(Expr::Fn::Cos, e.left()), std::move(inner));
        case Expr::Fn::Cos:
          return Expr::mul(Expr::neg(Expr::call(Expr::Fn::Sin, e.left())),
                           std::move(inner));
        case Expr::Fn::Sqrt:
          return Expr::div(std::move(inner),
                           Expr::mul(Expr::constant(2.0), e));
      }
      throw Error("corrupt function id");
    }
  }
  throw Error("corrupt expression node");
}

}  // namespace detail

inline Expr partial(const Expr& e, VarId v) {
  return simplify(detail::partial_raw(e, v));
}

// d/dt along solutions of the state equation zdot = L: the z partial is
// contracted with L, each Dkx partial with D(k+1)x. Raises the jet order
// by at most one.
inline Expr total_derivative(const Expr& e, const Expr& lagrangian, int n) {
  if (max_jet_order(lagrangian) > n) {
    throw OrderMismatch("lagrangian references derivative order " +
                        std::to_string(max_jet_order(lagrangian)) +
                        " above n = " + std::to_string(n));
  }
  Expr acc = detail::partial_raw(e, VarId::time());
  const int m = max_jet_order(e);
  for (int k = 0; k <= m; ++k) {
    acc = Expr::add(
        std::move(acc),
        Expr::mul(detail::partial_raw(e, VarId::x_deriv(k)),
                  Expr::variable(VarId::x_deriv(k + 1))));
  }
  if (depends_on(e, VarId::z())) {
    acc = Expr::add(std::move(acc),
                    Expr::mul(detail::partial_raw(e, VarId::z()), lagrangian));
  }
  return simplify(acc);
}

}  // namespace herglotz
