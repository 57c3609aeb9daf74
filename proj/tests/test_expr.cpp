#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "test_support.hpp"

using namespace herglotz;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Expr var(VarId v) { return Expr::variable(v); }
Expr num(double v) { return Expr::constant(v); }

// Random tree with nonnegative constants only; the grammar has no signed
// literals, so these are the trees printing can reproduce node for node.
Expr random_tree(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 8);
  std::uniform_int_distribution<int> cpick(0, 5);
  std::uniform_int_distribution<int> vpick(0, 4);
  std::uniform_int_distribution<int> fpick(0, 4);
  static const double constants[] = {0.0, 1.0, 2.0, 0.5, 3.25, 7.0};
  switch (pick(rng)) {
    case 0:
      return num(constants[cpick(rng)]);
    case 1:
      switch (vpick(rng)) {
        case 0: return var(VarId::time());
        case 1: return var(VarId::z());
        case 2: return var(VarId::x_deriv(0));
        case 3: return var(VarId::x_deriv(1));
        default: return var(VarId::x_deriv(2));
      }
    case 2:
      return Expr::add(random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 3:
      return Expr::sub(random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 4:
      return Expr::mul(random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 5:
      return Expr::div(random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 6:
      return Expr::neg(random_tree(rng, depth - 1));
    case 7:
      return Expr::pow(random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    default:
      return Expr::call(static_cast<Expr::Fn>(fpick(rng)),
                        random_tree(rng, depth - 1));
  }
}

}  // namespace

TEST_CASE("parse builds the documented trees", "[expr]") {
  const Expr e1 = parse("D2x^2 + z^2");
  const Expr want1 = Expr::add(Expr::pow(var(VarId::x_deriv(2)), num(2.0)),
                               Expr::pow(var(VarId::z()), num(2.0)));
  CHECK(structural_equal(e1, want1));

  const Expr e2 = parse("x");
  REQUIRE(e2.kind() == Expr::Kind::Variable);
  CHECK(e2.var() == VarId::x_deriv(0));

  const Expr e3 = parse("D2x^2 + z");
  const Expr want3 =
      Expr::add(Expr::pow(var(VarId::x_deriv(2)), num(2.0)), var(VarId::z()));
  CHECK(structural_equal(e3, want3));
}

TEST_CASE("parse precedence and associativity", "[expr]") {
  // ^ before unary minus, right-associative.
  CHECK(eval(parse("2^3^2"), Jet(0, {}, 0)) == 512.0);
  CHECK(eval(parse("-2^2"), Jet(0, {}, 0)) == -4.0);
  CHECK(eval(parse("2^-1"), Jet(0, {}, 0)) == 0.5);

  // left-associative + - * /.
  CHECK(eval(parse("2 - 3 - 4"), Jet(0, {}, 0)) == -5.0);
  CHECK(eval(parse("16 / 4 / 2"), Jet(0, {}, 0)) == 2.0);
  CHECK(eval(parse("2 + 3 * 4"), Jet(0, {}, 0)) == 14.0);
  CHECK(eval(parse("(2 + 3) * 4"), Jet(0, {}, 0)) == 20.0);

  const Expr e = parse("-x^2");
  REQUIRE(e.kind() == Expr::Kind::Neg);
  CHECK(e.left().kind() == Expr::Kind::Pow);

  // number forms
  CHECK(eval(parse("1e3"), Jet(0, {}, 0)) == 1000.0);
  CHECK(eval(parse("2.5E-2"), Jet(0, {}, 0)) == 0.025);
  CHECK(eval(parse(".5"), Jet(0, {}, 0)) == 0.5);
}

TEST_CASE("parse rejects malformed input with offsets", "[expr]") {
  try {
    parse("D2x +");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.offset == 5);
  }

  try {
    parse("foo + 1");
    FAIL("expected UnknownIdentifier");
  } catch (const UnknownIdentifier& e) {
    CHECK(e.name == "foo");
    CHECK(e.offset == 0);
  }

  CHECK_THROWS_AS(parse("sin 3"), SyntaxError);
  CHECK_THROWS_AS(parse("(x + z"), SyntaxError);
  CHECK_THROWS_AS(parse("x z"), SyntaxError);
  CHECK_THROWS_AS(parse(""), SyntaxError);
  CHECK_THROWS_AS(parse("1 + $"), SyntaxError);
  CHECK_THROWS_AS(parse("D0x"), UnknownIdentifier);
  CHECK_THROWS_AS(parse("D10x"), UnknownIdentifier);
  CHECK_THROWS_AS(parse("pi"), UnknownIdentifier);
}

TEST_CASE("print uses canonical spacing and minimal parentheses", "[expr]") {
  CHECK(print(parse("D2x^2 + z^2")) == "D2x^2 + z^2");
  CHECK(print(Expr::neg(var(VarId::time()))) == "-t");
  CHECK(print(Expr::mul(num(2.0), var(VarId::z()))) == "2 * z");

  CHECK(print(parse("(x + z) * t")) == "(x + z) * t");
  CHECK(print(parse("x - (z - t)")) == "x - (z - t)");
  CHECK(print(parse("x - z - t")) == "x - z - t");
  CHECK(print(parse("x / (z * t)")) == "x / (z * t)");
  CHECK(print(parse("x^(z + 1)")) == "x^(z + 1)");
  CHECK(print(parse("(x^2)^3")) == "(x^2)^3");
  CHECK(print(parse("x^2^3")) == "x^2^3");
  CHECK(print(parse("-(x + z)")) == "-(x + z)");
  CHECK(print(parse("exp(1)")) == "exp(1)");
  CHECK(print(parse("sqrt(1 + D1x^2)")) == "sqrt(1 + D1x^2)");

  // negative constants print like negations
  CHECK(print(Expr::mul(num(-2.0), var(VarId::z()))) == "-2 * z");
  CHECK(print(Expr::pow(var(VarId::z()), num(-2.0))) == "z^-2");
}

TEST_CASE("print then parse is structure-exact", "[expr]") {
  std::mt19937 rng(20240817);
  for (int i = 0; i < 500; ++i) {
    const Expr tree = random_tree(rng, 5);
    const Expr back = parse(print(tree));
    REQUIRE(structural_equal(tree, back));
  }
}

TEST_CASE("eval computes jet arithmetic", "[expr]") {
  const Expr e = parse("D2x^2 + z^2");
  CHECK_THAT(eval(e, Jet(0.0, {0.0, 1.0, 0.0}, 0.5)), WithinAbs(0.25, 1e-15));
  CHECK_THAT(eval(e, Jet(0.5, {0.5, 1.0, 0.0}, 1.0 / 1.5)),
             WithinRel(4.0 / 9.0, 1e-15));

  CHECK(eval(parse("z"), Jet(3.0, {}, 0.75)) == 0.75);
  CHECK(eval(parse("t"), Jet(3.0, {}, 0.75)) == 3.0);
  CHECK(eval(parse("sin(t)^2 + cos(t)^2"), Jet(1.3, {}, 0.0)) ==
        Catch::Approx(1.0));
}

TEST_CASE("eval surfaces domain violations", "[expr]") {
  const Jet at(1.0, {2.0, -1.0}, 0.0);
  CHECK_THROWS_AS(eval(parse("1 / (t - 1)"), at), DomainError);
  CHECK_THROWS_AS(eval(parse("log(D1x)"), at), DomainError);
  CHECK_THROWS_AS(eval(parse("sqrt(D1x)"), at), DomainError);
  CHECK_THROWS_AS(eval(parse("0^-1"), at), DomainError);
  CHECK_THROWS_AS(eval(parse("D1x^0.5"), at), DomainError);
  CHECK_THROWS_AS(eval(parse("D3x"), at), MissingDerivative);
  CHECK_THROWS_AS(Expr().kind(), Error);
}

TEST_CASE("jet accessors", "[expr]") {
  const Jet j(0.25, {1.0, 2.0, 3.0}, -4.0);
  CHECK(j.max_order() == 2);
  CHECK(j.x_deriv(0) == 1.0);
  CHECK(j.x_deriv(2) == 3.0);
  CHECK(j.value(VarId::time()) == 0.25);
  CHECK(j.value(VarId::z()) == -4.0);
  CHECK(j.value(VarId::x_deriv(1)) == 2.0);
  CHECK_THROWS_AS(j.x_deriv(3), MissingDerivative);
  CHECK_THROWS_AS(j.x_deriv(-1), MissingDerivative);
  CHECK(Jet(0.0, {}, 0.0).max_order() == -1);

  CHECK(VarId::x_deriv(0).name() == "x");
  CHECK(VarId::x_deriv(3).name() == "D3x");
  CHECK(VarId::time().name() == "t");
  CHECK(VarId::z().name() == "z");
  CHECK_THROWS_AS(VarId::x_deriv(-1), IndexError);
}

TEST_CASE("simplify applies the identity rules", "[expr]") {
  CHECK(simplify(parse("0 * D3x")).is_constant(0.0));
  CHECK(structural_equal(simplify(parse("1 * (z + 0)")), var(VarId::z())));
  CHECK(simplify(parse("2 + 3")).is_constant(5.0));
  CHECK(structural_equal(simplify(parse("x - 0")), var(VarId::x_deriv(0))));
  CHECK(structural_equal(simplify(parse("x / 1")), var(VarId::x_deriv(0))));
  CHECK(structural_equal(simplify(parse("x^1")), var(VarId::x_deriv(0))));
  CHECK(simplify(parse("x^0")).is_constant(1.0));
  CHECK(structural_equal(simplify(Expr::neg(Expr::neg(var(VarId::z())))),
                         var(VarId::z())));
  CHECK(simplify(parse("exp(0)")).is_constant(1.0));
  CHECK(simplify(Expr::neg(num(2.0))).is_constant(-2.0));

  // undefined constant folds stay symbolic
  CHECK(simplify(parse("1 / 0")).kind() == Expr::Kind::Div);
  CHECK(simplify(parse("log(0)")).kind() == Expr::Kind::Call);
  CHECK(simplify(parse("(0 - 2)^0.5")).kind() == Expr::Kind::Pow);
  CHECK(simplify(parse("0^-1")).kind() == Expr::Kind::Pow);
}

TEST_CASE("simplify preserves evaluation", "[expr]") {
  std::mt19937 rng(7151);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    const Expr tree = random_tree(rng, 4);
    const Expr simple = simplify(tree);
    for (int j = 0; j < 3; ++j) {
      const Jet at = testutil::random_jet(rng, 2, 0.1, 2.0);
      double v0, v1;
      try {
        v0 = eval(tree, at);
        v1 = eval(simple, at);
      } catch (const DomainError&) {
        continue;
      }
      if (!std::isfinite(v0)) continue;
      REQUIRE_THAT(v1, WithinRel(v0, 1e-12) || WithinAbs(v0, 1e-12));
      ++checked;
    }
  }
  CHECK(checked > 300);
}

TEST_CASE("max_jet_order and depends_on", "[expr]") {
  CHECK(max_jet_order(parse("D2x^2 + z^2")) == 2);
  CHECK(max_jet_order(parse("z")) == 0);
  CHECK(max_jet_order(parse("D4x - 4 * z * D3x")) == 4);
  CHECK(max_jet_order(parse("t + 1")) == 0);

  CHECK(depends_on(parse("D2x^2 + z"), VarId::z()));
  CHECK_FALSE(depends_on(parse("D2x^2 + t"), VarId::z()));
  CHECK(depends_on(parse("sin(x)"), VarId::x_deriv(0)));
  CHECK_FALSE(depends_on(parse("sin(x)"), VarId::x_deriv(1)));
}
