#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "test_support.hpp"

using namespace herglotz;
using Catch::Matchers::WithinAbs;

TEST_CASE("mu is minus the z slope", "[optimality]") {
  const Expr mu1 = mu_expression(parse("D2x^2 + z^2")).expr;
  CHECK(structural_equal(
      mu1, Expr::neg(Expr::mul(Expr::constant(2.0), Expr::variable(VarId::z())))));

  CHECK(mu_expression(parse("D2x^2 + z")).expr.is_constant(-1.0));
  CHECK(mu_expression(parse("D1x^2")).expr.is_constant(0.0));
}

TEST_CASE("d_mu shifts the total derivative", "[optimality]") {
  std::mt19937 rng(90210);
  const Expr lag = parse("D2x^2 + z^2");

  const Expr f = parse("2 * D2x");
  const Expr got = d_mu(f, lag, 2);
  const Expr want = parse("2 * D3x - 4 * z * D2x");
  CHECK(testutil::max_equiv_gap(got, want, rng, 3, 200) < 1e-10);

  const Expr lag3 = parse("D2x^2 + z");
  const Expr got3 = d_mu(f, lag3, 2);
  const Expr want3 = parse("2 * D3x - 2 * D2x");
  CHECK(testutil::max_equiv_gap(got3, want3, rng, 3, 200) < 1e-10);

  CHECK(d_mu(Expr::constant(0.0), lag, 2).is_constant(0.0));
}

TEST_CASE("euler-lagrange expression for the benchmark problems", "[optimality]") {
  std::mt19937 rng(11711);

  const Expr el1 = el_expression(parse("D2x^2 + z^2"), 2);
  const Expr ref1 = parse("2 * D4x - 8 * z * D3x + (4 * z^2 - 4 * D2x^2) * D2x");
  CHECK(testutil::max_equiv_gap(el1, ref1, rng, 4, 100) < 1e-10);
  CHECK_THAT(eval(el1, Jet(0.0, {0.0, 1.0, 1.0, 1.0, 1.0}, 0.5)),
             WithinAbs(-5.0, 1e-12));

  const Expr el3 = el_expression(parse("D2x^2 + z"), 2);
  const Expr ref3 = parse("2 * D4x - 4 * D3x + 2 * D2x");
  CHECK(testutil::max_equiv_gap(el3, ref3, rng, 4, 100) < 1e-10);

  CHECK(el_expression(Expr::variable(VarId::z()), 1).is_constant(0.0));
}

TEST_CASE("euler-lagrange validates arguments", "[optimality]") {
  CHECK_THROWS_AS(el_expression(parse("D3x^2"), 2), OrderMismatch);
  CHECK_THROWS_AS(el_expression(parse("D1x^2"), 0), IndexError);
}

TEST_CASE("natural boundary conditions", "[optimality]") {
  std::mt19937 rng(5150);

  // highest free slot: plain momentum, no mu correction left
  const Expr nbc3 = nbc_expression(parse("D2x^2 + z"), 2, 1, Endpoint::B);
  CHECK(structural_equal(
      nbc3, Expr::mul(Expr::constant(2.0), Expr::variable(VarId::x_deriv(2)))));

  const Expr lag1 = parse("D2x^2 + z^2");
  const Expr nbc0 = nbc_expression(lag1, 2, 0, Endpoint::A);
  const Expr want0 = parse("-2 * D3x + 4 * z * D2x");
  CHECK(testutil::max_equiv_gap(nbc0, want0, rng, 3, 200) < 1e-10);

  const Expr nbc1 = nbc_expression(lag1, 2, 1, Endpoint::B);
  CHECK(testutil::max_equiv_gap(nbc1, parse("2 * D2x"), rng, 2, 200) < 1e-10);

  // the expression does not depend on which endpoint it is evaluated at
  CHECK(structural_equal(nbc_expression(lag1, 2, 0, Endpoint::A),
                         nbc_expression(lag1, 2, 0, Endpoint::B)));

  const Expr classical = parse("D2x^2 + D1x^2 + x^2");
  const Expr cn0 = nbc_expression(classical, 2, 0, Endpoint::B);
  CHECK(testutil::max_equiv_gap(cn0, parse("2 * D1x - 2 * D3x"), rng, 3, 200) <
        1e-10);

  CHECK_THROWS_AS(nbc_expression(lag1, 2, 2, Endpoint::A), IndexError);
  CHECK_THROWS_AS(nbc_expression(lag1, 2, -1, Endpoint::A), IndexError);
}

TEST_CASE("derived equation matches independent assemblies", "[optimality]") {
  std::mt19937 rng(31337);

  SECTION("first order") {
    const Expr cases[] = {parse("z + x * D1x"), parse("D1x^2 + z^2"),
                          parse("D1x^2 - x^2 + 0.5 * z")};
    for (const Expr& lag : cases) {
      INFO(print(lag));
      CHECK(testutil::max_equiv_gap(el_expression(lag, 1),
                                    testutil::el_reference_n1(lag), rng, 2,
                                    100) < 1e-10);
    }
    for (int i = 0; i < 5; ++i) {
      const Expr lag = testutil::random_lagrangian(rng, 1);
      INFO(print(lag));
      CHECK(testutil::max_equiv_gap(el_expression(lag, 1),
                                    testutil::el_reference_n1(lag), rng, 2,
                                    100) < 1e-10);
    }
  }

  SECTION("second order") {
    const Expr cases[] = {parse("D2x^2 + z^2"), parse("D2x^2 + z")};
    for (const Expr& lag : cases) {
      INFO(print(lag));
      CHECK(testutil::max_equiv_gap(el_expression(lag, 2),
                                    testutil::el_reference_n2(lag), rng, 4,
                                    100) < 1e-10);
    }
    for (int i = 0; i < 5; ++i) {
      const Expr lag = testutil::random_lagrangian(rng, 2);
      INFO(print(lag));
      CHECK(testutil::max_equiv_gap(el_expression(lag, 2),
                                    testutil::el_reference_n2(lag), rng, 4,
                                    100) < 1e-10);
    }
  }

  SECTION("z-free lagrangians collapse to the classical equation") {
    const Expr cases[] = {parse("D1x^2"), parse("D2x^2 + D1x^2 + x^2"),
                          parse("D2x^2 - sin(x)")};
    const int orders[] = {1, 2, 2};
    for (int i = 0; i < 3; ++i) {
      INFO(print(cases[i]));
      CHECK(testutil::max_equiv_gap(
                el_expression(cases[i], orders[i]),
                testutil::el_classical(cases[i], orders[i]), rng,
                2 * orders[i], 100) < 1e-10);
    }
  }
}

TEST_CASE("derive_system holds one condition per slot and endpoint", "[optimality]") {
  const auto sys = derive_system(examples::example4());
  CHECK(sys.n == 2);
  CHECK_FALSE(sys.el.empty());
  REQUIRE(sys.nbc_a.size() == 2);
  REQUIRE(sys.nbc_b.size() == 2);
  CHECK(structural_equal(
      sys.nbc_b.at(1),
      Expr::mul(Expr::constant(2.0), Expr::variable(VarId::x_deriv(2)))));
  CHECK(structural_equal(sys.nbc_a.at(0), sys.nbc_b.at(0)));

  const auto sys1 = derive_system(parse("D1x^2"), 1);
  CHECK(sys1.n == 1);
  REQUIRE(sys1.nbc_b.size() == 1);
  CHECK(structural_equal(
      sys1.nbc_b.at(0),
      Expr::mul(Expr::constant(2.0), Expr::variable(VarId::x_deriv(1)))));
}

TEST_CASE("highest derivative solver inverts the equation", "[optimality]") {
  const Expr el1 = el_expression(parse("D2x^2 + z^2"), 2);

  SECTION("benchmark jets") {
    HighestDerivativeSolver solver(el1, 4);
    CHECK(solver.unknown_order() == 4);
    const Jet base(0.0, {0.0, 1.0, 0.0, 0.0}, 0.5);
    CHECK_THAT(solver.solve(base, 1.0), WithinAbs(0.0, 1e-10));

    const Expr el3 = el_expression(parse("D2x^2 + z"), 2);
    HighestDerivativeSolver s3(el3, 4);
    const Jet b3(0.0, {0.0, 1.0, 1.0, 1.0}, 1.0);
    CHECK_THAT(s3.solve(b3, 0.0), WithinAbs(1.0, 1e-10));
  }

  SECTION("linear equation") {
    HighestDerivativeSolver solver(parse("3 * D2x - 6"), 2);
    CHECK_THAT(solver.solve(Jet(0.0, {0.0, 0.0}, 0.0), 100.0),
               WithinAbs(2.0, 1e-10));
  }

  SECTION("free function form") {
    const Jet partial_jet(0.0, {0.0, 1.0, 0.0, 0.0}, 0.5);
    CHECK_THAT(solve_highest_derivative(el1, partial_jet, 1.0),
               WithinAbs(0.0, 1e-10));
  }

  SECTION("equation not containing the unknown") {
    HighestDerivativeSolver solver(parse("D1x + 1"), 2);
    CHECK_THROWS_AS(solver.solve(Jet(0.0, {0.0, 0.0}, 0.0), 0.0), SingularEL);
  }

  SECTION("degenerate root keeps the guess") {
    HighestDerivativeSolver solver(parse("D2x * D4x"), 4);
    bool degenerate = false;
    const double r =
        solver.solve(Jet(0.0, {1.0, 1.0, 0.0, 0.0}, 0.0), 7.5, &degenerate);
    CHECK(r == 7.5);
    CHECK(degenerate);
  }
}

TEST_CASE("residual stats distinguish solutions from impostors", "[optimality]") {
  const auto grid = testutil::uniform_grid(0.0, 1.0, 101);

  SECTION("x = t solves the first benchmark") {
    const Problem p = examples::example1();
    const auto sys = derive_system(p);
    const Trajectory x = Trajectory::polynomial({0.0, 1.0}, 0.0, 1.0);
    std::vector<double> zs;
    for (double t : grid) zs.push_back(1.0 / (2.0 - t));
    const ZPath zp{grid, zs, zs.back()};
    const auto stats = residual_stats(sys, x, zp, grid);
    CHECK(stats.max_abs < 1e-9);
    CHECK(stats.rms <= stats.max_abs);
    CHECK(stats.per_point.size() == grid.size());
  }

  SECTION("x = t with exponential z solves the free-slope benchmark") {
    const Problem p = examples::example4();
    const auto sys = derive_system(p);
    const Trajectory x = Trajectory::polynomial({0.0, 1.0}, 0.0, 1.0);
    std::vector<double> zs;
    for (double t : grid) zs.push_back(std::exp(t));
    const ZPath zp{grid, zs, zs.back()};
    const auto stats = residual_stats(sys, x, zp, grid);
    CHECK(stats.max_abs < 1e-9);
  }

  SECTION("a perturbed polynomial is flagged") {
    const Problem p = examples::example1();
    const auto sys = derive_system(p);
    const Trajectory x =
        Trajectory::polynomial({0.0, 1.0, 0.1, -0.2, 0.1}, 0.0, 1.0);
    const ZPath zp = integrate_z(p, x);
    const auto stats = residual_stats(sys, x, zp, grid);
    CHECK(stats.max_abs > 1e-3);
  }
}
