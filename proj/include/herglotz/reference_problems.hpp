#pragma once

#include <cmath>

#include "herglotz/expr_text.hpp"
#include "herglotz/problem.hpp"

// Bundled benchmark problems with known closed-form extremals. They back
// the `reproduce` command and the test suite.

namespace herglotz::examples {

// zdot = xddot^2 + z^2 on [0, 1], z(0) = 1/2, clamped ends:
// x(0) = 0, x'(0) = 1, x(1) = 1, x'(1) = 1. The extremal is x(t) = t
// with z(t) = 1/(2 - t), so z(1) = 1.
inline Problem example1() {
  return Problem::make(2, 0.0, 1.0, parse("D2x^2 + z^2"), 0.5,
                       {0.0, 1.0}, {1.0, 1.0});
}

// The same dynamics with z(0) = gamma swept as a parameter. Along the
// persisting extremal x(t) = t the state is z(t) = gamma/(1 - gamma t):
// finite for gamma < 1, divergent inside [0, 1] for gamma > 1. The
// infimum of z(1) over gamma is not attained, which is why z(0) must be
// part of the data.
inline Problem example2(double gamma) {
  return Problem::make(2, 0.0, 1.0, parse("D2x^2 + z^2"), gamma,
                       {0.0, 1.0}, {1.0, 1.0});
}

// zdot = xddot^2 + z on [0, 1], z(0) = 1, with x(0) = 0, x'(0) = 1,
// x(1) = 1, x'(1) = 0. Linear state dependence: mu = -1 and
// lambda(t) = e^(-t). The extremal is a combination of {1, t, e^t, t e^t}
// and z(1) = (e^2 - e - 4) e / (e^2 - 3 e + 1).
inline Problem example3() {
  return Problem::make(2, 0.0, 1.0, parse("D2x^2 + z"), 1.0,
                       {0.0, 1.0}, {1.0, 0.0});
}

// Same problem as example3 with the slope at b released. The natural boundary condition
// is xddot(1) = 0, the extremal collapses to x(t) = t, and z(t) = e^t.
inline Problem example4() {
  return Problem::make(2, 0.0, 1.0, parse("D2x^2 + z"), 1.0,
                       {0.0, 1.0}, {1.0, std::nullopt});
}

// Closed-form values for example 3.
namespace ex3 {

inline double denom() {
  const double e = std::exp(1.0);
  return e * e - 3.0 * e + 1.0;
}

// x(t) = c1 + c2 t + (c3 + c4 t) e^t; r^2 (r-1)^2 = 0 is the
// characteristic equation of the extremal ODE.
inline double x(double t) {
  const double e = std::exp(1.0);
  const double d = denom();
  const double c3 = (e - 1.0) / d;
  const double c4 = (2.0 - e) / d;
  const double c1 = -c3;
  const double c2 = 1.0 - c3 - c4;
  return c1 + c2 * t + (c3 + c4 * t) * std::exp(t);
}

inline double x_deriv(int k, double t) {
  const double e = std::exp(1.0);
  const double d = denom();
  const double c3 = (e - 1.0) / d;
  const double c4 = (2.0 - e) / d;
  const double c2 = 1.0 - c3 - c4;
  const double et = std::exp(t);
  if (k == 0) return x(t);
  if (k == 1) return c2 + (c3 + c4 + c4 * t) * et;
  return (c3 + k * c4 + c4 * t) * et;  // k >= 2
}

inline double z_b() {
  const double e = std::exp(1.0);
  return (e * e - e - 4.0) * e / denom();
}

}  // namespace ex3

}  // namespace herglotz::examples
