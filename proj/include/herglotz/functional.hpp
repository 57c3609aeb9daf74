#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "herglotz/optimality.hpp"
#include "herglotz/problem.hpp"
#include "herglotz/trajectory.hpp"

namespace herglotz {

// |z| beyond this is treated as divergence of the state equation.
inline constexpr double kBlowUpLimit = 1e8;

// z(t) along a fixed trajectory, on the integration grid.
struct ZPath {
  std::vector<double> grid;
  std::vector<double> z_values;
  double z_b = 0.0;
};

// The integrating factor lambda(t) = exp(-int_a^t dL/dz) along the same
// trajectory; lambda(a) = 1 and lambda stays positive.
struct LambdaPath {
  std::vector<double> grid;
  std::vector<double> lambda_values;
};

namespace detail {

inline Jet trajectory_jet(const Trajectory& x, int order, double t, double z) {
  std::vector<double> xs(static_cast<std::size_t>(order) + 1);
  for (int k = 0; k <= order; ++k) {
    xs[static_cast<std::size_t>(k)] = x.eval_deriv(k, t);
  }
  return Jet(t, std::move(xs), z);
}

}  // namespace detail

// Integrates zdot = L(t, jet of x, z), z(a) = gamma with the classical
// fixed-step fourth-order Runge-Kutta scheme. Throws BlowUp with the
// first grid time at which |z| crosses the divergence threshold.
inline ZPath integrate_z(const Problem& p, const Trajectory& x, int steps = 1000) {
  p.validate();
  if (steps < 10) throw InputError("need at least 10 integration steps");

  const double width = p.b - p.a;
  const double h = width / steps;
  auto rhs = [&](double t, double z) {
    return eval(p.lagrangian, detail::trajectory_jet(x, p.n, t, z));
  };

  ZPath out;
  out.grid.reserve(static_cast<std::size_t>(steps) + 1);
  out.z_values.reserve(static_cast<std::size_t>(steps) + 1);

  double z = p.gamma;
  if (std::abs(z) > kBlowUpLimit) throw BlowUp(p.a);
  out.grid.push_back(p.a);
  out.z_values.push_back(z);

  for (int i = 0; i < steps; ++i) {
    const double t = p.a + width * i / steps;
    const double tn = i + 1 == steps ? p.b : p.a + width * (i + 1) / steps;
    const double k1 = rhs(t, z);
    const double k2 = rhs(t + h / 2, z + h / 2 * k1);
    const double k3 = rhs(t + h / 2, z + h / 2 * k2);
    const double k4 = rhs(tn, z + h * k3);
    z += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    if (!std::isfinite(z) || std::abs(z) > kBlowUpLimit) throw BlowUp(tn);
    out.grid.push_back(tn);
    out.z_values.push_back(z);
  }
  out.z_b = z;
  return out;
}

// lambda solves lambda' = mu * lambda, lambda(a) = 1 with mu = -dL/dz;
// z is re-integrated jointly so that mu sees consistent states. The
// returned grid matches the ZPath's.
inline LambdaPath lambda_path(const Problem& p, const Trajectory& x,
                              const ZPath& zp) {
  p.validate();
  if (zp.grid.size() < 2) throw InputError("z path has no steps");
  const int steps = static_cast<int>(zp.grid.size()) - 1;

  const Expr mu = mu_expression(p.lagrangian).expr;
  const double width = p.b - p.a;
  const double h = width / steps;

  struct Pair {
    double z, lam;
  };
  auto rhs = [&](double t, Pair y) {
    const Jet jet = detail::trajectory_jet(x, p.n, t, y.z);
    return Pair{eval(p.lagrangian, jet), eval(mu, jet) * y.lam};
  };

  LambdaPath out;
  out.grid = zp.grid;
  out.lambda_values.reserve(zp.grid.size());
  Pair y{p.gamma, 1.0};
  out.lambda_values.push_back(y.lam);

  for (int i = 0; i < steps; ++i) {
    const double t = out.grid[static_cast<std::size_t>(i)];
    const double tn = out.grid[static_cast<std::size_t>(i) + 1];
    const Pair k1 = rhs(t, y);
    const Pair k2 = rhs(t + h / 2, Pair{y.z + h / 2 * k1.z, y.lam + h / 2 * k1.lam});
    const Pair k3 = rhs(t + h / 2, Pair{y.z + h / 2 * k2.z, y.lam + h / 2 * k2.lam});
    const Pair k4 = rhs(tn, Pair{y.z + h * k3.z, y.lam + h * k3.lam});
    y.z += h / 6 * (k1.z + 2 * k2.z + 2 * k3.z + k4.z);
    y.lam += h / 6 * (k1.lam + 2 * k2.lam + 2 * k3.lam + k4.lam);
    if (!std::isfinite(y.z) || std::abs(y.z) > kBlowUpLimit) throw BlowUp(tn);
    if (!std::isfinite(y.lam) || y.lam <= 0.0) {
      throw SolveError("integrating factor left (0, inf) at t = " +
                       std::to_string(tn));
    }
    out.lambda_values.push_back(y.lam);
  }
  return out;
}

// The Herglotz functional: the terminal state z(b) reached along x.
inline double objective(const Problem& p, const Trajectory& x, int steps = 1000) {
  return integrate_z(p, x, steps).z_b;
}

}  // namespace herglotz
