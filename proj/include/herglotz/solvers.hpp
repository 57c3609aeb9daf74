#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "herglotz/functional.hpp"
#include "herglotz/linalg.hpp"
#include "herglotz/optimality.hpp"
#include "herglotz/problem.hpp"
#include "herglotz/trajectory.hpp"

namespace herglotz {

struct ShootingOptions {
  int steps = 1000;
  double newton_tol = 1e-10;
  int max_newton_iters = 30;
  double fd_step = 1e-6;
  // Starting values for x^(n)(a)..x^(2n-1)(a); zeros when empty.
  std::vector<double> initial_guess;
};

struct DirectOptions {
  int degree = 0;  // 0 picks 2n+3
  int steps = 1000;
  double grad_fd_step = 1e-6;
  double armijo_c = 1e-4;
  int max_iters = 500;
  double converge_tol = 1e-8;
};

struct Solution {
  Trajectory trajectory;
  ZPath zpath;
  LambdaPath lambdapath;
  double z_b = 0.0;

  double el_max_abs = 0.0;
  double el_rms = 0.0;
  std::vector<double> el_per_point;
  // Residual of the natural boundary condition for every free slot.
  std::map<std::pair<Endpoint, int>, double> nbc_residuals;
  // Worst violation of the fixed boundary values.
  double bc_residual_max = 0.0;

  std::string method;
  int iterations = 0;
  std::vector<std::string> warnings;
};

struct ResidualStats {
  double max_abs = 0.0;
  double rms = 0.0;
  std::vector<double> per_point;
};

namespace detail {

inline double interp_z(const ZPath& zp, double t) {
  const auto& g = zp.grid;
  if (g.empty()) throw Error("empty z path");
  if (g.size() == 1) return zp.z_values.front();
  auto it = std::upper_bound(g.begin(), g.end(), t);
  std::size_t i = static_cast<std::size_t>(it - g.begin());
  i = i == 0 ? 0 : i - 1;
  if (i + 1 >= g.size()) i = g.size() - 2;
  if (t == g[i]) return zp.z_values[i];
  if (t == g[i + 1]) return zp.z_values[i + 1];
  const double w = (t - g[i]) / (g[i + 1] - g[i]);
  return (1.0 - w) * zp.z_values[i] + w * zp.z_values[i + 1];
}

}  // namespace detail

// Euler-Lagrange residual along a candidate solution, sampled on the
// given grid. Polynomial trajectories supply the order-2n derivative
// exactly; sampled ones do not store it, so it is recovered from the
// Euler-Lagrange equation itself wherever that equation is solvable and
// the residual then reflects the consistency of everything below it.
inline ResidualStats residual_stats(const OptimalitySystem& sys,
                                    const Trajectory& x, const ZPath& zp,
                                    std::span<const double> grid) {
  const int order = 2 * sys.n;
  ResidualStats stats;
  stats.per_point.reserve(grid.size());

  HighestDerivativeSolver top(sys.el, order);
  double guess = 0.0;
  for (const double t : grid) {
    const double z = detail::interp_z(zp, t);
    std::vector<double> xs(static_cast<std::size_t>(order) + 1, 0.0);
    for (int k = 0; k < order; ++k) {
      xs[static_cast<std::size_t>(k)] = x.eval_deriv(k, t);
    }
    if (x.kind() == Trajectory::Kind::Polynomial) {
      xs[static_cast<std::size_t>(order)] = x.eval_deriv(order, t);
    } else {
      Jet base(t, std::vector<double>(xs.begin(), xs.end() - 1), z);
      guess = top.solve(base, guess);
      xs[static_cast<std::size_t>(order)] = guess;
    }
    const double r = eval(sys.el, Jet(t, std::move(xs), z));
    stats.per_point.push_back(r);
  }

  double sum_sq = 0.0;
  for (const double r : stats.per_point) {
    stats.max_abs = std::max(stats.max_abs, std::abs(r));
    sum_sq += r * r;
  }
  stats.rms = stats.per_point.empty()
                  ? 0.0
                  : std::sqrt(sum_sq / static_cast<double>(stats.per_point.size()));
  return stats;
}

inline ResidualStats residual_stats(const OptimalitySystem& sys,
                                    const Solution& sol,
                                    std::span<const double> grid) {
  return residual_stats(sys, sol.trajectory, sol.zpath, grid);
}

namespace detail {

inline Jet endpoint_jet(const Trajectory& x, int order, Endpoint ep,
                        const ZPath& zp) {
  const double t = ep == Endpoint::A ? x.a() : x.b();
  const double z = ep == Endpoint::A ? zp.z_values.front() : zp.z_values.back();
  return trajectory_jet(x, order, t, z);
}

inline std::map<std::pair<Endpoint, int>, double> free_slot_residuals(
    const Problem& p, const OptimalitySystem& sys, const Trajectory& x,
    const ZPath& zp) {
  std::map<std::pair<Endpoint, int>, double> out;
  for (Endpoint ep : {Endpoint::A, Endpoint::B}) {
    const auto& bc = p.bc(ep);
    const auto& nbc = ep == Endpoint::A ? sys.nbc_a : sys.nbc_b;
    bool any_free = false;
    for (int k = 0; k < p.n; ++k) any_free |= !bc[static_cast<std::size_t>(k)];
    if (!any_free) continue;
    const Jet jet = endpoint_jet(x, 2 * p.n - 1, ep, zp);
    for (int k = 0; k < p.n; ++k) {
      if (bc[static_cast<std::size_t>(k)]) continue;
      out[{ep, k}] = eval(nbc.at(k), jet);
    }
  }
  return out;
}

inline double fixed_slot_violation(const Problem& p, const Trajectory& x) {
  double worst = 0.0;
  for (Endpoint ep : {Endpoint::A, Endpoint::B}) {
    const double t = ep == Endpoint::A ? p.a : p.b;
    const auto& bc = p.bc(ep);
    for (int k = 0; k < p.n; ++k) {
      if (!bc[static_cast<std::size_t>(k)]) continue;
      worst = std::max(worst,
                       std::abs(x.eval_deriv(k, t) - *bc[static_cast<std::size_t>(k)]));
    }
  }
  return worst;
}

inline void fill_diagnostics(const Problem& p, const OptimalitySystem& sys,
                             Solution& sol) {
  ResidualStats stats = residual_stats(sys, sol.trajectory, sol.zpath, sol.zpath.grid);
  sol.el_max_abs = stats.max_abs;
  sol.el_rms = stats.rms;
  sol.el_per_point = std::move(stats.per_point);
  sol.nbc_residuals = free_slot_residuals(p, sys, sol.trajectory, sol.zpath);
  sol.bc_residual_max = fixed_slot_violation(p, sol.trajectory);
}

// Integrates the full extremal system: the trajectory state
// (x, x', ..., x^(2n-1)), z, and lambda, with x^(2n) recovered from the
// Euler-Lagrange equation at every stage.
struct ShootState {
  std::vector<double> y;  // x-block, then z, then lambda
  int degenerate_stages = 0;
};

struct ShootRecord {
  std::vector<double> grid;
  std::vector<std::vector<double>> states;
  std::vector<double> z;
  std::vector<double> lambda;
};

inline ShootState integrate_extremal(const Problem& p,
                                     const HighestDerivativeSolver& top,
                                     const Expr& mu,
                                     std::span<const double> unknowns, int steps,
                                     ShootRecord* record) {
  const int n = p.n;
  const std::size_t xdim = static_cast<std::size_t>(2 * n);
  const double width = p.b - p.a;
  const double h = width / steps;

  ShootState st;
  st.y.assign(xdim + 2, 0.0);
  for (int k = 0; k < n; ++k) {
    st.y[static_cast<std::size_t>(k)] = *p.bc_a[static_cast<std::size_t>(k)];
  }
  for (int k = 0; k < n; ++k) {
    st.y[static_cast<std::size_t>(n + k)] = unknowns[static_cast<std::size_t>(k)];
  }
  st.y[xdim] = p.gamma;
  st.y[xdim + 1] = 1.0;

  double top_guess = 0.0;
  auto rhs = [&](double t, const std::vector<double>& y) {
    const double z = y[xdim];
    if (!std::isfinite(z) || std::abs(z) > kBlowUpLimit) throw BlowUp(t);
    Jet jet(t, std::vector<double>(y.begin(), y.begin() + xdim), z);
    bool degen = false;
    const double x_top = top.solve(jet, top_guess, &degen);
    top_guess = x_top;
    if (degen) ++st.degenerate_stages;

    std::vector<double> dy(xdim + 2);
    for (std::size_t i = 0; i + 1 < xdim; ++i) dy[i] = y[i + 1];
    dy[xdim - 1] = x_top;
    dy[xdim] = eval(p.lagrangian, jet);
    dy[xdim + 1] = eval(mu, jet) * y[xdim + 1];
    return dy;
  };

  auto shifted = [&](const std::vector<double>& y, const std::vector<double>& k,
                     double factor) {
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + factor * k[i];
    return out;
  };

  if (record) {
    record->grid.push_back(p.a);
    record->states.emplace_back(st.y.begin(), st.y.begin() + xdim);
    record->z.push_back(st.y[xdim]);
    record->lambda.push_back(st.y[xdim + 1]);
  }

  for (int i = 0; i < steps; ++i) {
    const double t = p.a + width * i / steps;
    const double tn = i + 1 == steps ? p.b : p.a + width * (i + 1) / steps;
    const std::vector<double> k1 = rhs(t, st.y);
    const std::vector<double> k2 = rhs(t + h / 2, shifted(st.y, k1, h / 2));
    const std::vector<double> k3 = rhs(t + h / 2, shifted(st.y, k2, h / 2));
    const std::vector<double> k4 = rhs(tn, shifted(st.y, k3, h));
    for (std::size_t c = 0; c < st.y.size(); ++c) {
      st.y[c] += h / 6 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
    }
    const double z = st.y[xdim];
    if (!std::isfinite(z) || std::abs(z) > kBlowUpLimit) throw BlowUp(tn);
    for (const double v : st.y) {
      if (!std::isfinite(v)) throw BlowUp(tn);
    }
    if (record) {
      record->grid.push_back(tn);
      record->states.emplace_back(st.y.begin(), st.y.begin() + xdim);
      record->z.push_back(st.y[xdim]);
      record->lambda.push_back(st.y[xdim + 1]);
    }
  }
  return st;
}

inline double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (const double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace detail

// Indirect method: the unfixed initial derivatives x^(n)(a)..x^(2n-1)(a)
// are Newton unknowns; the targets are the boundary conditions at b
// (fixed values, or the natural condition where a slot is free). Needs
// every slot at a fixed; free slots at a take the direct method instead.
inline Solution solve_shooting(const Problem& p, ShootingOptions opts = {}) {
  p.validate();
  if (!p.all_a_fixed()) {
    throw IllPosedBoundary(
        "shooting needs every slot at the initial endpoint fixed; "
        "use the direct method for this problem");
  }
  const int n = p.n;
  const OptimalitySystem sys = derive_system(p);
  const HighestDerivativeSolver top(sys.el, 2 * n);
  const Expr mu = mu_expression(p.lagrangian).expr;

  std::vector<double> u = opts.initial_guess;
  if (u.empty()) {
    u.assign(static_cast<std::size_t>(n), 0.0);
  } else if (static_cast<int>(u.size()) != n) {
    throw InputError("shooting initial guess needs " + std::to_string(n) +
                     " values");
  }

  int degenerate_stages = 0;
  auto residuals = [&](std::span<const double> unknowns) {
    detail::ShootState st =
        detail::integrate_extremal(p, top, mu, unknowns, opts.steps, nullptr);
    degenerate_stages += st.degenerate_stages;
    const std::size_t xdim = static_cast<std::size_t>(2 * n);
    Jet terminal(p.b, std::vector<double>(st.y.begin(), st.y.begin() + xdim),
                 st.y[xdim]);
    std::vector<double> r(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const auto& slot = p.bc_b[static_cast<std::size_t>(k)];
      r[static_cast<std::size_t>(k)] =
          slot ? terminal.x_deriv(k) - *slot : eval(sys.nbc_b.at(k), terminal);
    }
    return r;
  };

  // The first shot reports divergence as such; later probes and line
  // search treat it as a rejected trial.
  std::vector<double> r = residuals(u);
  double rnorm = detail::inf_norm(r);
  int iterations = 0;
  bool line_search_hit_floor = false;

  while (rnorm > opts.newton_tol) {
    if (iterations >= opts.max_newton_iters) {
      throw NoConvergence("shooting Newton stalled at residual " +
                          std::to_string(rnorm) + " after " +
                          std::to_string(iterations) + " iterations");
    }
    detail::Matrix jac(static_cast<std::size_t>(n),
                       std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int j = 0; j < n; ++j) {
      std::vector<double> probe = u;
      const double delta =
          opts.fd_step * std::max(1.0, std::abs(probe[static_cast<std::size_t>(j)]));
      probe[static_cast<std::size_t>(j)] += delta;
      std::vector<double> rp;
      try {
        rp = residuals(probe);
      } catch (const BlowUp&) {
        throw NoConvergence("shooting Jacobian probe diverged");
      }
      for (int i = 0; i < n; ++i) {
        jac[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            (rp[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(i)]) /
            delta;
      }
    }
    std::vector<double> negr(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) negr[i] = -r[i];
    const std::vector<double> step = detail::solve_linear(std::move(jac), std::move(negr));

    double alpha = 1.0;
    bool accepted = false;
    for (int tries = 0; tries < 9; ++tries) {
      std::vector<double> trial = u;
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] += alpha * step[i];
      try {
        std::vector<double> rt = residuals(trial);
        const double tnorm = detail::inf_norm(rt);
        if (tnorm < rnorm) {
          u = std::move(trial);
          r = std::move(rt);
          rnorm = tnorm;
          accepted = true;
          break;
        }
      } catch (const BlowUp&) {
        line_search_hit_floor = true;
      }
      alpha /= 2;
    }
    if (!accepted) {
      throw NoConvergence("shooting line search found no improving step");
    }
    ++iterations;
  }

  detail::ShootRecord record;
  detail::ShootState final_state =
      detail::integrate_extremal(p, top, mu, u, opts.steps, &record);
  degenerate_stages += final_state.degenerate_stages;

  Solution sol;
  sol.method = "shooting";
  sol.iterations = iterations;
  sol.trajectory = Trajectory::sampled(record.grid, record.states);
  sol.zpath = ZPath{record.grid, record.z, record.z.back()};
  sol.lambdapath = LambdaPath{std::move(record.grid), std::move(record.lambda)};
  sol.z_b = sol.zpath.z_b;
  detail::fill_diagnostics(p, sys, sol);
  if (degenerate_stages > 0) {
    sol.warnings.push_back("degenerate highest-derivative stages: " +
                           std::to_string(degenerate_stages));
  }
  if (line_search_hit_floor) {
    sol.warnings.push_back("line search retreated from a blow-up");
  }
  return sol;
}

// Direct method: gradient descent on z(b) over the constrained Ritz
// coefficients, with Armijo backtracking. Trial trajectories that blow
// up score +inf and the search retreats.
inline Solution solve_direct(const Problem& p, DirectOptions opts = {}) {
  p.validate();
  const int degree = opts.degree == 0 ? 2 * p.n + 3 : opts.degree;
  const BasisMap basis = constrained_basis(p, degree);
  const int q = basis.param_count();
  const double sign = p.goal == Goal::Minimize ? 1.0 : -1.0;
  const double inf = std::numeric_limits<double>::infinity();

  auto score = [&](std::span<const double> params) {
    try {
      return sign * objective(p, basis.make(params), opts.steps);
    } catch (const BlowUp&) {
      return inf;
    }
  };

  std::vector<double> theta(static_cast<std::size_t>(q), 0.0);
  int iterations = 0;
  bool retreated = false;
  bool hit_cap = false;

  if (q > 0) {
    double f0 = score(theta);
    if (!std::isfinite(f0)) {
      throw SolveError("initial Ritz trajectory already blows up");
    }
    while (iterations < opts.max_iters) {
      std::vector<double> grad(static_cast<std::size_t>(q), 0.0);
      double gnorm = 0.0;
      for (int j = 0; j < q; ++j) {
        const double h = opts.grad_fd_step;
        std::vector<double> plus = theta, minus = theta;
        plus[static_cast<std::size_t>(j)] += h;
        minus[static_cast<std::size_t>(j)] -= h;
        const double fp = score(plus);
        const double fm = score(minus);
        double g;
        if (std::isfinite(fp) && std::isfinite(fm)) {
          g = (fp - fm) / (2 * h);
        } else if (std::isfinite(fp)) {
          g = (fp - f0) / h;
        } else if (std::isfinite(fm)) {
          g = (f0 - fm) / h;
        } else {
          throw SolveError("objective diverges on both sides of a parameter");
        }
        grad[static_cast<std::size_t>(j)] = g;
        gnorm = std::max(gnorm, std::abs(g));
      }
      if (gnorm <= opts.converge_tol) break;

      double gg = 0.0;
      for (const double g : grad) gg += g * g;

      double alpha = 1.0;
      bool accepted = false;
      while (alpha >= 1e-14) {
        std::vector<double> trial = theta;
        for (std::size_t i = 0; i < trial.size(); ++i) trial[i] -= alpha * grad[i];
        const double ft = score(trial);
        if (std::isinf(ft)) retreated = true;
        if (ft <= f0 - opts.armijo_c * alpha * gg) {
          theta = std::move(trial);
          f0 = ft;
          accepted = true;
          break;
        }
        alpha /= 2;
      }
      if (!accepted) {
        throw NoDescent("no Armijo step above the step floor");
      }
      ++iterations;
    }
    hit_cap = iterations >= opts.max_iters;
  }

  const OptimalitySystem sys = derive_system(p);
  Solution sol;
  sol.method = "direct";
  sol.iterations = iterations;
  sol.trajectory = basis.make(theta);
  sol.zpath = integrate_z(p, sol.trajectory, opts.steps);
  sol.lambdapath = lambda_path(p, sol.trajectory, sol.zpath);
  sol.z_b = sol.zpath.z_b;
  detail::fill_diagnostics(p, sys, sol);
  if (retreated) {
    sol.warnings.push_back("line search retreated from a blow-up");
  }
  if (hit_cap) {
    sol.warnings.push_back("gradient descent stopped at the iteration cap");
  }
  return sol;
}

struct CrossValidation {
  double z_b_shooting = 0.0;
  double z_b_direct = 0.0;
  double z_b_diff = 0.0;
  double max_trajectory_dev = 0.0;
};

// Compares two solutions of the same problem on a uniform 201-point grid.
inline CrossValidation cross_validate(const Problem& p, const Solution& shooting,
                                      const Solution& direct) {
  CrossValidation cv;
  cv.z_b_shooting = shooting.z_b;
  cv.z_b_direct = direct.z_b;
  cv.z_b_diff = std::abs(shooting.z_b - direct.z_b);
  const int samples = 200;
  for (int i = 0; i <= samples; ++i) {
    const double t = p.a + (p.b - p.a) * i / samples;
    cv.max_trajectory_dev =
        std::max(cv.max_trajectory_dev,
                 std::abs(shooting.trajectory.eval_deriv(0, t) -
                          direct.trajectory.eval_deriv(0, t)));
  }
  return cv;
}

}  // namespace herglotz
