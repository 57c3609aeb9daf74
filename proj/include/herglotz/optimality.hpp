#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "herglotz/expr.hpp"
#include "herglotz/problem.hpp"

// Optimality conditions for the Herglotz problem. Extremals solve
//
//   sum_{j=0..n} (-1)^j d^j/dt^j ( lambda * dL/dx^(j) ) = 0,
//
// with the integrating factor lambda(t) = exp(-int_a^t dL/dz). Writing
// mu = -dL/dz, each d/dt applied to lambda*F equals lambda * (F' + mu F),
// so lambda factors out of the whole sum and never has to be computed:
// the equation below divides it away and works with D_mu F = F' + mu F
// alone. lambda is positive, so the zero sets coincide.

namespace herglotz {

struct MuExpr {
  Expr expr;
};

inline MuExpr mu_expression(const Expr& lagrangian) {
  return MuExpr{simplify(Expr::neg(partial(lagrangian, VarId::z())))};
}

// D_mu F = dF/dt + mu * F, the conjugated total derivative.
inline Expr d_mu(const Expr& f, const Expr& lagrangian, int n) {
  Expr mu = mu_expression(lagrangian).expr;
  return simplify(Expr::add(total_derivative(f, lagrangian, n),
                            Expr::mul(std::move(mu), f)));
}

// Left-hand side of the generalized Euler-Lagrange equation with lambda
// divided out: sum_{j=0..n} (-1)^j D_mu^j (dL/dx^(j)). For dL/dz = 0 this
// collapses to the classical Euler-Lagrange operator.
inline Expr el_expression(const Expr& lagrangian, int n) {
  if (n < 1) throw IndexError("order n must be at least 1");
  if (max_jet_order(lagrangian) > n) {
    throw OrderMismatch("lagrangian references derivative order " +
                        std::to_string(max_jet_order(lagrangian)) +
                        " above n = " + std::to_string(n));
  }
  Expr acc;
  for (int j = 0; j <= n; ++j) {
    Expr term = partial(lagrangian, VarId::x_deriv(j));
    for (int i = 0; i < j; ++i) term = d_mu(term, lagrangian, n);
    if (acc.empty()) {
      acc = std::move(term);
    } else if (j % 2 == 1) {
      acc = Expr::sub(std::move(acc), std::move(term));
    } else {
      acc = Expr::add(std::move(acc), std::move(term));
    }
  }
  return simplify(acc);
}

// Natural boundary condition for a free slot k in 0..n-1:
//
//   sum_{j=1..n-k} (-1)^(j-1) D_mu^(j-1) (dL/dx^(k+j)) = 0
//
// evaluated at the endpoint. The expression is the same for both ends;
// the endpoint only selects the jet it is evaluated against.
inline Expr nbc_expression(const Expr& lagrangian, int n, int k, Endpoint ep) {
  (void)ep;
  if (n < 1) throw IndexError("order n must be at least 1");
  if (k < 0 || k >= n) {
    throw IndexError("free slot k = " + std::to_string(k) +
                     " outside 0.." + std::to_string(n - 1));
  }
  if (max_jet_order(lagrangian) > n) {
    throw OrderMismatch("lagrangian references derivative order " +
                        std::to_string(max_jet_order(lagrangian)) +
                        " above n = " + std::to_string(n));
  }
  Expr acc;
  for (int j = 1; j <= n - k; ++j) {
    Expr term = partial(lagrangian, VarId::x_deriv(k + j));
    for (int i = 1; i < j; ++i) term = d_mu(term, lagrangian, n);
    if (acc.empty()) {
      acc = std::move(term);
    } else if (j % 2 == 0) {
      acc = Expr::sub(std::move(acc), std::move(term));
    } else {
      acc = Expr::add(std::move(acc), std::move(term));
    }
  }
  if (acc.empty()) acc = Expr::constant(0.0);
  return simplify(acc);
}

struct OptimalitySystem {
  int n = 1;
  Expr el;
  std::map<int, Expr> nbc_a;
  std::map<int, Expr> nbc_b;
};

inline OptimalitySystem derive_system(const Expr& lagrangian, int n) {
  OptimalitySystem sys;
  sys.n = n;
  sys.el = el_expression(lagrangian, n);
  for (int k = 0; k < n; ++k) {
    sys.nbc_a[k] = nbc_expression(lagrangian, n, k, Endpoint::A);
    sys.nbc_b[k] = nbc_expression(lagrangian, n, k, Endpoint::B);
  }
  return sys;
}

inline OptimalitySystem derive_system(const Problem& p) {
  p.validate();
  return derive_system(p.lagrangian, p.n);
}

// Solves el = 0 for the highest derivative with everything below it held
// at the base jet. Newton from the supplied guess; the el expression of
// an order-n Lagrangian is affine in x^(2n) whenever L is quadratic in
// x^(n), in which case one step lands exactly.
class HighestDerivativeSolver {
 public:
  HighestDerivativeSolver(Expr el, int unknown_order)
      : el_(std::move(el)),
        del_(partial(el_, VarId::x_deriv(unknown_order))),
        order_(unknown_order) {
    if (unknown_order < 1) throw IndexError("unknown order must be positive");
  }

  int unknown_order() const { return order_; }
  const Expr& el() const { return el_; }

  // base must carry orders 0..unknown_order-1. When the equation is
  // degenerate at this jet (slope and residual both vanish) the guess is
  // returned unchanged and *degenerate is set.
  double solve(const Jet& base, double guess, bool* degenerate = nullptr) const {
    if (base.max_order() + 1 < order_) {
      throw MissingDerivative("base jet carries orders up to " +
                              std::to_string(base.max_order()) +
                              ", need everything below order " +
                              std::to_string(order_));
    }
    std::vector<double> xs(base.x_derivs().begin(),
                           base.x_derivs().begin() + order_);
    xs.push_back(guess);
    const std::size_t slot = static_cast<std::size_t>(order_);

    double tol = 0.0;
    for (int iter = 0; iter < 50; ++iter) {
      Jet trial(base.t(), xs, base.z());
      const double f = eval(el_, trial);
      if (iter == 0) tol = 1e-12 * std::max(1.0, std::abs(f));
      const double d = eval(del_, trial);
      if (std::abs(f) <= tol) {
        if (degenerate && std::abs(d) < 1e-12) *degenerate = true;
        return xs[slot];
      }
      if (std::abs(d) < 1e-12) {
        throw SingularEL(
            "Euler-Lagrange equation is singular in the highest derivative "
            "at t = " + std::to_string(base.t()));
      }
      xs[slot] -= f / d;
      if (!std::isfinite(xs[slot])) {
        throw NoConvergence("highest-derivative Newton diverged at t = " +
                            std::to_string(base.t()));
      }
    }
    throw NoConvergence("highest-derivative Newton failed at t = " +
                        std::to_string(base.t()));
  }

 private:
  Expr el_;
  Expr del_;
  int order_;
};

// One-shot form: the unknown order is the first one the jet lacks.
inline double solve_highest_derivative(const Expr& el, const Jet& partial_jet,
                                       double guess) {
  HighestDerivativeSolver solver(el, partial_jet.max_order() + 1);
  return solver.solve(partial_jet, guess);
}

}  // namespace herglotz
