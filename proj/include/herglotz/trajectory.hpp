#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "herglotz/linalg.hpp"
#include "herglotz/problem.hpp"

namespace herglotz {

namespace detail {

// i * (i-1) * ... * (i-k+1)
inline double falling_factorial(int i, int k) {
  double f = 1.0;
  for (int j = 0; j < k; ++j) f *= static_cast<double>(i - j);
  return f;
}

// Monomial coefficients (in the local coordinate u on [0, 1]) of the
// two-point Hermite interpolant matching value and derivatives 0..m at
// both ends. left/right hold the already h-scaled data f^(k) * h^k.
// Newton's divided differences with repeated nodes, then expansion.
inline std::vector<double> hermite_coeffs(std::span<const double> left,
                                          std::span<const double> right) {
  const std::size_t m1 = left.size();
  const std::size_t n = 2 * m1;

  std::vector<double> factorial(m1, 1.0);
  for (std::size_t k = 1; k < m1; ++k) {
    factorial[k] = factorial[k - 1] * static_cast<double>(k);
  }

  auto node = [&](std::size_t i) { return i < m1 ? 0.0 : 1.0; };
  auto data = [&](std::size_t i, std::size_t order) {
    return (i < m1 ? left[order] : right[order]) / factorial[order];
  };

  // dd[i] holds the current column of the divided-difference table.
  std::vector<double> dd(n);
  for (std::size_t i = 0; i < n; ++i) dd[i] = data(i, 0);
  std::vector<double> newton(n);
  newton[0] = dd[0];
  for (std::size_t len = 1; len < n; ++len) {
    for (std::size_t i = 0; i + len < n; ++i) {
      const double x0 = node(i);
      const double x1 = node(i + len);
      dd[i] = x0 == x1 ? data(i, len) : (dd[i + 1] - dd[i]) / (x1 - x0);
    }
    newton[len] = dd[0];
  }

  // Horner-style expansion of the Newton form into monomials.
  std::vector<double> coeffs(n, 0.0);
  std::vector<double> basis(n, 0.0);
  basis[0] = 1.0;
  std::size_t basis_len = 1;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < basis_len; ++i) {
      coeffs[i] += newton[k] * basis[i];
    }
    if (k + 1 == n) break;
    const double c = node(k);
    for (std::size_t i = basis_len; i-- > 0;) {
      basis[i + 1] += basis[i];
      basis[i] *= -c;
    }
    ++basis_len;
  }
  return coeffs;
}

// j-th derivative of sum c_i u^i at u, in the u coordinate.
inline double poly_deriv(std::span<const double> coeffs, int j, double u) {
  const int deg = static_cast<int>(coeffs.size()) - 1;
  if (j > deg) return 0.0;
  double acc = 0.0;
  for (int i = deg; i >= j; --i) {
    acc = acc * u + coeffs[static_cast<std::size_t>(i)] * falling_factorial(i, j);
  }
  return acc;
}

}  // namespace detail

// A candidate trajectory x on [a, b] in one of two representations: a
// polynomial in the normalized coordinate s = (t-a)/(b-a), or per-point
// jet samples joined by two-point Hermite interpolation.
class Trajectory {
 public:
  enum class Kind { Polynomial, Sampled };

  // The zero trajectory on [0, 1].
  Trajectory() = default;

  static Trajectory polynomial(std::vector<double> coeffs, double a, double b) {
    if (coeffs.empty()) throw InputError("polynomial needs coefficients");
    if (!(a < b)) throw InputError("trajectory needs a < b");
    Trajectory tr;
    tr.kind_ = Kind::Polynomial;
    tr.coeffs_ = std::move(coeffs);
    tr.a_ = a;
    tr.b_ = b;
    return tr;
  }

  // states[i] holds x^(0)..x^(m) at grid[i]; between nodes the unique
  // Hermite interpolant of degree 2m+1 is used, so derivatives up to
  // order m+1 are available everywhere.
  static Trajectory sampled(std::vector<double> grid,
                            std::vector<std::vector<double>> states) {
    if (grid.size() < 2) throw InputError("sampled trajectory needs two points");
    if (states.size() != grid.size()) {
      throw InputError("sampled trajectory needs one state per grid point");
    }
    const std::size_t width = states[0].size();
    if (width == 0) throw InputError("sampled states must carry x");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      if (!(grid[i] < grid[i + 1])) {
        throw InputError("sampled grid must increase strictly");
      }
    }
    for (const auto& s : states) {
      if (s.size() != width) {
        throw InputError("sampled states must all have the same width");
      }
    }
    Trajectory tr;
    tr.kind_ = Kind::Sampled;
    tr.a_ = grid.front();
    tr.b_ = grid.back();
    tr.grid_ = std::move(grid);
    tr.states_ = std::move(states);
    return tr;
  }

  Kind kind() const { return kind_; }
  double a() const { return a_; }
  double b() const { return b_; }

  // Highest derivative order stored per sample; -1 for polynomials,
  // which differentiate exactly to any order.
  int stored_order() const {
    return kind_ == Kind::Sampled ? static_cast<int>(states_[0].size()) - 1 : -1;
  }

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<std::vector<double>>& states() const { return states_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

  double eval_deriv(int j, double t) const {
    if (j < 0) throw IndexError("derivative order must be nonnegative");
    const double slack = 1e-9 * (b_ - a_);
    if (t < a_ - slack || t > b_ + slack) {
      throw OutOfRange("t = " + std::to_string(t) + " outside [" +
                       std::to_string(a_) + ", " + std::to_string(b_) + "]");
    }
    t = std::clamp(t, a_, b_);
    return kind_ == Kind::Polynomial ? eval_poly(j, t) : eval_sampled(j, t);
  }

 private:
  Kind kind_ = Kind::Polynomial;
  double a_ = 0.0;
  double b_ = 1.0;
  std::vector<double> coeffs_ = {0.0};
  std::vector<double> grid_;
  std::vector<std::vector<double>> states_;

  double eval_poly(int j, double t) const {
    const double width = b_ - a_;
    const double u = (t - a_) / width;
    return detail::poly_deriv(coeffs_, j, u) * std::pow(width, -j);
  }

  double eval_sampled(int j, double t) const {
    const int m = stored_order();
    if (j > m + 1) {
      throw OutOfRange("sampled trajectory stores orders 0.." +
                       std::to_string(m) + "; order " + std::to_string(j) +
                       " is not available");
    }
    auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - grid_.begin());
    i = i == 0 ? 0 : i - 1;
    if (i + 1 == grid_.size()) --i;

    if (t == grid_[i] && j <= m) return states_[i][static_cast<std::size_t>(j)];
    if (t == grid_[i + 1] && j <= m) return states_[i + 1][static_cast<std::size_t>(j)];

    const double h = grid_[i + 1] - grid_[i];
    const double u = (t - grid_[i]) / h;
    std::vector<double> left(static_cast<std::size_t>(m) + 1);
    std::vector<double> right(static_cast<std::size_t>(m) + 1);
    double hk = 1.0;
    for (int k = 0; k <= m; ++k) {
      left[static_cast<std::size_t>(k)] = states_[i][static_cast<std::size_t>(k)] * hk;
      right[static_cast<std::size_t>(k)] = states_[i + 1][static_cast<std::size_t>(k)] * hk;
      hk *= h;
    }
    const std::vector<double> coeffs = detail::hermite_coeffs(left, right);
    return detail::poly_deriv(coeffs, j, u) * std::pow(h, -j);
  }
};

// Polynomial coefficient space with the problem's fixed boundary slots
// eliminated: every parameter vector maps to a trajectory that satisfies
// them identically.
class BasisMap {
 public:
  BasisMap(const Problem& p, int degree) : degree_(degree), a_(p.a), b_(p.b) {
    p.validate();
    if (degree < 2 * p.n - 1) {
      throw DegreeTooLow("degree " + std::to_string(degree) +
                         " cannot meet order-" + std::to_string(p.n) +
                         " boundary data; need at least " +
                         std::to_string(2 * p.n - 1));
    }
    const int cols = degree + 1;
    detail::Matrix rows;
    std::vector<double> rhs;
    const double width = p.b - p.a;
    for (Endpoint ep : {Endpoint::A, Endpoint::B}) {
      const double s0 = ep == Endpoint::A ? 0.0 : 1.0;
      const auto& bc = p.bc(ep);
      for (int k = 0; k < p.n; ++k) {
        if (!bc[static_cast<std::size_t>(k)]) continue;
        std::vector<double> row(static_cast<std::size_t>(cols), 0.0);
        for (int i = k; i <= degree; ++i) {
          const double base = i == k ? 1.0 : std::pow(s0, i - k);
          row[static_cast<std::size_t>(i)] =
              detail::falling_factorial(i, k) * base;
        }
        rows.push_back(std::move(row));
        rhs.push_back(*bc[static_cast<std::size_t>(k)] * std::pow(width, k));
      }
    }
    if (static_cast<int>(rows.size()) > cols) {
      throw DegreeTooLow("degree " + std::to_string(degree) + " gives " +
                         std::to_string(cols) + " coefficients for " +
                         std::to_string(rows.size()) + " boundary constraints");
    }
    if (rows.empty()) {
      particular_.assign(static_cast<std::size_t>(cols), 0.0);
      for (int i = 0; i < cols; ++i) {
        std::vector<double> v(static_cast<std::size_t>(cols), 0.0);
        v[static_cast<std::size_t>(i)] = 1.0;
        null_basis_.push_back(std::move(v));
      }
      return;
    }
    detail::AffineSolution sol = detail::solve_affine(std::move(rows), std::move(rhs));
    particular_ = std::move(sol.particular);
    null_basis_ = std::move(sol.nullspace);
  }

  int degree() const { return degree_; }
  int param_count() const { return static_cast<int>(null_basis_.size()); }

  Trajectory make(std::span<const double> params) const {
    if (static_cast<int>(params.size()) != param_count()) {
      throw InputError("expected " + std::to_string(param_count()) +
                       " parameters, got " + std::to_string(params.size()));
    }
    std::vector<double> coeffs = particular_;
    for (std::size_t q = 0; q < null_basis_.size(); ++q) {
      for (std::size_t i = 0; i < coeffs.size(); ++i) {
        coeffs[i] += params[q] * null_basis_[q][i];
      }
    }
    return Trajectory::polynomial(std::move(coeffs), a_, b_);
  }

 private:
  int degree_;
  double a_;
  double b_;
  std::vector<double> particular_;
  std::vector<std::vector<double>> null_basis_;
};

inline BasisMap constrained_basis(const Problem& p, int degree) {
  return BasisMap(p, degree);
}

}  // namespace herglotz
