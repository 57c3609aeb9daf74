#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "herglotz/errors.hpp"

// Dense solvers for the tiny systems that show up here: shooting Newton
// steps (n x n with n <= 3) and boundary constraint elimination for the
// Ritz basis (at most 2n rows). Partial pivoting throughout.

namespace herglotz::detail {

using Matrix = std::vector<std::vector<double>>;

// Solves the square system A x = b in place.
inline std::vector<double> solve_linear(Matrix a, std::vector<double> b) {
  const std::size_t n = a.size();
  for (const auto& row : a) {
    if (row.size() != n) throw Error("solve_linear needs a square matrix");
  }
  if (b.size() != n) throw Error("solve_linear dimension mismatch");

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-14) {
      throw SolveError("singular linear system");
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

struct AffineSolution {
  std::vector<double> particular;
  std::vector<std::vector<double>> nullspace;
};

// General solution of a consistent underdetermined system A x = b as a
// particular solution plus a nullspace basis, via Gauss-Jordan with
// partial pivoting.
inline AffineSolution solve_affine(Matrix a, std::vector<double> b) {
  const std::size_t rows = a.size();
  if (b.size() != rows) throw Error("solve_affine dimension mismatch");
  const std::size_t cols = rows == 0 ? 0 : a[0].size();
  for (const auto& row : a) {
    if (row.size() != cols) throw Error("solve_affine needs a rectangular matrix");
  }

  double scale = 1.0;
  for (const auto& row : a) {
    for (double v : row) scale = std::max(scale, std::abs(v));
  }
  const double tol = 1e-12 * scale;

  std::vector<std::size_t> pivot_col_of_row;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t pivot = rank;
    for (std::size_t r = rank + 1; r < rows; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) <= tol) continue;
    std::swap(a[rank], a[pivot]);
    std::swap(b[rank], b[pivot]);
    const double d = a[rank][col];
    for (std::size_t c = 0; c < cols; ++c) a[rank][c] /= d;
    b[rank] /= d;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank) continue;
      const double f = a[r][col];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < cols; ++c) a[r][c] -= f * a[rank][c];
      b[r] -= f * b[rank];
    }
    pivot_col_of_row.push_back(col);
    ++rank;
  }

  for (std::size_t r = rank; r < rows; ++r) {
    if (std::abs(b[r]) > tol) {
      throw SolveError("inconsistent linear constraints");
    }
  }

  std::vector<bool> is_pivot(cols, false);
  for (std::size_t c : pivot_col_of_row) is_pivot[c] = true;

  AffineSolution out;
  out.particular.assign(cols, 0.0);
  for (std::size_t r = 0; r < rank; ++r) {
    out.particular[pivot_col_of_row[r]] = b[r];
  }
  for (std::size_t free_col = 0; free_col < cols; ++free_col) {
    if (is_pivot[free_col]) continue;
    std::vector<double> v(cols, 0.0);
    v[free_col] = 1.0;
    for (std::size_t r = 0; r < rank; ++r) {
      v[pivot_col_of_row[r]] = -a[r][free_col];
    }
    out.nullspace.push_back(std::move(v));
  }
  return out;
}

}  // namespace herglotz::detail
