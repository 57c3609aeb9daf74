#pragma once

#include <charconv>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "herglotz/problem.hpp"
#include "herglotz/solvers.hpp"

// CSV exchange format for solutions. Columns, in order:
//
//   t, x, D1x, ..., D<2n-1>x, z, lambda, el_residual
//
// Every value is written with 17 significant digits, enough to read the
// exact double back.

namespace herglotz {

namespace detail {

inline std::string format_full(double v) {
  char buf[64];
  auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  if (ec != std::errc()) throw Error("number formatting failed");
  return std::string(buf, ptr);
}

}  // namespace detail

inline std::string csv_header(int n) {
  std::string h = "t,x";
  for (int k = 1; k < 2 * n; ++k) h += ",D" + std::to_string(k) + "x";
  h += ",z,lambda,el_residual";
  return h;
}

inline void write_solution_csv(std::ostream& os, const Problem& p,
                               const Solution& sol) {
  const int n = p.n;
  os << csv_header(n) << "\n";
  const auto& grid = sol.zpath.grid;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    os << detail::format_full(t);
    for (int k = 0; k < 2 * n; ++k) {
      os << ',' << detail::format_full(sol.trajectory.eval_deriv(k, t));
    }
    os << ',' << detail::format_full(sol.zpath.z_values[i]);
    os << ',' << detail::format_full(sol.lambdapath.lambda_values[i]);
    os << ',' << detail::format_full(i < sol.el_per_point.size()
                                         ? sol.el_per_point[i]
                                         : 0.0);
    os << "\n";
  }
}

struct CsvSolution {
  std::vector<double> grid;
  std::vector<std::vector<double>> states;  // orders 0..2n-1 per row
  std::vector<double> z;
  std::vector<double> lambda;
  std::vector<double> el_residual;

  Trajectory trajectory() const { return Trajectory::sampled(grid, states); }
  ZPath zpath() const { return ZPath{grid, z, z.back()}; }
};

inline CsvSolution read_solution_csv(std::istream& is, int n) {
  std::string line;
  if (!std::getline(is, line)) throw CsvError("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::string expected = csv_header(n);
  if (line != expected) {
    throw CsvError("CSV header mismatch: expected '" + expected + "', got '" +
                   line + "'");
  }

  const std::size_t fields = static_cast<std::size_t>(2 * n) + 4;
  CsvSolution out;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<double> values;
    values.reserve(fields);
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      const std::string_view cell =
          std::string_view(line).substr(pos, comma - pos);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
        throw CsvError("row " + std::to_string(row) + ": bad number '" +
                       std::string(cell) + "'");
      }
      values.push_back(v);
      pos = comma + 1;
      if (comma == line.size()) break;
    }
    if (values.size() != fields) {
      throw CsvError("row " + std::to_string(row) + ": expected " +
                     std::to_string(fields) + " fields, got " +
                     std::to_string(values.size()));
    }

    out.grid.push_back(values[0]);
    out.states.emplace_back(values.begin() + 1, values.begin() + 1 + 2 * n);
    out.z.push_back(values[static_cast<std::size_t>(2 * n) + 1]);
    out.lambda.push_back(values[static_cast<std::size_t>(2 * n) + 2]);
    out.el_residual.push_back(values[static_cast<std::size_t>(2 * n) + 3]);
  }
  if (out.grid.size() < 2) {
    throw CsvError("CSV needs at least two data rows");
  }
  return out;
}

}  // namespace herglotz
