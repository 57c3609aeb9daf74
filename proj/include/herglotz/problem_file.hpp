#pragma once

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "herglotz/expr_text.hpp"
#include "herglotz/problem.hpp"

// Problem file format, one `key: value` pair per line:
//
//   # comment lines and blank lines are ignored
//   n: 2                       derivative order of the Lagrangian
//   interval: 0 1              the endpoints a b, a < b
//   lagrangian: D2x^2 + z^2    expression over t, z, x, D1x..Dnx
//   z0: 0.5                    initial state z(a)
//   goal: min                  min (default) or max
//   bc: x(a) = 0               pins x^(k) at an endpoint; omitted slots
//   bc: D1x(b) = 1             are free and get natural conditions
//
// Unknown keys, malformed values, duplicate assignments and out-of-range
// derivative orders are rejected with the offending line number.

namespace herglotz {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline double parse_real_field(std::string_view s, int line, const std::string& what) {
  s = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ProblemFileError(line, "expected a real number for " + what +
                                     ", got '" + std::string(s) + "'");
  }
  return v;
}

inline int parse_int_field(std::string_view s, int line, const std::string& what) {
  s = trim(s);
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ProblemFileError(line, "expected an integer for " + what + ", got '" +
                                     std::string(s) + "'");
  }
  return v;
}

struct BcLine {
  int k = 0;
  Endpoint ep = Endpoint::A;
  double value = 0.0;
  int line = 0;
};

// `x(a) = 0` or `D<k>x(b) = <real>`
inline BcLine parse_bc(std::string_view s, int line) {
  BcLine bc;
  bc.line = line;
  s = trim(s);

  std::size_t i = 0;
  if (i < s.size() && s[i] == 'D') {
    ++i;
    std::size_t d0 = i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
    if (d0 == i || i >= s.size() || s[i] != 'x') {
      throw ProblemFileError(line, "bad boundary slot; expected x or D<k>x");
    }
    int k = 0;
    std::from_chars(s.data() + d0, s.data() + i, k);
    if (k < 1) {
      throw ProblemFileError(line, "derivative slots are written D1x, D2x, ...; "
                                   "use plain x for the value slot");
    }
    bc.k = k;
    ++i;
  } else if (i < s.size() && s[i] == 'x') {
    bc.k = 0;
    ++i;
  } else {
    throw ProblemFileError(line, "bad boundary slot; expected x or D<k>x");
  }

  auto expect = [&](char c) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    if (i >= s.size() || s[i] != c) {
      throw ProblemFileError(line, std::string("expected '") + c +
                                       "' in boundary condition");
    }
    ++i;
  };

  expect('(');
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  if (i < s.size() && (s[i] == 'a' || s[i] == 'b')) {
    bc.ep = s[i] == 'a' ? Endpoint::A : Endpoint::B;
    ++i;
  } else {
    throw ProblemFileError(line, "boundary endpoint must be a or b");
  }
  expect(')');
  expect('=');
  bc.value = parse_real_field(s.substr(i), line, "the boundary value");
  return bc;
}

}  // namespace detail

inline Problem load_problem_text(std::string_view text) {
  std::optional<int> n;
  std::optional<double> a, b, gamma;
  std::optional<Expr> lagrangian;
  std::optional<Goal> goal;
  int n_line = 0, interval_line = 0, lagrangian_line = 0;
  std::vector<detail::BcLine> bcs;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    const std::size_t hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = detail::trim(raw);
    if (raw.empty()) continue;

    const std::size_t colon = raw.find(':');
    if (colon == std::string_view::npos) {
      throw ProblemFileError(line_no, "expected 'key: value'");
    }
    const std::string_view key = detail::trim(raw.substr(0, colon));
    const std::string_view value = detail::trim(raw.substr(colon + 1));

    if (key == "n") {
      if (n) throw ProblemFileError(line_no, "duplicate key 'n'");
      n = detail::parse_int_field(value, line_no, "n");
      n_line = line_no;
    } else if (key == "interval") {
      if (a) throw ProblemFileError(line_no, "duplicate key 'interval'");
      std::size_t split = value.find_first_of(" \t");
      if (split == std::string_view::npos) {
        throw ProblemFileError(line_no, "interval needs two endpoints");
      }
      a = detail::parse_real_field(value.substr(0, split), line_no, "interval start");
      b = detail::parse_real_field(value.substr(split), line_no, "interval end");
      interval_line = line_no;
    } else if (key == "lagrangian") {
      if (lagrangian) throw ProblemFileError(line_no, "duplicate key 'lagrangian'");
      try {
        lagrangian = parse(value);
      } catch (const InputError& e) {
        throw ProblemFileError(line_no, e.what());
      }
      lagrangian_line = line_no;
    } else if (key == "z0") {
      if (gamma) throw ProblemFileError(line_no, "duplicate key 'z0'");
      gamma = detail::parse_real_field(value, line_no, "z0");
    } else if (key == "goal") {
      if (goal) throw ProblemFileError(line_no, "duplicate key 'goal'");
      if (value == "min") {
        goal = Goal::Minimize;
      } else if (value == "max") {
        goal = Goal::Maximize;
      } else {
        throw ProblemFileError(line_no, "goal must be min or max");
      }
    } else if (key == "bc") {
      bcs.push_back(detail::parse_bc(value, line_no));
    } else {
      throw ProblemFileError(line_no, "unknown key '" + std::string(key) + "'");
    }
  }

  if (!n) throw ProblemFileError(line_no, "missing key 'n'");
  if (!a) throw ProblemFileError(line_no, "missing key 'interval'");
  if (!lagrangian) throw ProblemFileError(line_no, "missing key 'lagrangian'");
  if (!gamma) throw ProblemFileError(line_no, "missing key 'z0'");

  if (*n < 1) throw ProblemFileError(n_line, "n must be at least 1");
  if (*n > 9) throw ProblemFileError(n_line, "n must be at most 9");
  if (!(*a < *b)) throw ProblemFileError(interval_line, "interval needs a < b");

  std::vector<std::optional<double>> bc_a(static_cast<std::size_t>(*n));
  std::vector<std::optional<double>> bc_b(static_cast<std::size_t>(*n));
  for (const auto& bc : bcs) {
    if (bc.k < 0 || bc.k >= *n) {
      const std::string slot_name =
          bc.k == 0 ? "x" : "D" + std::to_string(bc.k) + "x";
      throw ProblemFileError(bc.line, "boundary slot " + slot_name +
                                          " outside orders 0.." +
                                          std::to_string(*n - 1));
    }
    auto& list = bc.ep == Endpoint::A ? bc_a : bc_b;
    auto& slot = list[static_cast<std::size_t>(bc.k)];
    if (slot) {
      throw ProblemFileError(bc.line, "duplicate boundary condition for this slot");
    }
    slot = bc.value;
  }

  try {
    return Problem::make(*n, *a, *b, std::move(*lagrangian), *gamma,
                         std::move(bc_a), std::move(bc_b),
                         goal.value_or(Goal::Minimize));
  } catch (const OrderMismatch& e) {
    throw ProblemFileError(lagrangian_line, e.what());
  }
}

inline Problem load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open problem file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_problem_text(buf.str());
}

}  // namespace herglotz
