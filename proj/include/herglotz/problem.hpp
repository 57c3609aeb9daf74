#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "herglotz/expr.hpp"

namespace herglotz {

enum class Goal { Minimize, Maximize };
enum class Endpoint { A, B };

inline const char* endpoint_name(Endpoint ep) {
  return ep == Endpoint::A ? "a" : "b";
}

// A variational problem of Herglotz type of order n on [a, b]:
//
//   zdot(t) = L(t, x(t), x'(t), ..., x^(n)(t), z(t)),   z(a) = gamma,
//
// extremize z(b) over trajectories x subject to the boundary data. Each
// slot k in 0..n-1 pins x^(k) at an endpoint to a value, or is free; a
// free slot contributes a natural boundary condition instead.
struct Problem {
  int n = 1;
  double a = 0.0;
  double b = 1.0;
  Expr lagrangian;
  double gamma = 0.0;
  std::vector<std::optional<double>> bc_a;
  std::vector<std::optional<double>> bc_b;
  Goal goal = Goal::Minimize;

  static Problem make(int n, double a, double b, Expr lagrangian, double gamma,
                      std::vector<std::optional<double>> bc_a,
                      std::vector<std::optional<double>> bc_b,
                      Goal goal = Goal::Minimize) {
    Problem p;
    p.n = n;
    p.a = a;
    p.b = b;
    p.lagrangian = std::move(lagrangian);
    p.gamma = gamma;
    p.bc_a = std::move(bc_a);
    p.bc_b = std::move(bc_b);
    p.goal = goal;
    p.validate();
    return p;
  }

  void validate() const {
    if (n < 1) throw InputError("order n must be at least 1");
    if (!(a < b)) throw InputError("interval needs a < b");
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(gamma)) {
      throw InputError("interval endpoints and z(a) must be finite");
    }
    if (lagrangian.empty()) throw InputError("missing lagrangian");
    const int m = max_jet_order(lagrangian);
    if (m > n) {
      throw OrderMismatch("lagrangian references derivative order " +
                          std::to_string(m) + " above n = " + std::to_string(n));
    }
    if (static_cast<int>(bc_a.size()) != n || static_cast<int>(bc_b.size()) != n) {
      throw InputError("boundary slot lists must have length n");
    }
    for (const auto& list : {bc_a, bc_b}) {
      for (const auto& slot : list) {
        if (slot && !std::isfinite(*slot)) {
          throw InputError("boundary values must be finite");
        }
      }
    }
  }

  const std::vector<std::optional<double>>& bc(Endpoint ep) const {
    return ep == Endpoint::A ? bc_a : bc_b;
  }

  int fixed_count() const {
    int c = 0;
    for (const auto& s : bc_a) c += s.has_value();
    for (const auto& s : bc_b) c += s.has_value();
    return c;
  }

  bool all_a_fixed() const {
    for (const auto& s : bc_a) {
      if (!s) return false;
    }
    return true;
  }
};

}  // namespace herglotz
