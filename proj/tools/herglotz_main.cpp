// Command line front end: derive optimality conditions, solve problems,
// check solution files, and re-run the bundled benchmark problems.
//
// Exit codes: 0 success, 2 bad input, 3 solver failure, 4 divergence or
// boundary data the requested method cannot handle.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "herglotz/herglotz.hpp"

namespace {

using namespace herglotz;

std::string fmt(double v) { return detail::format_full(v); }

struct SolveFlags {
  std::string problem_path;
  std::string method = "shooting";
  std::string csv_path;
  int steps = 1000;
  int degree = 0;
  double tol = 0.0;
};

void print_solution_report(const Solution& sol, const std::string& suffix) {
  std::cout << "z_b" << suffix << " = " << fmt(sol.z_b) << "\n";
  std::cout << "iterations" << suffix << " = " << sol.iterations << "\n";
  std::cout << "el_max_abs" << suffix << " = " << fmt(sol.el_max_abs) << "\n";
  std::cout << "el_rms" << suffix << " = " << fmt(sol.el_rms) << "\n";
  std::cout << "bc_residual_max" << suffix << " = " << fmt(sol.bc_residual_max)
            << "\n";
  for (const auto& [slot, value] : sol.nbc_residuals) {
    std::cout << "nbc_" << endpoint_name(slot.first) << "_k" << slot.second
              << suffix << " = " << fmt(value) << "\n";
  }
  if (sol.warnings.empty()) {
    std::cout << "warnings" << suffix << " = none\n";
  } else {
    std::string joined;
    for (const auto& w : sol.warnings) {
      if (!joined.empty()) joined += "; ";
      joined += w;
    }
    std::cout << "warnings" << suffix << " = " << joined << "\n";
  }
}

void write_csv_file(const std::string& path, const Problem& p,
                    const Solution& sol) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write CSV file '" + path + "'");
  write_solution_csv(out, p, sol);
  if (!out) throw InputError("failed while writing CSV file '" + path + "'");
}

int cmd_derive(const std::string& path) {
  const Problem p = load_problem(path);
  const OptimalitySystem sys = derive_system(p);
  std::cout << "n = " << p.n << "\n";
  std::cout << "el: " << print(sys.el) << " = 0\n";
  for (Endpoint ep : {Endpoint::A, Endpoint::B}) {
    const auto& bc = p.bc(ep);
    const auto& nbc = ep == Endpoint::A ? sys.nbc_a : sys.nbc_b;
    for (int k = 0; k < p.n; ++k) {
      if (bc[static_cast<std::size_t>(k)]) continue;
      std::cout << "nbc " << endpoint_name(ep) << " k=" << k << ": "
                << print(nbc.at(k)) << " = 0\n";
    }
  }
  return 0;
}

int cmd_solve(const SolveFlags& flags) {
  const Problem p = load_problem(flags.problem_path);

  ShootingOptions shoot_opts;
  shoot_opts.steps = flags.steps;
  if (flags.tol > 0) shoot_opts.newton_tol = flags.tol;

  DirectOptions direct_opts;
  direct_opts.steps = flags.steps;
  direct_opts.degree = flags.degree;
  if (flags.tol > 0) direct_opts.converge_tol = flags.tol;

  if (flags.method == "shooting" || flags.method == "direct") {
    const Solution sol = flags.method == "shooting"
                             ? solve_shooting(p, shoot_opts)
                             : solve_direct(p, direct_opts);
    std::cout << "method = " << sol.method << "\n";
    std::cout << "status = ok\n";
    print_solution_report(sol, "");
    if (!flags.csv_path.empty()) {
      write_csv_file(flags.csv_path, p, sol);
      std::cout << "csv = " << flags.csv_path << "\n";
    }
    return 0;
  }

  if (flags.method != "both") {
    throw InputError("method must be shooting, direct or both");
  }

  // The direct method accepts every configuration, so when shooting
  // rejects the boundary layout the comparison degrades gracefully.
  bool have_shot = false;
  Solution shot;
  try {
    shot = solve_shooting(p, shoot_opts);
    have_shot = true;
  } catch (const IllPosedBoundary& e) {
    std::cout << "note = " << e.what() << "\n";
  }
  const Solution direct = solve_direct(p, direct_opts);

  std::cout << "method = both\n";
  std::cout << "status = ok\n";
  if (have_shot) {
    print_solution_report(shot, "_shooting");
    print_solution_report(direct, "_direct");
    const CrossValidation cv = cross_validate(p, shot, direct);
    std::cout << "z_b_diff = " << fmt(cv.z_b_diff) << "\n";
    std::cout << "max_trajectory_dev = " << fmt(cv.max_trajectory_dev) << "\n";
  } else {
    print_solution_report(direct, "_direct");
  }
  if (!flags.csv_path.empty()) {
    write_csv_file(flags.csv_path, p, have_shot ? shot : direct);
    std::cout << "csv = " << flags.csv_path << "\n";
  }
  return 0;
}

int cmd_check(const std::string& problem_path, const std::string& csv_path) {
  const Problem p = load_problem(problem_path);
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw InputError("cannot open CSV file '" + csv_path + "'");
  const CsvSolution csv = read_solution_csv(in, p.n);

  const Trajectory x = csv.trajectory();
  const ZPath zp = csv.zpath();
  const OptimalitySystem sys = derive_system(p);
  const ResidualStats stats = residual_stats(sys, x, zp, csv.grid);

  std::cout << "rows = " << csv.grid.size() << "\n";
  std::cout << "el_max_abs = " << fmt(stats.max_abs) << "\n";
  std::cout << "el_rms = " << fmt(stats.rms) << "\n";
  for (Endpoint ep : {Endpoint::A, Endpoint::B}) {
    const auto& bc = p.bc(ep);
    const double t = ep == Endpoint::A ? p.a : p.b;
    for (int k = 0; k < p.n; ++k) {
      if (!bc[static_cast<std::size_t>(k)]) continue;
      const double mismatch =
          std::abs(x.eval_deriv(k, t) - *bc[static_cast<std::size_t>(k)]);
      std::cout << "bc_" << endpoint_name(ep) << "_k" << k << " = "
                << fmt(mismatch) << "\n";
    }
  }
  const auto nbc = detail::free_slot_residuals(p, sys, x, zp);
  for (const auto& [slot, value] : nbc) {
    std::cout << "nbc_" << endpoint_name(slot.first) << "_k" << slot.second
              << " = " << fmt(value) << "\n";
  }
  return 0;
}

struct ReproduceCase {
  std::string label;
  std::string expected;
  std::string computed;
  bool pass = false;
};

ReproduceCase run_case_value(const std::string& label, const Problem& p,
                             double expected, double tol, int steps) {
  ReproduceCase c;
  c.label = label;
  c.expected = fmt(expected);
  ShootingOptions opts;
  opts.steps = steps;
  try {
    const Solution sol = solve_shooting(p, opts);
    c.computed = fmt(sol.z_b);
    c.pass = std::abs(sol.z_b - expected) <= tol;
  } catch (const Error& e) {
    c.computed = std::string("error: ") + e.what();
  }
  return c;
}

int cmd_reproduce() {
  std::vector<ReproduceCase> cases;

  cases.push_back(
      run_case_value("1", examples::example1(), 1.0, 1e-6, 1000));

  // The gamma sweep sits close to the divergence boundary, so it gets a
  // finer grid than the default.
  cases.push_back(
      run_case_value("2 gamma=0.9", examples::example2(0.9), 9.0, 1e-6, 20000));
  cases.push_back(run_case_value("2 gamma=0.99", examples::example2(0.99),
                                 99.0, 1e-6, 20000));
  {
    ReproduceCase c;
    c.label = "2 gamma=1.01";
    c.expected = "blow-up in (0.985, 0.995)";
    ShootingOptions opts;
    opts.steps = 20000;
    try {
      const Solution sol = solve_shooting(examples::example2(1.01), opts);
      c.computed = "z_b = " + fmt(sol.z_b);
    } catch (const BlowUp& e) {
      c.computed = "blow-up at t = " + fmt(e.time);
      c.pass = e.time > 0.985 && e.time < 0.995;
    } catch (const Error& e) {
      c.computed = std::string("error: ") + e.what();
    }
    cases.push_back(c);
  }

  cases.push_back(run_case_value("3", examples::example3(),
                                 examples::ex3::z_b(), 1e-4, 1000));
  cases.push_back(run_case_value("4", examples::example4(), std::exp(1.0),
                                 1e-6, 1000));

  std::size_t label_w = 12, expected_w = 16;
  for (const auto& c : cases) {
    label_w = std::max(label_w, c.label.size() + 2);
    expected_w = std::max(expected_w, c.expected.size() + 2);
  }
  std::cout << std::left << std::setw(static_cast<int>(label_w)) << "case"
            << std::setw(static_cast<int>(expected_w)) << "expected"
            << "computed\n";
  bool all_pass = true;
  for (const auto& c : cases) {
    std::cout << std::left << std::setw(static_cast<int>(label_w)) << c.label
              << std::setw(static_cast<int>(expected_w)) << c.expected
              << c.computed << (c.pass ? "  [ok]" : "  [FAIL]") << "\n";
    all_pass = all_pass && c.pass;
  }
  std::cout << "reproduce = " << (all_pass ? "pass" : "fail") << "\n";
  return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Derives and solves higher-order variational problems of Herglotz "
      "type: zdot = L(t, x, ..., x^(n), z) with z(b) extremized."};
  app.require_subcommand(1);

  std::string derive_path;
  CLI::App* derive = app.add_subcommand(
      "derive", "Print the Euler-Lagrange equation and the natural boundary "
                "conditions of the free slots");
  derive->add_option("problem", derive_path, "problem file")->required();

  SolveFlags solve_flags;
  CLI::App* solve = app.add_subcommand("solve", "Solve a problem numerically");
  solve->add_option("problem", solve_flags.problem_path, "problem file")
      ->required();
  solve->add_option("--method", solve_flags.method,
                    "shooting, direct, or both (cross-validated)")
      ->check(CLI::IsMember({"shooting", "direct", "both"}));
  solve->add_option("--csv", solve_flags.csv_path,
                    "write the solution samples to this file");
  solve->add_option("--steps", solve_flags.steps, "integration steps")
      ->check(CLI::Range(10, 100000000));
  solve->add_option("--degree", solve_flags.degree,
                    "Ritz polynomial degree for the direct method "
                    "(default 2n+3)");
  solve->add_option("--tol", solve_flags.tol, "solver tolerance override");

  std::string check_problem, check_csv;
  CLI::App* check = app.add_subcommand(
      "check", "Recompute residuals for a solution CSV against a problem");
  check->add_option("problem", check_problem, "problem file")->required();
  check->add_option("--csv", check_csv, "solution CSV to check")->required();

  app.add_subcommand("reproduce",
                     "Re-run the bundled benchmark problems and compare "
                     "against their closed-form values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (derive->parsed()) return cmd_derive(derive_path);
    if (solve->parsed()) return cmd_solve(solve_flags);
    if (check->parsed()) return cmd_check(check_problem, check_csv);
    return cmd_reproduce();
  } catch (const BlowUp& e) {
    std::cout << "status = blow-up\n";
    std::cout << "blow_up_t = " << fmt(e.time) << "\n";
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const IllPosedBoundary& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
