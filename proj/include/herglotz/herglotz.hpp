#pragma once

#include "herglotz/errors.hpp"
#include "herglotz/expr.hpp"
#include "herglotz/expr_text.hpp"
#include "herglotz/functional.hpp"
#include "herglotz/optimality.hpp"
#include "herglotz/problem.hpp"
#include "herglotz/problem_file.hpp"
#include "herglotz/reference_problems.hpp"
#include "herglotz/solution_io.hpp"
#include "herglotz/solvers.hpp"
#include "herglotz/trajectory.hpp"
