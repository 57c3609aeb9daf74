#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace herglotz {

// Base class for everything thrown by this library. The CLI maps the
// subtrees onto exit codes: InputError -> 2, BlowUp and IllPosedBoundary
// -> 4, every other Error -> 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed user input: expression text, problem files, CSV data, options.
struct InputError : Error {
  using Error::Error;
};

// A solver gave up: no convergence, singular system, dead line search.
struct SolveError : Error {
  using Error::Error;
};

struct SyntaxError : InputError {
  std::size_t offset;
  std::string expected;

  SyntaxError(std::size_t off, std::string what_was_expected)
      : InputError("syntax error at offset " + std::to_string(off) +
                   ": expected " + what_was_expected),
        offset(off),
        expected(std::move(what_was_expected)) {}
};

struct UnknownIdentifier : InputError {
  std::string name;
  std::size_t offset;

  UnknownIdentifier(std::string ident, std::size_t off)
      : InputError("unknown identifier '" + ident + "' at offset " +
                   std::to_string(off)),
        name(std::move(ident)),
        offset(off) {}
};

struct ProblemFileError : InputError {
  int line;

  ProblemFileError(int line_number, const std::string& message)
      : InputError("line " + std::to_string(line_number) + ": " + message),
        line(line_number) {}
};

struct CsvError : InputError {
  using InputError::InputError;
};

// The Lagrangian references a derivative order above the declared n.
struct OrderMismatch : InputError {
  using InputError::InputError;
};

// Ritz basis degree too small for the boundary constraints.
struct DegreeTooLow : InputError {
  using InputError::InputError;
};

// Evaluation left the domain of a primitive: log of a nonpositive value,
// square root of a negative value, division by zero, 0 raised to a
// negative power, fractional power of a negative base.
struct DomainError : Error {
  using Error::Error;
};

// A jet was asked for a derivative order it does not carry.
struct MissingDerivative : Error {
  using Error::Error;
};

struct IndexError : Error {
  using Error::Error;
};

struct OutOfRange : Error {
  using Error::Error;
};

struct NoConvergence : SolveError {
  using SolveError::SolveError;
};

// The Euler-Lagrange equation could not be solved for the highest
// derivative: its partial with respect to that derivative vanished.
struct SingularEL : SolveError {
  using SolveError::SolveError;
};

// Gradient descent could not find a descending step.
struct NoDescent : SolveError {
  using SolveError::SolveError;
};

// Boundary data the shooting method cannot work with, e.g. a free slot
// at the initial endpoint. The direct method accepts these.
struct IllPosedBoundary : Error {
  using Error::Error;
};

// |z| crossed the divergence threshold during integration.
struct BlowUp : Error {
  double time;

  explicit BlowUp(double t)
      : Error("z blew up at t = " + std::to_string(t)), time(t) {}
};

}  // namespace herglotz
