#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rowdae {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A pivot fell below the singularity threshold during factorization.
class SingularMatrix : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

/// A right-hand side or stage produced NaN or Inf.
class NonFiniteState : public Error {
public:
  using Error::Error;
};

/// Adaptive step size dropped below the admissible minimum.
class StepUnderflow : public Error {
public:
  using Error::Error;
};

class MissingDenseCoefficients : public Error {
public:
  using Error::Error;
};

class MissingExactSolution : public Error {
public:
  using Error::Error;
};

class InconsistentInitialState : public Error {
public:
  using Error::Error;
};

/// Tableau text could not be parsed; carries the offending line.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// A coefficient matrix violates its triangular shape.
class ShapeError : public Error {
public:
  using Error::Error;
};

/// Coefficients are well-formed but violate a tableau invariant.
class InvariantError : public Error {
public:
  using Error::Error;
};

}  // namespace rowdae
