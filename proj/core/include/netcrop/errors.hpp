#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netcrop {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed external input (edge lists, config files).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Node id or index outside its admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A parameter outside the domain of the operation (bad alpha, d = 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// No feasible (overlap, subnetwork count) pair for the requested test fraction.
class PlanningError : public Error {
 public:
  using Error::Error;
};

/// Brute-force matching requested for too many communities.
class ComplexityError : public Error {
 public:
  using Error::Error;
};

/// Iterative eigensolver failed to reach the residual target.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double achieved_residual);
  double achieved_residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Non-finite values encountered during optimization.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::size_t iteration);
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

/// Internal bookkeeping violated (for example test blocks not covering the test set).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace netcrop
