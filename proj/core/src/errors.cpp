#include "netcrop/errors.hpp"

namespace netcrop {

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

SolverError::SolverError(const std::string& what, double achieved_residual)
    : Error(what + " (achieved residual " + std::to_string(achieved_residual) + ")"),
      residual_(achieved_residual) {}

NumericalError::NumericalError(const std::string& what, std::size_t iteration)
    : Error(what + " at iteration " + std::to_string(iteration)), iteration_(iteration) {}

}  // namespace netcrop
