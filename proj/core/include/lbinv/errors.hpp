#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lbinv {

/// Shapes of two operands do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numeric parameter lies outside its admissible range.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative solver produced a non-finite iterate.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& solver, std::size_t iteration)
      : std::runtime_error(solver + ": non-finite iterate at iteration " +
                           std::to_string(iteration)),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

/// Supplied vectors are not subgradients (monotonicity of the subdifferential fails).
class SubgradientError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or truncated binary/text file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Preconditions of an experiment construction cannot be met.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lbinv
