#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qsde {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands whose Hilbert-space dimensions or channel counts disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A parameter outside its admissible domain (dt <= 0, non-unitary U, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Failure in the middle of an integration; carries the offending step.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, std::size_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace qsde
