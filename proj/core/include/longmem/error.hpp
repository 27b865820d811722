#pragma once

#include <stdexcept>
#include <string>

namespace longmem {

// Parameter or input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// A numerical procedure broke down (non positive-definite Toeplitz system,
// zero-variance series, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Every particle received zero weight after the log-domain guard.
class TotalWeightUnderflow : public NumericalError {
 public:
  explicit TotalWeightUnderflow(const std::string& what) : NumericalError(what) {}
};

}  // namespace longmem
