#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace covert_fbl {

/// Argument outside the domain of an operation (maps to CLI exit code 1).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Base for every numerical failure (maps to CLI exit code 2).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, std::size_t iterations)
      : NumericalError(what + " (after " + std::to_string(iterations) + " iterations)"),
        iterations_(iterations) {}
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::size_t iterations_;
};

class BracketError : public NumericalError {
 public:
  BracketError(const std::string& what, double lo, double hi)
      : NumericalError(what), lo_(lo), hi_(hi) {}
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

class ToleranceError : public NumericalError {
 public:
  ToleranceError(const std::string& what, double best)
      : NumericalError(what), best_(best) {}
  double best_iterate() const noexcept { return best_; }

 private:
  double best_;
};

class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InstabilityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class FitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace covert_fbl
