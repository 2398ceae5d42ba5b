#pragma once

#include <stdexcept>
#include <string>

namespace hs {

/// Integer capacity of a fixed-width representation was exceeded.
class CapacityError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Joint diagonalisation could not separate eigenspaces; retry with another seed.
class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lattice enumeration exceeded its point budget.
class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& what, long long visited)
      : std::runtime_error(what), visited_(visited) {}
  long long visited() const noexcept { return visited_; }

 private:
  long long visited_;
};

/// A computed identity that must hold did not.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace hs
