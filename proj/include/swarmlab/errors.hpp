#pragma once

#include <stdexcept>
#include <string>

namespace swarmlab {

/// Input outside the domain of an operation (bad parameters, invalid shapes).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed: no bracket, non-convergence, step underflow.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two particles came closer than the configured minimum distance.
class GuardViolation : public NumericalError {
 public:
  GuardViolation(const std::string& what, std::size_t j, std::size_t l, double distance)
      : NumericalError(what), first(j), second(l), distance(distance) {}
  std::size_t first;
  std::size_t second;
  double distance;
};

}  // namespace swarmlab
