#pragma once

#include <stdexcept>
#include <string>

namespace gpisos {

// Mismatched shapes, rings or malformed inputs.
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A configured budget (pairings, basis size, ...) would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gpisos
