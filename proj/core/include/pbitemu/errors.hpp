#pragma once

#include <stdexcept>
#include <string>

namespace pbitemu {

// Malformed input: bad formats, unknown terminals, schema violations.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A value that has no exact representation in the requested fixed-point format.
class NotRepresentableError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Exact enumeration refused because the free state space is too large.
class BudgetExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pbitemu
