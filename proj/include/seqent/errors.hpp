#pragma once

#include <stdexcept>
#include <string>

namespace seqent {

// Raised when an exact enumeration or an arithmetic range would exceed its
// configured limit. Callers that produce profiles turn this into truncation.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact set-cover search refused because the reduced instance is larger than
// the branch-and-bound budget. Greedy mode is the documented fallback.
class ExactBudgetError : public CapacityError {
 public:
  using CapacityError::CapacityError;
};

// Malformed user input: bad patterns, inconsistent dimensions, unknown kinds.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace seqent
