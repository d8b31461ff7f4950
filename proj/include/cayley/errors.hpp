#pragma once

#include <stdexcept>

namespace cayley {

// An exact enumeration would exceed its desk-scale size guard.
class capacity_error : public std::length_error {
 public:
  using std::length_error::length_error;
};

// A documented precondition of an operation does not hold for its inputs.
class precondition_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Parameters are malformed (non-finite, non-positive, missing keys).
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace cayley
