// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace rsum {

// Invalid model parameters, inconsistent inputs, precondition violations.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Base for failures where the numbers themselves cannot be certified.
// The CLI maps every NumericalError to exit status 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A requested moment or derivative does not exist or its tail cannot be bounded.
class MomentError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Panjer recursion with a * P(X = 0) too close to 1.
class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Division by a generating function value that is numerically zero.
class SingularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Integer overflow in exact combinatorics.
class OverflowError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Oracle truncation whose certified tail exceeds the requested tolerance.
class CertificationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace rsum
