#pragma once

#include <stdexcept>
#include <string>

namespace stowardrop {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structural or invariant violation in user input (scenario, network, distribution).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class NoPathExists : public Error {
 public:
  using Error::Error;
};

// A raw moment was requested beyond what a distribution can supply.
class MomentUnavailable : public Error {
 public:
  using Error::Error;
};

// Every expected cost is zero, so relative quantities are undefined.
class DegenerateCost : public Error {
 public:
  using Error::Error;
};

// A closed-form bound's applicability condition does not hold.
class NotApplicable : public Error {
 public:
  using Error::Error;
};

// lambda(x) is undefined for a cost with no positive coefficient of degree >= 1.
class ConstantCost : public Error {
 public:
  using Error::Error;
};

}  // namespace stowardrop
