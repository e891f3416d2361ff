#pragma once

#include <stdexcept>
#include <string>

namespace gaugeopt {

// Caller violated a documented precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical kernel or membership oracle could not produce a certified answer.
class OracleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateBisection : public OracleFailure {
 public:
  using OracleFailure::OracleFailure;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace gaugeopt
