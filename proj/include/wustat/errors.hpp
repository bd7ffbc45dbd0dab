#pragma once

#include <stdexcept>
#include <string>

namespace wustat {

/// A spec or config value is outside its documented range.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A call argument violates an operation precondition.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested quantity is undefined (infinite variance, r(2β−1) ≥ 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The operation does not support this combination of inputs.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A statistical fit has no information (zero variance, all-zero curve).
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wustat
