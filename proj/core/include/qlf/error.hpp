#pragma once

#include <stdexcept>
#include <string>

namespace qlf {

// Argument outside the mathematical domain of an operation (pole, w <= 0, even
// modulus where an odd one is required, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Requested accuracy cannot be met in double precision.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double floor)
      : std::runtime_error(what), floor_(floor) {}
  double floor() const noexcept { return floor_; }

 private:
  double floor_;
};

// Parameter combination (window, epsilon) that the error budget cannot honour.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Internal bookkeeping went wrong, e.g. an S-table entry that should exist.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qlf
