// SPDX-License-Identifier: Apache-2.0

#ifndef SEMLINK_ERRORS_HPP
#define SEMLINK_ERRORS_HPP

#include <stdexcept>

namespace semlink {

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Data violates an invariant that a previous stage should have established.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace semlink

#endif  // SEMLINK_ERRORS_HPP
