#pragma once

#include <stdexcept>
#include <string>

namespace qrf {

// Bad input to a library call (out-of-range qubit, malformed feature vector, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Requested circuit or register does not fit the simulator's qubit cap.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A gate or template that the requested operation cannot handle.
class UnsupportedOperation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Gradient descent produced a non-finite value.
class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Experiment config or checkpoint problems (missing key, bad value, version mismatch).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedVersion : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

namespace detail {

[[noreturn]] inline void throw_invalid(const std::string& what) { throw InvalidArgument(what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

}  // namespace detail
}  // namespace qrf
