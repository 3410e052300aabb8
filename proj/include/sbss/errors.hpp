// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SBSS_ERRORS_HPP_
#define SBSS_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace sbss {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition of a numerical routine was not met by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class UnsupportedConfiguration : public Error {
 public:
  using Error::Error;
};

/// Raised when an iterate becomes non-finite.
class Diverged : public Error {
 public:
  Diverged(int iteration, const std::string& what)
      : Error("diverged at iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

/// Malformed or unreadable files, bad configuration values.
class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sbss

#endif  // SBSS_ERRORS_HPP_
