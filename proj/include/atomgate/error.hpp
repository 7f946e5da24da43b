#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace atomgate {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value lies outside the domain an operation is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A LatticeSpec (or another composite value) breaks one or more invariants.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// A requested quantity was not accumulated for this run.
class UnavailableError : public Error {
 public:
  using Error::Error;
};

/// The truncated Fock basis is too small for the requested propagation.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, int suggested_n_max)
      : Error(what), suggested_n_max_(suggested_n_max) {}
  int suggested_n_max() const noexcept { return suggested_n_max_; }

 private:
  int suggested_n_max_;
};

/// Configuration text failed to parse or resolve. Carries every problem found.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// Output could not be written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace atomgate
