#pragma once

#include <stdexcept>
#include <string>

namespace preflight {

/// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration text.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Configuration keys missing, unknown, or of the wrong type.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A configuration entry names a finish, patch, string or material that does not exist.
class ReferenceError : public Error {
 public:
  ReferenceError(const std::string& kind, const std::string& name)
      : Error("unknown " + kind + " '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Argument outside the domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Integration or eigen-solve failed to settle.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Output could not be written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace preflight
