#pragma once

#include <stdexcept>
#include <string>

namespace uwbnlos {

// Root of every error thrown by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// CSV header or document structure does not match the expected layout.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A field could not be parsed as the expected type.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A parsed value violates a record invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Mathematical precondition violated (log of zero, negative time, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Operation called on an object in the wrong state (e.g. untuned classifier).
class StateError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class VersionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace uwbnlos
