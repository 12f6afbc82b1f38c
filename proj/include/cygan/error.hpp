#pragma once

#include <stdexcept>
#include <string>

namespace cygan {

// Base of every error the library raises. The CLI maps ResourceError to exit
// code 3 and everything else to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (m = 0 for mobius,
// omega >= 1 inside a log, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Caller broke a documented precondition (table too small, bad grid, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// An intermediate would not fit the integer width the kernel uses.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Work or size limit of a deliberately bounded algorithm was exceeded.
class LimitError : public Error {
 public:
  using Error::Error;
};

// Object could not be built because its invariants fail.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

// A case the library recognises but does not handle.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Allocation failure or similar environment limit.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// Numerical diagnostic hit a non-finite value.
class DiagnosticError : public Error {
 public:
  DiagnosticError(const std::string& what, double where)
      : Error(what), x(where) {}
  double x;
};

}  // namespace cygan
