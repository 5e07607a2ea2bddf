#pragma once

#include <stdexcept>
#include <string>

namespace semioscope {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed data: invalid distributions, bad records, broken invariants.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Parameter outside its documented domain (negative tolerance, p > 1, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Dimension mismatch between objects that must agree in shape.
class ShapeError : public Error {
public:
  using Error::Error;
};

/// Operating-system level read/write failure (cannot open, cannot write).
class IoError : public Error {
public:
  using Error::Error;
};

} // namespace semioscope
