#pragma once

#include <stdexcept>
#include <string>

namespace gbct {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text (CSV cells, ragged rows).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Argument outside its documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input is well-formed but cannot be clustered as requested, e.g. every ball
/// is noise or the requested K cannot be reached.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

}  // namespace gbct
