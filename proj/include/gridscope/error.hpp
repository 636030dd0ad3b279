#pragma once

#include <stdexcept>
#include <string>

namespace gridscope {

// Base of every error raised by the library. The CLI maps ParseError to exit
// code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value is outside its documented domain (bad coordinate, empty owner, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A document (XML, JSON, N-Quads, pattern text) could not be read.
class ParseError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Uniqueness violated: duplicate id, vpath, replica, membership.
class ConflictError : public Error {
 public:
  using Error::Error;
};

// Illegal transition in a state machine.
class StateError : public Error {
 public:
  using Error::Error;
};

}  // namespace gridscope
