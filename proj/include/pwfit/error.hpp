#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pwfit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates an operation's precondition (sizes, dimensions, indices).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Edge labeling does not describe a partition of the grid.
class InfeasibleLabeling : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

// The solver reported a failure; the message carries its diagnostics.
class BackendError : public Error {
 public:
  using Error::Error;
};

}  // namespace pwfit
