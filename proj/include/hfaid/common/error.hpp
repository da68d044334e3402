#pragma once

#include <stdexcept>
#include <string>

namespace hfaid {

// Base for every domain failure surfaced by the library. The CLI maps these
// to exit code 1; anything else escaping is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violated a documented precondition (bad dimensions, bad config...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input data: a JSON line, a store record, an encoded image.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace hfaid
