#pragma once

#include <stdexcept>

namespace skyway {

// A failure inside a well-formed computation (drone fault, singular fit).
// The CLI maps it to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input, configuration or violated precondition. Exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace skyway
