#pragma once

#include <stdexcept>
#include <string>

namespace delaynf {

// Base of every library exception. The CLI maps the concrete type onto an
// exit code, so throw the most specific one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments, violated hypotheses, inconsistent inputs.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Rank deficiency, residual above tolerance, root-finder disagreement.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Malformed model or target files.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace delaynf
