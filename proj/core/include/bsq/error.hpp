#pragma once

#include <stdexcept>
#include <string>

namespace bsq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on different grids, or a precondition on a field failed
/// (nonzero mean, non-solenoidal velocity, ...).
class SpectralError : public Error {
 public:
  using Error::Error;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

}  // namespace bsq
