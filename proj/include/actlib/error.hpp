#pragma once

#include <stdexcept>
#include <string>

namespace actlib {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates its kind's invariant. The message names the invariant.
class InvalidParameter : public Error {
public:
  using Error::Error;
};

class NonFiniteInput : public Error {
public:
  using Error::Error;
};

/// Raised in strict mode when a derivative is requested at a kink, and by the
/// finite-difference oracle when its stencil would straddle one.
class KinkProximity : public Error {
public:
  using Error::Error;
};

class ShapeMismatch : public Error {
public:
  using Error::Error;
};

class StaleCache : public Error {
public:
  using Error::Error;
};

/// Training produced a non-finite loss or parameter.
class Divergence : public Error {
public:
  Divergence(const std::string& what, int round, int batch)
      : Error(what), round_(round), batch_(batch) {}
  int round() const noexcept { return round_; }
  int batch() const noexcept { return batch_; }

private:
  int round_;
  int batch_;
};

}  // namespace actlib
