#pragma once

#include <stdexcept>
#include <string>

namespace cllab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The integral of u - v does not vanish, so W1 is undefined.
class UnequalMass : public Error {
public:
  using Error::Error;
};

class CflViolation : public Error {
public:
  using Error::Error;
};

class MissingSonicPoint : public Error {
public:
  using Error::Error;
};

/// The flux cannot provide (f')^-1 in affine form, so fans and characteristics
/// cannot be represented piecewise linearly.
class MissingDerivInverse : public Error {
public:
  using Error::Error;
};

class PastShockTime : public Error {
public:
  using Error::Error;
};

class WaveInteraction : public Error {
public:
  using Error::Error;
};

class NonDyadicRefinement : public Error {
public:
  using Error::Error;
};

class DivisionByZero : public Error {
public:
  using Error::Error;
};

class SchemeUnsupported : public Error {
public:
  using Error::Error;
};

/// The datum does not have the "nondecreasing up to a finite plateau" shape.
class ShapeError : public Error {
public:
  using Error::Error;
};

class PlateauViolated : public Error {
public:
  using Error::Error;
};

/// Invalid user configuration (CLI or JSON).
class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace cllab
