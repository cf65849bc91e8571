#pragma once

#include <stdexcept>
#include <string>

namespace degenflow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (negative
/// component value, non-positive time, malformed grid).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The exponent configuration is outside the band where an operation or
/// estimate is defined (e.g. drift growth exponent too large, Harnack
/// exponent non-positive).
class RegimeError : public Error {
 public:
  using Error::Error;
};

/// A region or cylinder leaves the grid or the trajectory time range.
class ClippingError : public Error {
 public:
  using Error::Error;
};

/// The explicit scheme produced a non-finite value.
class NumericalBlowup : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Claimed structure constants are violated by a flux/drift/coupler triple.
class StructureError : public Error {
 public:
  using Error::Error;
};

}  // namespace degenflow
