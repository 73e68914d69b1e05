#pragma once

#include <stdexcept>
#include <string>

namespace tnqst {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An index or parameter outside its admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Bond sizes that do not line up between neighbouring sites, or a bond
/// matrix whose layout is inconsistent with the lattice.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Request exceeds the desk-scale guard (dense dimension, enumeration size).
class ScaleError : public Error {
 public:
  using Error::Error;
};

/// Operands with incompatible dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class DegenerateTraceError : public Error {
 public:
  using Error::Error;
};

/// Probability vector that cannot be interpreted as a distribution.
class InvalidDistributionError : public Error {
 public:
  using Error::Error;
};

}  // namespace tnqst
