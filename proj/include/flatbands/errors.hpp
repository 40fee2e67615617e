#pragma once

#include <stdexcept>
#include <string>

namespace flatbands {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input that is the caller's fault (malformed potential file, bad config).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A shift k sits on (or numerically next to) the dual lattice, where
/// (2D_zbar + k)^-1 does not exist.
class SingularShift : public Error {
 public:
  using Error::Error;
};

/// The dense kernel failed to converge.
class EigenNonConvergence : public Error {
 public:
  using Error::Error;
};

/// Condition estimate above the configured threshold in a linear solve.
class NearSingular : public Error {
 public:
  using Error::Error;
};

/// The multiplicity contour passes (numerically) through a zero of the family.
class ContourThroughZero : public Error {
 public:
  using Error::Error;
};

/// The contour integral did not round to an integer within tolerance.
class NonInteger : public Error {
 public:
  using Error::Error;
};

}  // namespace flatbands
