#pragma once

#include <stdexcept>
#include <string>

namespace agsp {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A dense object would exceed a configured dimension cap.
struct CapExceeded : Error {
  using Error::Error;
};

/// A matrix expected to be Hermitian is not (beyond tolerance).
struct NotHermitian : Error {
  using Error::Error;
};

/// A spectral threshold is too close to the edge of the domain to filter.
struct DegenerateThreshold : Error {
  using Error::Error;
};

/// Operator factors expected to act on disjoint site sets overlap.
struct OverlappingSupports : Error {
  using Error::Error;
};

/// Tensor / matrix dimensions are inconsistent with the requested operation.
struct ShapeMismatch : Error {
  using Error::Error;
};

/// The grid is too narrow to host the requested band layout.
struct GridTooNarrow : Error {
  using Error::Error;
};

/// Requested sample dimension exceeds what the ambient space allows.
struct VTooLarge : Error {
  using Error::Error;
};

/// Two objects that must live in the same space have different dimensions.
struct DimensionMismatch : Error {
  using Error::Error;
};

/// The solver finished but no subspace passed the output filter.
struct NoViableOutput : Error {
  using Error::Error;
};

/// A measured expectation is too close to zero to decode reliably.
struct AmbiguousSign : Error {
  using Error::Error;
};

/// AGSP power must be a positive integer.
struct NonPowerOfTwoPower : Error {
  using Error::Error;
};

}  // namespace agsp
