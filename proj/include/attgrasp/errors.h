#ifndef ATTGRASP_ERRORS_H_
#define ATTGRASP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace attgrasp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scene construction could not place an object without overlap.
struct PlacementError : Error { using Error::Error; };
// Operands have incompatible dimensions (labels, fusion channels).
struct DimensionMismatch : Error { using Error::Error; };
// Tensor shape does not match what an operation expects.
struct ShapeError : Error { using Error::Error; };
// Index outside of map/image bounds.
struct IndexError : Error { using Error::Error; };
// Token not present in the vocabulary.
struct UnknownToken : Error { using Error::Error; };
// Token already present in the vocabulary.
struct DuplicateToken : Error { using Error::Error; };
// Object extraction found no above-threshold pixels.
struct EmptyMask : Error { using Error::Error; };
// One-grasp collection exhausted its trial budget.
struct NoSuccessfulGrasp : Error { using Error::Error; };
// Rotation augmentation moved the grasp pixel outside the image.
struct RotatedOutOfBounds : Error { using Error::Error; };
// Checkpoint path missing or unreadable.
struct MissingCheckpoint : Error { using Error::Error; };
// An operation's stated precondition was violated by the caller.
struct PreconditionError : Error { using Error::Error; };
// Bad configuration file or value.
struct ConfigError : Error { using Error::Error; };
// Filesystem / serialization failure.
struct IoError : Error { using Error::Error; };

}  // namespace attgrasp

#endif  // ATTGRASP_ERRORS_H_
