#pragma once

#include <stdexcept>

namespace probewarp {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid argument or violated precondition (bad value, mismatched dims).
struct ArgumentError : Error {
  using Error::Error;
};

// Malformed or truncated file contents.
struct FormatError : Error {
  using Error::Error;
};

// Filesystem-level failure; the message names the offending path.
struct IoError : Error {
  using Error::Error;
};

// Projection of a point with non-positive camera-frame depth.
struct BehindCameraError : Error {
  using Error::Error;
};

// Fewer correspondences than the estimator needs.
struct InsufficientDataError : Error {
  using Error::Error;
};

// Point configuration does not determine a unique transform.
struct DegenerateError : Error {
  using Error::Error;
};

// RANSAC found no model with enough inliers.
struct NoConsensusError : Error {
  using Error::Error;
};

// Depth map with no finite entries.
struct EmptyDepthError : Error {
  using Error::Error;
};

// Invalid pipeline configuration, detected before any output is written.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace probewarp
