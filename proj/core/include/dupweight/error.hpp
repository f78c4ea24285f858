#pragma once

#include <stdexcept>
#include <string>

namespace dupweight {

// Error taxonomy maps 1:1 onto CLI exit codes:
//   UsageError -> 1, DataError -> 2, InternalError -> 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad flags, bad config values, contradictory options.
struct UsageError : Error {
  using Error::Error;
};

// Malformed input files, missing artifacts, mismatched fingerprints.
struct DataError : Error {
  using Error::Error;
};

// Broken internal invariants; always a bug, never user error.
struct InternalError : Error {
  using Error::Error;
};

}  // namespace dupweight
