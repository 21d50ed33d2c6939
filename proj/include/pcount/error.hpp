#pragma once

#include <stdexcept>
#include <string>

namespace pcount {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or unwritable files.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed or unsupported on-disk content (NIfTI header, sidecar JSON,
// manifest, out-of-range probabilities).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Violated preconditions on arguments (bad grid, too few subjects, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace pcount
