// errors.hpp -- exception taxonomy shared by every module.
//
// All simulator errors derive from hcim::Error so callers can catch the
// whole family; the CLI maps ConfigError/UsageError to exit code 2 and
// everything else to exit code 1.
#pragma once

#include <stdexcept>
#include <string>

namespace hcim {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid or mutually inconsistent configuration values.
struct ConfigError : Error {
  using Error::Error;
};

// Mismatched vector/tensor dimensions.
struct ShapeError : Error {
  using Error::Error;
};

// A value that cannot be represented at the declared width, or an
// out-of-range code.
struct RangeError : Error {
  using Error::Error;
};

// Structurally valid input the operation cannot act on (zero active
// columns, empty candidate list, zero signal energy).
struct DegenerateInputError : Error {
  using Error::Error;
};

// API or CLI misuse (wrong layer kind, malformed flag value).
struct UsageError : Error {
  using Error::Error;
};

}  // namespace hcim
