#pragma once

#include <stdexcept>
#include <string>

namespace s2sa {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Dimension mismatches, out-of-range ids, empty inputs where a value is required.
class ShapeError : public Error {
public:
  using Error::Error;
};

// Unreadable files, malformed lines, bad checkpoint magic/version/truncation.
class DataError : public Error {
public:
  using Error::Error;
};

// Bad config keys/values, incompatible checkpoints, unusable strategy args.
class ConfigError : public Error {
public:
  using Error::Error;
};

// Non-finite losses or gradients.
class NumericalError : public Error {
public:
  using Error::Error;
};

}  // namespace s2sa
