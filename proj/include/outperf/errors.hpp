#pragma once

#include <stdexcept>
#include <string>

namespace outperf {

/// Base class for all library errors.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (CSV, config, serialized object).
class parse_error : public error {
 public:
  using error::error;
};

/// Two series or sample sets that must share an axis do not.
class alignment_error : public error {
 public:
  using error::error;
};

/// A numeric parameter is outside its admissible range.
class parameter_error : public error {
 public:
  using error::error;
};

/// Matrix/tensor dimensions are inconsistent.
class shape_error : public error {
 public:
  using error::error;
};

/// A computation produced non-finite values or failed to converge.
class numeric_error : public error {
 public:
  using error::error;
};

/// Filesystem read/write failure.
class io_error : public error {
 public:
  using error::error;
};

}  // namespace outperf
