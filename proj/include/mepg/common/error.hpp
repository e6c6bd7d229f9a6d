#pragma once

#include <stdexcept>
#include <string>

namespace mepg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes, probabilities or rates outside their admissible range.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf encountered where a finite value is required.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, long node = -1)
      : Error(what), node_(node) {}
  /// Index of the offending tape node, or -1 when not tape related.
  long node() const { return node_; }

 private:
  long node_;
};

/// Replay buffer holds fewer transitions than requested.
class NotReadyError : public Error {
 public:
  using Error::Error;
};

/// Operation requested on an object that does not support it.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Fewer records than a metric needs.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure; message carries the path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mepg
