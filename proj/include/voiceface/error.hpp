#pragma once

#include <stdexcept>
#include <string>

namespace voiceface {

// Base class for everything thrown by this library. The CLI maps each
// subclass to a distinct process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem-level failure: missing input or unwritable output.
class IoError : public Error {
 public:
  using Error::Error;
};

// Structurally invalid file contents: bad header, bad token, unsupported
// channel count or sample encoding. Carries a 1-based line number when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg, long line = 0)
      : Error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}

  long line() const { return line_; }

 private:
  long line_ = 0;
};

// Mismatched vector dimensions or front-end fingerprints.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid, out-of-range, or unknown configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace voiceface
