#pragma once

#include <stdexcept>
#include <string>

namespace percoplane {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedPermutation : public Error {
 public:
  using Error::Error;
};

class EulerMismatch : public Error {
 public:
  using Error::Error;
};

class NonOrientable : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class SphericalPair : public Error {
 public:
  using Error::Error;
};

class SizeTooSmall : public Error {
 public:
  using Error::Error;
};

class BallClipped : public Error {
 public:
  using Error::Error;
};

class EmptySet : public Error {
 public:
  using Error::Error;
};

class NonCycleFace : public Error {
 public:
  using Error::Error;
};

class PartitionIncomplete : public Error {
 public:
  using Error::Error;
};

class NotAMosaic : public Error {
 public:
  using Error::Error;
};

class ForcedStateViolated : public Error {
 public:
  using Error::Error;
};

class MissingDualLink : public Error {
 public:
  using Error::Error;
};

class UnsupportedObservable : public Error {
 public:
  using Error::Error;
};

class CurvesDoNotCross : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace percoplane
