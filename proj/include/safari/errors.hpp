#pragma once

#include <stdexcept>
#include <string>

namespace safari {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatched dimensions, invalid parameters, malformed config values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class InfeasiblePartitionError : public Error {
 public:
  using Error::Error;
};

// Saliency scores summed to zero; callers fall back to magnitude pruning.
class DegenerateSaliencyError : public Error {
 public:
  using Error::Error;
};

class UndefinedDeltaError : public Error {
 public:
  using Error::Error;
};

class ClientMisconfigurationError : public Error {
 public:
  using Error::Error;
};

class NoSurrogateError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  NumericError(const std::string& what, long round) : Error(what), round_(round) {}
  long round() const noexcept { return round_; }

 private:
  long round_;
};

}  // namespace safari
