#pragma once

#include <stdexcept>
#include <string>

namespace persistminer {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input line or non-monotone timestamps.
class StreamError : public Error {
 public:
  StreamError(std::size_t line, const std::string& what)
      : Error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A timestamp argument precedes one it must follow.
class OrderingError : public Error {
 public:
  using Error::Error;
};

/// Occurrences fall outside the measurement interval.
class IntervalError : public Error {
 public:
  using Error::Error;
};

/// LABEL view applied to an update without node labels.
class ViewError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Injection could not find an unused endpoint pair.
class ExhaustionError : public Error {
 public:
  using Error::Error;
};

}  // namespace persistminer
