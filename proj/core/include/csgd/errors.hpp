#pragma once

#include <stdexcept>
#include <string>

namespace csgd {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad argument values (out-of-range sizes, mismatched dimensions, ...).
struct ParameterError : Error {
  using Error::Error;
};

// Malformed dataset content on disk.
struct DataError : Error {
  using Error::Error;
};

// Invalid schedule parameters or schedule arithmetic overflow.
struct ScheduleError : Error {
  using Error::Error;
};

// Inconsistent server/worker state transitions.
struct StateError : Error {
  using Error::Error;
};

// Requested feature the given problem cannot provide.
struct CapabilityError : Error {
  using Error::Error;
};

// Configuration error; carries the offending key.
struct ConfigError : Error {
  std::string key;
  ConfigError(std::string k, const std::string& message)
      : Error(message), key(std::move(k)) {}
};

}  // namespace csgd
