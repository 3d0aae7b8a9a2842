#pragma once

#include <stdexcept>
#include <string>

namespace mixnet {

// Base class for all library errors. Subclasses map 1:1 to CLI exit codes,
// see exit_code().
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration: bad option values, unknown keys, unsupported method
// names. Exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Invalid or unusable input data: missing cells, constant columns, unknown
// layers, malformed files. Exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

// Estimation failures: solver non-convergence, degenerate responses, invalid
// operation preconditions at fit time. Exit code 4.
class EstimationError : public Error {
 public:
  using Error::Error;
};

// Bootstrap failures: too many failed replicates, no successful replicates.
// Exit code 5.
class BootstrapError : public Error {
 public:
  using Error::Error;
};

inline int exit_code(const Error& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const DataError*>(&e)) return 3;
  if (dynamic_cast<const EstimationError*>(&e)) return 4;
  if (dynamic_cast<const BootstrapError*>(&e)) return 5;
  return 1;
}

}  // namespace mixnet
