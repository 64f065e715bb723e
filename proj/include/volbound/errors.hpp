#pragma once

#include <stdexcept>
#include <string>

namespace volbound {

/// Price outside the no-arbitrage band, so no implied volatility exists.
class OutOfBounds : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NoConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad sizes or parameters in a simulation or sweep configuration.
class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a pathwise functional is requested from a summaries-only batch.
class MissingPaths : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class BracketFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace volbound
