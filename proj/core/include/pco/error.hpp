#pragma once

#include <stdexcept>
#include <string>

namespace pco {

// Argument validation failures use std::invalid_argument directly. The types
// below cover the remaining failure kinds callers need to tell apart.

/// Requested operation is not defined for the given input (e.g. Lepski's
/// ordered rule on a multivariate grid).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The density estimate grid does not cover the mass of the target density.
class CoverageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed external input (CSV rows, config files, grid and method strings).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pco
