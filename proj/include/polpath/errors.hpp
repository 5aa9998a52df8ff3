#pragma once

#include <stdexcept>
#include <string>

namespace polpath {

/// Input that is well-formed but describes an impossible or incomplete
/// record (unphysical state, missing runs, malformed count files).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed to produce a usable result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace polpath
