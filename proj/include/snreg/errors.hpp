#pragma once

#include <stdexcept>

namespace snreg {

// Invalid user-supplied configuration or arguments.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent input data (CSV parsing, dimension mismatches).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure: rank deficiency, solver non-convergence, degenerate
// normalizer, too few tail observations.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace snreg
