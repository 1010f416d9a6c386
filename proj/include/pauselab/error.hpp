#pragma once

#include <stdexcept>
#include <string>

namespace pauselab {

/// Malformed input: files, configs, out-of-range arguments. CLI exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed to meet its contract (non-convergence, trace
/// leakage, ...). CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pauselab
