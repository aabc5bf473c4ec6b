#pragma once

#include <stdexcept>
#include <string>

namespace fermat {

/// Bad input: malformed files, out-of-range parameters, dimension
/// mismatches. The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A computation failed numerically (non-finite values, pathological
/// rejection rates, unreachable states that indicate broken setup).
/// The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fermat
