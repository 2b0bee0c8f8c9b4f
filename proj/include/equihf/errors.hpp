#pragma once

#include <stdexcept>

namespace equihf {

// Malformed or out-of-range input; messages carry location details.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerically ill-posed query: conditioning, eigenvalues too close to a
// boundary, or a path that leaves the region where an index is constant.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace equihf
