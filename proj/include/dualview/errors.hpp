#pragma once

#include <stdexcept>
#include <string>

namespace dualview {

// Raised when input data violates a documented contract (bad schema values,
// out-of-range parameters, malformed annotations). CLI maps this to exit 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised on filesystem/decoding failures. CLI maps this to exit 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dualview
