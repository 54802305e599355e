#pragma once

#include <stdexcept>
#include <string>

namespace edcrowd {

// Raised for invalid or insufficient input data: malformed files, violated
// preconditions on series and labels, warmup gaps. The CLI maps it to exit 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace edcrowd
