#pragma once

#include <stdexcept>
#include <string>

namespace cgcn {

// Malformed or inconsistent caller input (shapes, ids, files, config).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values produced or consumed during numeric work.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Command-line misuse; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cgcn
