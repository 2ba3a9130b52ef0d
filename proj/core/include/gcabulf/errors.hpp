#pragma once

#include <stdexcept>
#include <string>

namespace gcabulf {

/// Bad arguments or configuration supplied by the caller.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data that cannot be parsed or does not satisfy a precondition.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values or divergence during training or inference.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gcabulf
