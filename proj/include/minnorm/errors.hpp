#pragma once

#include <stdexcept>
#include <string>

namespace minnorm {

/// Malformed or invalid user input (datasets, slope sequences, configs).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// An iterative solver stopped before reaching its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace minnorm
