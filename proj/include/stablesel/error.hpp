#pragma once

#include <stdexcept>

namespace stablesel {

// Malformed user input: graphs, problem files, CLI values. Exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A configured enumeration cap was exceeded. Exit code 3.
class CapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal consistency check failed. Exit code 4.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace stablesel
