#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qtwalk {

// Raised for anything the user can fix by changing inputs or flags. The CLI
// maps these to exit code 1; every other exception maps to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public InputError {
 public:
  using InputError::InputError;
};

class FormatError : public InputError {
 public:
  using InputError::InputError;
};

class DimensionMismatch : public InputError {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual)
      : InputError("dimension mismatch: expected " + std::to_string(expected) +
                   ", got " + std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}
  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

class UnknownRoot : public InputError {
 public:
  using InputError::InputError;
};

class EmptyCorpus : public InputError {
 public:
  using InputError::InputError;
};

class TooFewPerClass : public InputError {
 public:
  using InputError::InputError;
};

class MissingToken : public InputError {
 public:
  using InputError::InputError;
};

class MissingSeed : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace qtwalk
