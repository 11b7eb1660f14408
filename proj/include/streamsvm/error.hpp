#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace streamsvm {

// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input (svmlight files, model files). Carries the 1-based line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Combination of options that has no defined semantics (e.g. kernel + lookahead).
class UnsupportedConfiguration : public Error {
 public:
  using Error::Error;
};

}  // namespace streamsvm
