#pragma once

#include <stdexcept>
#include <string>

namespace peerlex {

// Base of every error the library throws. The CLI maps InputError to exit
// status 2 and everything else to 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent user input: files, dictionaries, configs.
class InputError : public Error {
 public:
  using Error::Error;
};

// An input file failed validation at a specific line.
class ParseError : public InputError {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : InputError(path + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace peerlex
